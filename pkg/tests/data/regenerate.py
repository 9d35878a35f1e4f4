"""Rewrite the golden meshes in this directory: ``python3 tests/data/regenerate.py``."""
from pathlib import Path

import numpy as np

from plembed import shapes
from plembed.mesh import embedded_mesh, save_mesh

HERE = Path(__file__).parent

TORI = [
    dict(major=2.0, minor=0.7, n_major=24, n_minor=12),
    dict(major=3.0, minor=1.0, n_major=30, n_minor=10),
    dict(major=1.5, minor=0.5, n_major=16, n_minor=8),
    dict(major=2.5, minor=0.4, n_major=20, n_minor=12, twist=0.1),
    dict(major=2.0, minor=1.2, n_major=18, n_minor=16, twist=0.05),
]


def clifford_torus(k=20):
    """k x k grid on the Clifford torus in R^4; all squares congruent, so the PL metric is flat."""
    t = 2 * np.pi * np.arange(k) / k
    a, b = np.meshgrid(t, t, indexing="ij")
    v = np.column_stack([np.cos(a).ravel(), np.sin(a).ravel(), np.cos(b).ravel(), np.sin(b).ravel()])
    faces = []
    for i in range(k):
        for j in range(k):
            p, q = i * k + j, ((i + 1) % k) * k + j
            r, s = ((i + 1) % k) * k + (j + 1) % k, i * k + (j + 1) % k
            faces += [[p, q, r], [p, r, s]]
    return embedded_mesh(v / np.sqrt(2.0), faces)


def main():
    save_mesh(shapes.cube(), HERE / "cube.off")
    save_mesh(shapes.regular_tetrahedron(), HERE / "tetrahedron.off")
    save_mesh(shapes.icosahedron(), HERE / "icosahedron.off")
    save_mesh(shapes.octahedron(), HERE / "octahedron.obj")
    save_mesh(shapes.icosphere(3), HERE / "sphere642.off")
    for i, kw in enumerate(TORI):
        save_mesh(shapes.torus(**kw), HERE / f"torus{i}.off")
    save_mesh(clifford_torus(20), HERE / "flat_torus_r4.off")
    save_mesh(shapes.wedge_prism(np.pi / 10), HERE / "prism_pi10.off")
    save_mesh(shapes.flat_grid(4), HERE / "grid4.off")
    # subdivided cube, a short image of the doubled cube
    save_mesh(shapes.cube(2.0), HERE / "cube2.off")
    (HERE / "bad_missing_vertex.off").write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n")
    (HERE / "bad_nonmanifold.off").write_text(
        "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n")
    (HERE / "bad_degenerate.obj").write_text("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n")


if __name__ == "__main__":
    main()
