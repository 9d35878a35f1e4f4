"""Split every face into n^2 similar triangles by n-sectioning its edges."""
from __future__ import annotations

import numpy as np

from ..mesh import EmbeddedMesh, FaceGrid, PLSurface, build_pl_surface, embedded_mesh

# slot step (dj, dk) -> corner of the parent opposite the parallel parent edge
_PARALLEL = {(1, 0): 2, (0, 1): 1, (1, -1): 0}


def _child_lengths(grid: FaceGrid, s: PLSurface):
    fl = s.face_lengths()
    n = grid.n
    kids = grid.sub_faces()
    faces = grid.points[:, kids].reshape(-1, 3)
    lengths = {}
    for f in range(s.n_faces):
        for tri in kids:
            for a, b in ((0, 1), (1, 2), (2, 0)):
                ja, ka = grid.jk[tri[a]]
                jb, kb = grid.jk[tri[b]]
                step = (int(jb - ja), int(kb - ka))
                if step not in _PARALLEL:
                    step = (-step[0], -step[1])
                u, v = int(grid.points[f, tri[a]]), int(grid.points[f, tri[b]])
                key = (u, v) if u < v else (v, u)
                # sub-edges are exact n-th parts of parallel parent edges
                lengths.setdefault(key, fl[f, _PARALLEL[step]] / n)
    return faces, lengths


def subdivide_n2(s, n: int):
    """n^2-subdivision of a :class:`PLSurface` or :class:`EmbeddedMesh`.

    Original vertices keep their indices.  Embedded input returns an embedded
    mesh with barycentrically interpolated coordinates.
    """
    n = int(n)
    if n < 1:
        raise ValueError("subdivision order n must be >= 1")
    if isinstance(s, EmbeddedMesh):
        return _subdivide_embedded(s, n)
    if n == 1:
        return s
    grid = FaceGrid(s, n)
    faces, lengths = _child_lengths(grid, s)
    return build_pl_surface(lengths, faces, n_vertices=grid.n_points,
                            allow_disconnected=s.n_components > 1)


def _subdivide_embedded(m: EmbeddedMesh, n: int) -> EmbeddedMesh:
    if n == 1:
        return m
    s = m.surface
    grid = FaceGrid(s, n)
    x = np.zeros((grid.n_points, m.dim))
    w = np.column_stack([n - grid.jk.sum(1), grid.jk]) / n
    for f, tri in enumerate(s.faces):
        x[grid.points[f]] = w @ m.vertices[tri]
    faces = grid.points[:, grid.sub_faces()].reshape(-1, 3)
    return embedded_mesh(x, faces, allow_disconnected=s.n_components > 1)
