"""Acceptance criteria, one verdict line each.

Run under pytest (verdicts are echoed in the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cli_cases import CASES, run  # noqa: E402
from plembed import shapes  # noqa: E402
from plembed.bz import BasicConstructionInput, build_rippled_cone, fold_basic_construction  # noqa: E402
from plembed.curvature import extremal_vertex_defect_check, gauss_bonnet_check, vertex_defects  # noqa: E402
from plembed.kuratowski import kuratowski_embed, verify_bilipschitz  # noqa: E402
from plembed.mesh import load_mesh  # noqa: E402
from plembed.metric import distance_field, distance_matrix, farthest_point_net  # noqa: E402
from plembed.qc import (  # noqa: E402
    convex_polyhedron_bound,
    folding_map_dilatation,
    folding_numeric_agreement,
    polyhedron_dihedral_bound,
)
from plembed.bz.cone import planar_conformality_check  # noqa: E402

DATA = Path(__file__).parent / "data"
PI = np.pi
VERDICTS = []


def _mesh(name):
    return load_mesh(DATA / name)


def _record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})"
    VERDICTS.append(line)
    print(line)
    return passed


def criterion_1():
    surfaces = {name: _mesh(name).surface for name in
                ("cube.off", "tetrahedron.off", "icosahedron.off", "flat_torus_r4.off", "sphere642.off")}
    surfaces["flat_torus_grid(20)"] = shapes.flat_torus_grid(20)
    worst = max(abs(gauss_bonnet_check(s)) for s in surfaces.values())
    return _record(1, "Gauss-Bonnet on six closed surfaces", worst < 1e-9, f"max |residual| = {worst:.2e} rad")


def criterion_2():
    flat = np.abs(vertex_defects(shapes.flat_torus_grid(20))).max()
    checks = [extremal_vertex_defect_check(_mesh(f"torus{i}.off")) for i in range(5)]
    ok = flat == 0.0 and all(c.passed for c in checks)
    low = min(c.defect for c in checks)
    return _record(2, "flat torus defects vanish, embedded tori have a positive extremal defect", ok,
                   f"max |flat defect| = {flat:g}, min extremal defect = {low:.4f}")


def criterion_3():
    worst = 0.0
    for name in ("tetrahedron.off", "octahedron.obj", "cube.off", "icosahedron.off", "grid4.off",
                 "torus2.off"):
        s = _mesh(name).surface
        e = kuratowski_embed(s, list(range(s.n_vertices)))
        i, j = np.triu_indices(s.n_vertices, 1)
        err = np.abs(e.sup_distance(i, j) - e.point_distances()[i, j]).max()
        worst = max(worst, err)
    sphere = _mesh("sphere642.off").surface
    mins, upper = [], True
    for m in (4, 16, 64):
        r = verify_bilipschitz(kuratowski_embed(sphere, farthest_point_net(sphere, count=m)), n_pairs=10_000)
        upper &= r.upper_bound_holds and r.n_pairs == 10_000
        mins.append(r.min_ratio)
    monotone = all(a <= b for a, b in zip(mins, mins[1:]))
    ok = worst <= 1e-12 and upper and monotone
    return _record(3, "Kuratowski exactness, sup-norm upper bound, monotone min ratio", ok,
                   f"exactness error {worst:.1e}, min ratios " + ", ".join(f"{x:.4f}" for x in mins))


GRID = [
    (PI / 4, PI / 2, 2), (PI / 4, PI, 3), (PI / 3, PI / 2, 3), (PI / 2, PI, 2),
    (PI / 2, PI, 3), (PI / 2, 2 * PI, 4), (2 * PI / 3, PI, 3), (PI / 6, PI / 3, 4),
    (PI, 3 * PI / 2, 3), (PI / 5, 2 * PI, 3), (3 * PI / 4, PI, 5), (PI / 2, PI / 2, 3),
]


def criterion_4():
    worst, ineq = 0.0, True
    for a, b, n in GRID:
        err, reports = folding_numeric_agreement(a, b, n, n_points=100)
        worst = max(worst, err)
        ineq &= folding_map_dilatation(a, b, n).satisfies_inequalities(1e-9)
        ineq &= all(r.satisfies_inequalities(1e-9) for r in reports)
    return _record(4, "folding closed forms against finite differences on 12 cases", worst < 1e-6 and ineq,
                   f"max relative error {worst:.2e}, inequalities {'hold' if ineq else 'violated'}")


def criterion_5():
    planar = max(planar_conformality_check(th, samples=200) for th in (PI / 2, PI, 3 * PI / 2, 2 * PI))
    fold = folding_map_dilatation(PI / 2, PI, 3).K
    ok = planar <= 1 + 1e-6 and fold >= 2
    return _record(5, "planar conformal map has K = 1, the 3D folding does not", ok,
                   f"planar max K = {planar:.9f}, folding K = {fold:g}")


def criterion_6():
    tet, cub = convex_polyhedron_bound(4, 3), convex_polyhedron_bound(6, 3)
    exact = tet.K == 3.0 and Fraction(cub.K).limit_denominator(100) == Fraction(5, 3) and cub.K == 5 / 3
    cube = polyhedron_dihedral_bound(_mesh("cube.off")).K
    prism = polyhedron_dihedral_bound(_mesh("prism_pi10.off")).K
    ok = exact and cube >= 2 and prism >= 10 * (1 - 1e-9)
    return _record(6, "polyhedral dilatation bounds", ok,
                   f"bounds {tet.K:g}, {cub.K:.6f}; cube K = {cube:g}; prism K = {prism:.12f}")


def criterion_7():
    ident = fold_basic_construction(BasicConstructionInput.from_ratio((1.0, 1.0, 1.0), 1.0), level=0)
    sweep = fold_basic_construction(BasicConstructionInput.from_ratio((1.2, 1.2, 1.2), 1.0), level=6)
    res = sweep.residuals_by_level
    level0 = res[0]
    tail = res[1:7]
    decreasing = all(a > b for a, b in zip(tail, tail[1:]))
    ok = ident.constraint_residual <= 1e-10 and ident.feasible and level0 >= 1e-3 and decreasing
    below = [k for k, r in enumerate(res) if r <= 1e-6]
    note = f"first level <= 1e-6: {below[0]}" if below else f"no level <= 6 reaches 1e-6 (min {min(res):.2e})"
    return _record(7, "fold solver identity, level-0 infeasibility, decreasing residuals", ok,
                   f"identity {ident.constraint_residual:.1e}, level 0 {level0:.4f}, "
                   f"levels 1-6 {'strictly decreasing' if decreasing else 'NOT decreasing'}; {note}")


def criterion_8():
    worst = 0.0
    for theta, n in ((3 * PI, 6), (5 * PI / 2, 8), (4 * PI, 12)):
        c = build_rippled_cone(theta, n)
        d = vertex_defects(c.mesh.surface)[0]
        worst = max(worst, abs(c.apex_angle_sum - theta), abs(d - (2 * PI - theta)))
    return _record(8, "rippled cone apex angle and defect", worst < 1e-9, f"max error {worst:.1e}")


def criterion_9():
    cube = _mesh("cube.off").surface
    d = distance_field(cube, 0, refine=4).distances
    far = int(np.argmax(np.linalg.norm(_mesh("cube.off").vertices - _mesh("cube.off").vertices[0], axis=1)))
    rel = abs(d[far] - np.sqrt(5)) / np.sqrt(5)
    asym = 0.0
    for name in ("cube.off", "cube2.off", "tetrahedron.off", "icosahedron.off", "octahedron.obj",
                 "grid4.off", "prism_pi10.off", "torus2.off", "sphere642.off", "flat_torus_r4.off"):
        dm = distance_matrix(_mesh(name).surface)
        asym = max(asym, np.abs(dm - dm.T).max())
    ok = rel <= 0.02 and asym <= 1e-9
    return _record(9, "geodesic convergence on the cube and distance symmetry", ok,
                   f"refine-4 corner distance {d[far]:.6f}, {100 * rel:.2f}% off sqrt(5); asymmetry {asym:.1e}")


def criterion_10():
    commands = {argv[0] for argv, _ in CASES.values()}
    bad = [name for name, (argv, _) in CASES.items() if run(argv)[1] != run(argv)[1]]
    return _record(10, "byte-identical CLI reports across two runs", not bad and len(commands) == 11,
                   f"{len(CASES)} invocations over {len(commands)} subcommands, {len(bad)} differing")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10]


@pytest.fixture(autouse=True)
def _fixed_seed(monkeypatch):
    monkeypatch.delenv("PLEMBED_SEED", raising=False)


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 11)])
def test_acceptance(check):
    assert check()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
