import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plembed.bz import BasicConstructionInput, FoldInputError, crease_pattern, fold_basic_construction

EQ = BasicConstructionInput.from_ratio((1.2, 1.2, 1.2), 1.0)


@pytest.fixture(scope="module")
def sweep():
    return fold_basic_construction(EQ, 6)


def test_input_geometry():
    assert EQ.circumradius == pytest.approx(1.2 / np.sqrt(3), rel=1e-15)
    assert EQ.apex_height == pytest.approx(np.sqrt((1.44 - 1.0) / 3), rel=1e-14)
    A = EQ.big_vertices
    np.testing.assert_allclose(np.linalg.norm(A, axis=1), EQ.circumradius, rtol=1e-14)
    np.testing.assert_allclose(np.linalg.norm(A[1] - A[2]), 1.2, rtol=1e-14)


@pytest.mark.parametrize("big,small", [
    ((1.0, 1.0, 1.9), (0.5, 0.5, 0.95)),   # obtuse
    ((3.0, 4.0, 5.0), (1.5, 2.0, 2.5)),    # right angle
    ((1.0, 1.1, 1.2), (0.5, 0.55, 0.61)),  # not similar
    ((1.0, 1.0, 1.0), (1.1, 1.1, 1.1)),    # t larger than T
])
def test_bad_inputs_rejected(big, small):
    with pytest.raises(FoldInputError):
        BasicConstructionInput(big, small)


def test_optional_bounds_checked():
    with pytest.raises(FoldInputError, match="alpha_min"):
        BasicConstructionInput.from_ratio((1, 1, 1), 0.8, alpha_min=1.1)
    with pytest.raises(FoldInputError, match="C"):
        BasicConstructionInput.from_ratio((1, 1, 1), 0.8, shrink=0.7)
    BasicConstructionInput.from_ratio((1, 1, 1), 0.8, alpha_min=1.0, shrink=0.9)


@pytest.mark.parametrize("level", [0, 1, 3])
def test_pattern_tiles_the_triangle(level):
    p = crease_pattern(EQ, level)
    assert p.n_pieces == 6 * 2 ** level
    pc = p.pieces()
    u, v = pc[:, 1] - pc[:, 0], pc[:, 2] - pc[:, 0]
    areas = 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    assert np.all(areas > 0)
    assert areas.sum() == pytest.approx(np.sqrt(3) / 4 * 1.44, rel=1e-14)
    np.testing.assert_allclose(p.boundary[p.corner_index], EQ.big_vertices, atol=1e-15)


def test_ratio_one_is_flat():
    for sides in ((1.0, 1.0, 1.0), (1.0, 1.1, 1.2)):
        r = fold_basic_construction(BasicConstructionInput.from_ratio(sides, sides[0]), 2)
        assert r.constraint_residual <= 1e-10 and r.feasible
        np.testing.assert_allclose(r.fold_angles, np.pi, atol=1e-12)
        assert abs(r.prism_height) < 1e-12


def test_level_zero_obstruction_closed_form():
    big, small = 1.2, 1.0
    R, r = big / np.sqrt(3), small / np.sqrt(3)
    h = np.sqrt(R * R - r * r)
    # E' on the lateral face and at distance big/2 from both ends: height +-z_e over the side midpoint
    z_e = 0.5 * np.sqrt(big * big - small * small)
    # it must also be at distance R/2 (the inradius of T) from B' = (b, h)
    gaps = [abs((r / 2) ** 2 + (h - s * z_e) ** 2 - (R / 2) ** 2) for s in (1, -1)]
    assert min(gaps) > 0.01


def test_level_zero_reported_infeasible(sweep):
    lvl0 = sweep.history[0]
    assert not lvl0.converged
    assert lvl0.constraint_residual >= 1e-3
    assert lvl0.constraint_residual == pytest.approx(0.05241752152903245, rel=1e-6)


def test_residual_strictly_decreases_with_level(sweep):
    res = sweep.residuals_by_level
    assert len(res) == 7
    assert all(a > b for a, b in zip(res[1:], res[2:]))
    assert all(a >= b for a, b in zip(res, res[1:]))


def test_sweep_outputs(sweep):
    assert sweep.isometry_residual <= 1e-12
    assert sweep.pattern.n_pieces == 384
    assert sweep.mesh.n_vertices == 385
    assert not sweep.feasible
    assert sweep.iterations == sum(h.iterations for h in sweep.history)
    assert sweep.prism_height == pytest.approx(EQ.apex_height, rel=1e-3)


def test_face_rotation_allowance_helps():
    plain = fold_basic_construction(EQ, 1)
    tilted = fold_basic_construction(EQ, 1, face_rot_max=0.05)
    assert tilted.constraint_residual < plain.constraint_residual
    assert np.all(np.abs(tilted.face_rotations) <= 0.05)


def test_deterministic():
    a = fold_basic_construction(EQ, 2, seed=4)
    b = fold_basic_construction(EQ, 2, seed=4)
    np.testing.assert_array_equal(a.mesh.vertices, b.mesh.vertices)
    assert a.residuals_by_level == b.residuals_by_level


@settings(max_examples=8)
@given(st.floats(0.9, 1.1), st.floats(0.9, 1.1), st.floats(0.7, 0.99), st.integers(0, 1))
def test_isometry_exact_whatever_the_solver_does(s2, s3, q, level):
    sides = (1.0, s2, s3)
    s = np.sort(sides)
    if s[0] ** 2 + s[1] ** 2 <= s[2] ** 2 * (1 + 1e-6):
        sides = (1.0, 1.0, 1.0)
    r = fold_basic_construction(BasicConstructionInput.from_ratio(sides, q), level)
    assert r.isometry_residual <= 1e-12
    assert r.residuals_by_level[-1] <= r.residuals_by_level[0] + 1e-15
