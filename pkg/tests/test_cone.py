import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plembed import shapes
from plembed.bz import (
    ConeFlatteningMap,
    conformality_contrast,
    contraction_annulus_map,
    flatten_cone_vertex,
    hexagon_flattening,
    planar_conformality_check,
    regular_star,
)
from plembed.mesh import ValidationError

PI = np.pi


def test_flat_vertex_gives_identity_layout():
    g = shapes.flat_grid(4)
    v = 12
    lay = flatten_cone_vertex(g.surface, v)
    assert lay.theta == pytest.approx(2 * PI, abs=1e-12)
    # compare with true planar positions in a frame with the first ray on the x-axis
    rel = g.vertices[lay.link, :2] - g.vertices[v, :2]
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    rot = np.array([[np.cos(-ang[0]), -np.sin(-ang[0])], [np.sin(-ang[0]), np.cos(-ang[0])]])
    np.testing.assert_allclose(lay.coords, rel @ rot.T, atol=1e-12)


def test_point_on_half_cone():
    r, psi = ConeFlatteningMap(PI, 2 * PI, 1.0).polar(1.0, PI / 2)
    assert r == 1.0 and psi == pytest.approx(PI, abs=1e-15)


def test_cube_corner_closes_with_four_thirds_scaling(golden):
    lay = flatten_cone_vertex(golden("cube.off").surface, 0)
    assert lay.theta == pytest.approx(1.5 * PI, abs=1e-14)
    np.testing.assert_allclose(np.diff(lay.psi) / np.diff(lay.phi), 4 / 3, rtol=1e-13)
    assert lay.image_angle_sum == pytest.approx(2 * PI, abs=1e-12)
    assert lay.closes


def test_rays_stay_rays():
    m = ConeFlatteningMap(1.3, 2 * PI, 0.7)
    rho = np.linspace(0.1, 3, 7)
    r, psi = m.polar(rho, np.full(7, 0.4))
    assert np.ptp(psi) == 0 and np.all(np.diff(r) > 0)


def test_boundary_vertex_star_is_not_a_disk():
    with pytest.raises(ValidationError, match="not a disk"):
        flatten_cone_vertex(shapes.flat_grid(3).surface, 0)


def test_open_fan_rejected():
    with pytest.raises(ValidationError):
        flatten_cone_vertex(shapes.equilateral_fan(4, closed=False), 0)


def test_planar_map_is_conformal():
    assert planar_conformality_check(PI, 2 * PI, 1.0, 100) <= 1 + 1e-6
    assert planar_conformality_check(1.1, 1.1, 2.0, 50) == pytest.approx(1.0, abs=1e-8)


def test_apex_sample_rejected():
    with pytest.raises(ValueError, match="apex"):
        planar_conformality_check(PI, samples=np.array([[0.0, 0.0], [1.0, 0.1]]))


def test_contrast_with_three_dimensional_folding():
    c = conformality_contrast(PI / 2, PI)
    assert c["planar_max_K"] <= 1 + 1e-6
    assert c["folding_K_I"] == 2.0 and c["wedge_K"] == 2.0
    assert c["folding_K"] > 1


def test_contraction_identity_at_two_pi():
    m = contraction_annulus_map(2 * PI, 1.0, 3.0)
    rho = np.array([0.3, 1.0, 2.5])
    phi = np.array([0.2, 3.0, 5.5])
    np.testing.assert_allclose(m(rho, phi), np.column_stack([rho * np.cos(phi), rho * np.sin(phi)]),
                               atol=1e-15)


def test_contraction_halves_arcs_and_keeps_radii():
    m = contraction_annulus_map(4 * PI, 1.0, 2.0)
    s = 0.8
    r, psi = m.polar(np.array([1.0, 1.0]), np.array([0.0, s]))
    assert r[0] * (psi[1] - psi[0]) == pytest.approx(s / 2)
    r, _ = m.polar(np.linspace(0, 1, 5), np.zeros(5))
    np.testing.assert_allclose(np.diff(r), 0.25)


def test_contraction_continuous_at_inner_radius():
    m = contraction_annulus_map(3 * PI, 0.5, 2.0)
    eps = 1e-9
    a = m(np.array([0.5 - eps]), np.array([1.0]))
    b = m(np.array([0.5 + eps]), np.array([1.0]))
    assert np.linalg.norm(a - b) < 1e-8


def test_contraction_errors():
    with pytest.raises(ValueError):
        contraction_annulus_map(3 * PI, 2.0, 1.0)
    with pytest.raises(ValueError):
        contraction_annulus_map(PI, 1.0, 2.0)
    with pytest.raises(ValueError, match="outside"):
        contraction_annulus_map(3 * PI, 1.0, 2.0).polar(2.5, 0.0)


@given(st.floats(0.05, 4 * PI), st.integers(6, 12))
def test_flattening_always_closes(theta, n):
    if theta / n >= PI:
        n = int(theta / PI) + 1
    lay = hexagon_flattening(theta) if n == 6 else flatten_cone_vertex(regular_star(theta, n), 0)
    assert lay.closes
    assert lay.image_angle_sum == pytest.approx(2 * PI, abs=1e-9)
