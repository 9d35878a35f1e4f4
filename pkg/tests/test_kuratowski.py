import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plembed import shapes
from plembed.kuratowski import (
    kuratowski_embed,
    sample_pairs,
    verify_bilipschitz,
    verify_isometry_on_landmarks,
)
from plembed.mesh import build_pl_surface
from plembed.metric import distance_matrix, farthest_point_net


def _path3():
    # path metric 0-1-2 realised by two thin triangles sharing the middle vertex
    lengths = {(0, 1): 1, (1, 2): 1, (0, 3): 0.6, (1, 3): 0.6, (1, 4): 0.6, (2, 4): 0.6}
    return build_pl_surface(lengths, [[0, 1, 3], [1, 2, 4]])


def test_two_point_coordinates():
    s = _path3()
    e = kuratowski_embed(s, [0, 1], points=[0, 1])
    np.testing.assert_allclose(e.coords, [[0, 1], [1, 0]])


def test_path_metric_coordinates():
    e = kuratowski_embed(_path3(), [0, 1, 2], points=[0, 1, 2])
    np.testing.assert_allclose(e.coords[0], [0, 1, 2])
    np.testing.assert_allclose(e.coords[2], [2, 1, 0])


def test_icosahedron_sup_distance_is_exact(golden):
    s = golden("icosahedron.off").surface
    e = kuratowski_embed(s, range(12))
    i, j = np.triu_indices(12, 1)
    # brute-force oracle: max over all landmarks z of |d(x,z) - d(y,z)|
    d = distance_matrix(s)
    oracle = np.abs(d[i] - d[j]).max(axis=1)
    np.testing.assert_allclose(e.sup_distance(i, j), oracle, atol=0)
    np.testing.assert_allclose(oracle, d[i, j], atol=1e-12)


def test_landmark_isometry_examples(golden):
    cube = golden("cube.off").surface
    assert verify_isometry_on_landmarks(kuratowski_embed(cube, range(8), refine=2)) < 1e-12
    assert verify_isometry_on_landmarks(kuratowski_embed(cube, [3])) == 0.0
    net = farthest_point_net(cube, count=2)
    assert verify_isometry_on_landmarks(kuratowski_embed(cube, net)) == 0.0


def test_landmark_pairs_have_unit_ratio(golden):
    s = golden("sphere642.off").surface
    net = farthest_point_net(s, count=20)
    e = kuratowski_embed(s, net, points=net.landmarks)
    r = verify_bilipschitz(e)
    assert r.min_ratio == pytest.approx(1.0, abs=1e-12)
    assert r.max_ratio == pytest.approx(1.0, abs=1e-12)


def test_sphere_net_at_fifteen_percent_of_diameter(golden):
    s = golden("sphere642.off").surface
    d = distance_matrix(s)
    net = farthest_point_net(s, epsilon=0.15 * d.max())
    r = verify_bilipschitz(kuratowski_embed(s, net), distances=d, seed=0)
    assert r.n_pairs + r.skipped == 10_000
    assert r.min_ratio >= 0.7
    assert r.upper_bound_holds


def test_sampling_rules():
    assert len(sample_pairs(200)) == 200 * 199 // 2
    p = sample_pairs(1000, 500, seed=3)
    assert p.shape == (500, 2) and np.all(p[:, 0] != p[:, 1])
    np.testing.assert_array_equal(p, sample_pairs(1000, 500, seed=3))


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("PLEMBED_SEED", "11")
    a = sample_pairs(1000, 50)
    np.testing.assert_array_equal(a, sample_pairs(1000, 50, seed=11))


def test_bad_landmarks_rejected():
    s = shapes.icosahedron().surface
    for bad in ([], [0, 0], [99]):
        with pytest.raises(ValueError):
            kuratowski_embed(s, bad)


@given(st.integers(0, 300), st.integers(1, 40))
def test_sup_norm_never_exceeds_distance(seed, m):
    s = shapes.random_sphere(80, seed=seed).surface
    e = kuratowski_embed(s, farthest_point_net(s, count=m))
    r = verify_bilipschitz(e)
    assert r.max_ratio <= 1 + 1e-12
    assert 0 <= r.min_ratio <= r.max_ratio
