import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plembed import kernels
from plembed._accel import HAVE_NUMBA
from plembed.metric import refined_graph

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable or disabled")


def _unit(rng, n):
    a = rng.standard_normal((n, 3))
    return a / np.linalg.norm(a, axis=1)[:, None]


@needs_numba
@given(st.integers(1, 200), st.integers(0, 10**6))
def test_corner_angles_backends_agree(n, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0.1, 2, n), rng.uniform(0.1, 2, n)
    # include degenerate and invalid triangles to exercise the clamp
    opp = rng.uniform(0, 1.2, n) * (a + b)
    np.testing.assert_allclose(kernels.corner_angles_jit(opp, a, b),
                               kernels.corner_angles_np(opp, a, b), rtol=0, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("name", ["sphere642.off", "torus2.off", "cube.off"])
@pytest.mark.parametrize("refine", [0, 2])
def test_dijkstra_backends_agree(golden, name, refine):
    n, ip, ix, w = refined_graph(golden(name).surface, refine)
    for src in (0, n // 3, n - 1):
        a = kernels.dijkstra_jit(ip, ix, w, src)
        b = kernels.dijkstra_np(ip, ix, w, src)
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=0)


@needs_numba
def test_dijkstra_unreachable_is_inf():
    ip = np.array([0, 1, 2, 2, 2], dtype=np.int64)
    ix = np.array([1, 0], dtype=np.int64)
    w = np.array([1.5, 1.5])
    for f in (kernels.dijkstra_jit, kernels.dijkstra_np):
        d = f(ip, ix, w, 0)
        assert d[1] == 1.5 and np.isinf(d[2:]).all()


@needs_numba
@given(st.integers(1, 50), st.integers(1, 30), st.integers(0, 10**6))
def test_sup_norm_backends_agree(n, m, seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((n, m))
    i, j = rng.integers(0, n, 64), rng.integers(0, n, 64)
    np.testing.assert_array_equal(kernels.sup_norm_pairs_jit(c, i, j),
                                  kernels.sup_norm_pairs_np(c, i, j))


@needs_numba
@given(st.integers(1, 40), st.integers(0, 10**6))
def test_chain_rotations_backends_agree(n, seed):
    rng = np.random.default_rng(seed)
    ax, th = _unit(rng, n), rng.uniform(-np.pi, np.pi, n)
    a = kernels.chain_rotations_jit(ax, th)
    b = kernels.chain_rotations_np(ax, th)
    np.testing.assert_allclose(a, b, atol=1e-12)
    # products of rotations stay orthogonal
    np.testing.assert_allclose(a @ a.transpose(0, 2, 1), np.broadcast_to(np.eye(3), a.shape), atol=1e-12)


@needs_numba
@given(st.integers(1, 20), st.integers(1, 30), st.integers(0, 10**6))
def test_chain_jacobian_backends_agree(n, p, seed):
    rng = np.random.default_rng(seed)
    w, y = rng.standard_normal((n, 3)), rng.standard_normal((p, 3))
    depth = rng.integers(0, n + 1, p)
    np.testing.assert_allclose(kernels.chain_jacobian_jit(w, y, depth),
                               kernels.chain_jacobian_np(w, y, depth), atol=1e-14)


_PROBE = r"""
import json, numpy as np, plembed
from plembed.mesh import load_mesh
from plembed.curvature import angle_defects
from plembed.metric import distance_field, farthest_point_net
from plembed.kuratowski import kuratowski_embed, verify_bilipschitz
from plembed.bz import fold_basic_construction, BasicConstructionInput
m = load_mesh(%r)
net = farthest_point_net(m.surface, count=16)
e = kuratowski_embed(m.surface, net)
r = verify_bilipschitz(e, n_pairs=2000, seed=3)
f = fold_basic_construction(BasicConstructionInput.from_ratio((1.2, 1.2, 1.2), 1.0), level=1)
print(json.dumps({"backend": plembed.BACKEND,
                  "defects": angle_defects(m.surface).defects.tolist(),
                  "dist": distance_field(m.surface, 5, refine=1).distances.tolist(),
                  "net": net.landmarks.tolist(),
                  "ratio": [r.min_ratio, r.max_ratio],
                  "fold": f.constraint_residual}))
"""


def _probe(mesh, disable):
    env = dict(os.environ)
    env.pop("PLEMBED_NO_NUMBA", None)
    if disable:
        env["PLEMBED_NO_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", _PROBE % str(mesh)], env=env, check=True,
                         capture_output=True, text=True).stdout
    return json.loads(out)


@needs_numba
def test_numpy_fallback_matches_numba(data_dir):
    fast = _probe(data_dir / "sphere642.off", False)
    slow = _probe(data_dir / "sphere642.off", True)
    assert fast["backend"] == "numba" and slow["backend"] == "numpy"
    np.testing.assert_allclose(fast["defects"], slow["defects"], atol=1e-13)
    np.testing.assert_allclose(fast["dist"], slow["dist"], rtol=1e-12)
    assert fast["net"] == slow["net"]
    np.testing.assert_allclose(fast["ratio"], slow["ratio"], rtol=1e-12)
    assert fast["fold"] == pytest.approx(slow["fold"], rel=1e-6)
