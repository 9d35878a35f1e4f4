"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba (``*_jit``) and
a vectorised numpy/scipy version (``*_np``).  The public name is bound to the
numba version when numba is importable and not disabled through
``PLEMBED_NO_NUMBA``; both are kept importable so tests and the benchmark can
compare them directly.
"""
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

from ._accel import HAVE_NUMBA, njit

# ---------------------------------------------------------------------------
# corner angles from edge lengths (law of cosines, clamped)


def corner_angles_np(opp, a, b):
    """Angle between sides ``a`` and ``b`` of a triangle whose third side is ``opp``."""
    c = (a * a + b * b - opp * opp) / (2.0 * a * b)
    return np.arccos(np.clip(c, -1.0, 1.0))


@njit
def corner_angles_jit(opp, a, b):
    out = np.empty(opp.shape[0])
    for i in range(opp.shape[0]):
        c = (a[i] * a[i] + b[i] * b[i] - opp[i] * opp[i]) / (2.0 * a[i] * b[i])
        if c > 1.0:
            c = 1.0
        elif c < -1.0:
            c = -1.0
        out[i] = np.arccos(c)
    return out


# ---------------------------------------------------------------------------
# single-source shortest paths on a CSR graph


def dijkstra_np(indptr, indices, weights, source):
    n = indptr.shape[0] - 1
    g = csr_matrix((weights, indices, indptr), shape=(n, n))
    return _sp_dijkstra(g, directed=True, indices=int(source))


@njit
def dijkstra_jit(indptr, indices, weights, source):
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=np.bool_)
    # binary heap with lazy deletion; capacity bounded by edge count + 1
    cap = indices.shape[0] + 1
    hkey = np.empty(cap)
    hval = np.empty(cap, dtype=np.int64)
    size = 0
    dist[source] = 0.0
    hkey[0] = 0.0
    hval[0] = source
    size = 1
    while size > 0:
        d = hkey[0]
        u = hval[0]
        size -= 1
        if size > 0:
            # sift the last element down from the root
            k = hkey[size]
            v = hval[size]
            i = 0
            while True:
                c = 2 * i + 1
                if c >= size:
                    break
                if c + 1 < size and hkey[c + 1] < hkey[c]:
                    c += 1
                if hkey[c] < k:
                    hkey[i] = hkey[c]
                    hval[i] = hval[c]
                    i = c
                else:
                    break
            hkey[i] = k
            hval[i] = v
        if done[u]:
            continue
        done[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            nd = d + weights[e]
            if nd < dist[w]:
                dist[w] = nd
                # sift up
                i = size
                size += 1
                while i > 0:
                    p = (i - 1) // 2
                    if hkey[p] > nd:
                        hkey[i] = hkey[p]
                        hval[i] = hval[p]
                        i = p
                    else:
                        break
                hkey[i] = nd
                hval[i] = w
    return dist


# ---------------------------------------------------------------------------
# sup-norm distance between rows of a coordinate table


def sup_norm_pairs_np(coords, i, j):
    return np.max(np.abs(coords[i] - coords[j]), axis=1)


@njit
def sup_norm_pairs_jit(coords, i, j):
    out = np.empty(i.shape[0])
    m = coords.shape[1]
    for p in range(i.shape[0]):
        a = i[p]
        b = j[p]
        best = 0.0
        for k in range(m):
            d = abs(coords[a, k] - coords[b, k])
            if d > best:
                best = d
        out[p] = best
    return out


# ---------------------------------------------------------------------------
# rotation chains for the fold solver


def _rodrigues(axis, angle):
    c = np.cos(angle)
    s = np.sin(angle)
    x, y, z = axis
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def chain_rotations_np(axes, angles):
    """Cumulative products ``R(a_0, t_0) @ ... @ R(a_i, t_i)`` for every i."""
    n = axes.shape[0]
    out = np.empty((n, 3, 3))
    acc = np.eye(3)
    for i in range(n):
        acc = acc @ _rodrigues(axes[i], angles[i])
        out[i] = acc
    return out


@njit
def chain_rotations_jit(axes, angles):
    n = axes.shape[0]
    out = np.empty((n, 3, 3))
    acc = np.eye(3)
    r = np.empty((3, 3))
    for i in range(n):
        x = axes[i, 0]
        y = axes[i, 1]
        z = axes[i, 2]
        c = np.cos(angles[i])
        s = np.sin(angles[i])
        t = 1.0 - c
        r[0, 0] = c + t * x * x
        r[0, 1] = t * x * y - s * z
        r[0, 2] = t * x * z + s * y
        r[1, 0] = t * x * y + s * z
        r[1, 1] = c + t * y * y
        r[1, 2] = t * y * z - s * x
        r[2, 0] = t * x * z - s * y
        r[2, 1] = t * y * z + s * x
        r[2, 2] = c + t * z * z
        acc = acc @ r
        out[i] = acc
    return out


def chain_jacobian_np(w, y, depth):
    """``J[p, :, j] = w_j x y_p`` for ``j < depth[p]``, zero otherwise."""
    n = w.shape[0]
    cr = np.cross(w[None, :, :], y[:, None, :])  # (P, N, 3)
    mask = np.arange(n)[None, :] < depth[:, None]
    cr *= mask[:, :, None]
    return np.ascontiguousarray(cr.transpose(0, 2, 1))


@njit
def chain_jacobian_jit(w, y, depth):
    p_count = y.shape[0]
    n = w.shape[0]
    out = np.zeros((p_count, 3, n))
    for p in range(p_count):
        y0 = y[p, 0]
        y1 = y[p, 1]
        y2 = y[p, 2]
        for j in range(depth[p]):
            out[p, 0, j] = w[j, 1] * y2 - w[j, 2] * y1
            out[p, 1, j] = w[j, 2] * y0 - w[j, 0] * y2
            out[p, 2, j] = w[j, 0] * y1 - w[j, 1] * y0
    return out


if HAVE_NUMBA:
    corner_angles = corner_angles_jit
    dijkstra = dijkstra_jit
    sup_norm_pairs = sup_norm_pairs_jit
    chain_rotations = chain_rotations_jit
    chain_jacobian = chain_jacobian_jit
else:
    corner_angles = corner_angles_np
    dijkstra = dijkstra_np
    sup_norm_pairs = sup_norm_pairs_np
    chain_rotations = chain_rotations_np
    chain_jacobian = chain_jacobian_np
