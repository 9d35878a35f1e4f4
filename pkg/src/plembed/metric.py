"""Graph-approximated intrinsic distances, epsilon-nets and short-map checks.

Refinement level ``k`` places the barycentric grid of ``2**k`` sections on
every face (the vertex set produced by ``k`` passes of 4-to-1 midpoint
subdivision) and joins every pair of grid points lying on a common original
face by its straight in-face segment.  Each such segment is an exact path in
the flat face, so graph distances are upper bounds of the intrinsic distance,
non-increasing in ``k`` and convergent to it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .mesh import EmbeddedMesh, FaceGrid, PLSurface


def _surface(s):
    return s.surface if isinstance(s, EmbeddedMesh) else s


def _csr(n, u, v, w):
    """Symmetric CSR adjacency keeping the shortest of duplicate edges."""
    uu = np.concatenate([u, v])
    vv = np.concatenate([v, u])
    ww = np.concatenate([w, w])
    key = uu * n + vv
    order = np.lexsort((ww, key))
    key = key[order]
    first = np.ones(len(key), dtype=bool)
    first[1:] = key[1:] != key[:-1]
    key = key[first]
    ww = np.ascontiguousarray(ww[order][first])
    rows = key // n
    cols = np.ascontiguousarray(key % n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return np.cumsum(indptr), cols.astype(np.int64), ww.astype(np.float64)


def refined_graph(s: PLSurface, refine: int = 0):
    """``(n_points, indptr, indices, weights)``; original vertices keep their indices."""
    s = _surface(s)
    if refine < 0:
        raise ValueError("refine must be >= 0")
    key = ("graph", int(refine))
    if key in s._cache:
        return s._cache[key]
    if refine == 0:
        n = s.n_vertices
        u, v = s.edges[:, 0], s.edges[:, 1]
        w = s.edge_lengths
    else:
        grid = FaceGrid(s, 2 ** refine)
        n = grid.n_points
        p = grid.points.shape[1]
        iu, ju = np.triu_indices(p, 1)
        d = grid.coords[:, iu] - grid.coords[:, ju]
        w = np.sqrt(np.einsum("fmk,fmk->fm", d, d)).ravel()
        u = grid.points[:, iu].ravel()
        v = grid.points[:, ju].ravel()
    out = (n,) + _csr(n, np.asarray(u, np.int64), np.asarray(v, np.int64), np.asarray(w, float))
    s._cache[key] = out
    return out


@dataclass(frozen=True)
class DistanceField:
    source: int
    distances: np.ndarray
    refine: int
    unreachable: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


def distance_field(s: PLSurface, source: int, refine: int = 0) -> DistanceField:
    """Shortest-path distances from ``source`` to every original vertex.

    Vertices in other components get ``inf`` and are listed in ``unreachable``.
    """
    s = _surface(s)
    source = int(source)
    if not 0 <= source < s.n_vertices:
        raise IndexError(f"source vertex {source} does not exist")
    n, indptr, indices, weights = refined_graph(s, refine)
    d = np.asarray(kernels.dijkstra(indptr, indices, weights, source))[: s.n_vertices]
    d = d.copy()
    d.setflags(write=False)
    unreachable = np.nonzero(~np.isfinite(d))[0]
    return DistanceField(source=source, distances=d, refine=int(refine), unreachable=unreachable)


def distance_matrix(s: PLSurface, sources=None, refine: int = 0) -> np.ndarray:
    """Rows of distance fields, one per source (default: all vertices)."""
    s = _surface(s)
    if sources is None:
        sources = range(s.n_vertices)
    n, indptr, indices, weights = refined_graph(s, refine)
    rows = [np.asarray(kernels.dijkstra(indptr, indices, weights, int(i)))[: s.n_vertices]
            for i in sources]
    return np.array(rows).reshape(-1, s.n_vertices)


@dataclass(frozen=True)
class Net:
    landmarks: np.ndarray
    covering_radius: float
    radius_history: np.ndarray  # covering radius after each landmark is added
    refine: int
    epsilon: float | None = None
    count: int | None = None
    landmark_distances: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self):
        return int(len(self.landmarks))


def farthest_point_net(s: PLSurface, epsilon: float | None = None, count: int | None = None,
                       refine: int = 0) -> Net:
    """Greedy farthest-point net seeded at vertex 0 (ties: lowest index).

    Exactly one of ``epsilon`` (stop once the covering radius is <= epsilon)
    or ``count`` (stop at that many landmarks) must be given.
    """
    s = _surface(s)
    if (epsilon is None) == (count is None):
        raise ValueError("give exactly one of epsilon or count")
    if epsilon is not None and not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if count is not None:
        if count < 1:
            raise ValueError("count must be >= 1")
        if count > s.n_vertices:
            raise ValueError(f"count {count} exceeds the {s.n_vertices} vertices")
    landmarks = [0]
    rows = [distance_field(s, 0, refine).distances]
    mind = np.array(rows[0])
    history = [float(mind.max())]
    while True:
        radius = history[-1]
        if epsilon is not None and radius <= epsilon:
            break
        if count is not None and len(landmarks) >= count:
            break
        if radius == 0.0:
            break
        nxt = int(np.argmax(mind))
        landmarks.append(nxt)
        rows.append(distance_field(s, nxt, refine).distances)
        mind = np.minimum(mind, rows[-1])
        history.append(float(mind.max()))
    return Net(
        landmarks=np.array(landmarks, dtype=np.int64),
        covering_radius=history[-1],
        radius_history=np.array(history),
        refine=int(refine),
        epsilon=epsilon,
        count=count,
        landmark_distances=np.array(rows),
    )


@dataclass(frozen=True)
class ShortMapReport:
    constant: float
    witness: tuple[int, int]
    n_pairs: int
    refine: int

    @property
    def is_short(self):
        return self.constant < 1.0


def short_map_check(source: PLSurface, target: PLSurface, vertex_map=None, refine: int = 0,
                    source_distances=None, target_distances=None) -> ShortMapReport:
    """Smallest C with d_target(f x, f y) <= C d_source(x, y) over vertex pairs."""
    src = _surface(source)
    tgt = _surface(target)
    vmap = np.arange(src.n_vertices) if vertex_map is None else np.asarray(vertex_map, np.int64)
    if vmap.shape != (src.n_vertices,):
        raise ValueError("vertex map must be total on the source vertices")
    if vmap.min() < 0 or vmap.max() >= tgt.n_vertices:
        raise ValueError("vertex map points outside the target")
    ds = distance_matrix(src, refine=refine) if source_distances is None else source_distances
    if target_distances is None:
        order = np.unique(vmap)
        dt_rows = distance_matrix(tgt, order, refine=refine)
        pos = np.searchsorted(order, vmap)
        dt = dt_rows[pos][:, vmap]
    else:
        dt = target_distances[np.ix_(vmap, vmap)]
    i, j = np.triu_indices(src.n_vertices, 1)
    dsrc = ds[i, j]
    zero = np.nonzero(dsrc <= 0)[0]
    if zero.size:
        a, b = int(i[zero[0]]), int(j[zero[0]])
        raise ValueError(f"distinct source vertices {a}, {b} at zero distance")
    ratio = dt[i, j] / dsrc
    k = int(np.argmax(ratio))
    return ShortMapReport(constant=float(ratio[k]), witness=(int(i[k]), int(j[k])),
                          n_pairs=int(len(ratio)), refine=int(refine))
