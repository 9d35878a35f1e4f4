"""Finite Kuratowski (landmark) embedding into sup-norm coordinate space."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .metric import Net, _surface, distance_matrix

UPPER_SLACK = 1e-12
ALL_PAIRS_LIMIT = 200
DEFAULT_PAIRS = 10_000


def default_seed():
    return int(os.environ.get("PLEMBED_SEED", "0"))


@dataclass(frozen=True)
class LandmarkEmbedding:
    """Coordinates ``coords[p, j] = dist(points[p], landmarks[j])``."""

    landmarks: np.ndarray
    points: np.ndarray
    coords: np.ndarray
    refine: int
    surface: object = field(repr=False, default=None)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self):
        return int(len(self.landmarks))

    def point_distances(self):
        """Intrinsic distances among the embedded points (same refinement)."""
        if "pd" not in self._cache:
            full = distance_matrix(self.surface, self.points, refine=self.refine)
            self._cache["pd"] = full[:, self.points]
        return self._cache["pd"]

    def sup_distance(self, i, j):
        """``||K(x_i) - K(x_j)||_inf`` for row-index arrays ``i`` and ``j``."""
        i = np.ascontiguousarray(i, dtype=np.int64)
        j = np.ascontiguousarray(j, dtype=np.int64)
        return kernels.sup_norm_pairs(np.ascontiguousarray(self.coords), i, j)


def kuratowski_embed(s, net, points=None, refine=None) -> LandmarkEmbedding:
    """Embed ``points`` (default: every vertex) by their distances to the landmarks.

    ``net`` is a :class:`Net` or a plain sequence of landmark vertices.
    """
    s = _surface(s)
    if isinstance(net, Net):
        landmarks = np.asarray(net.landmarks, dtype=np.int64)
        if refine is None:
            refine = net.refine
        rows = net.landmark_distances if refine == net.refine else None
    else:
        landmarks = np.asarray(list(net), dtype=np.int64)
        rows = None
    refine = 0 if refine is None else int(refine)
    if landmarks.size == 0:
        raise ValueError("empty landmark set")
    if len(np.unique(landmarks)) != len(landmarks):
        raise ValueError("landmarks must be distinct")
    if landmarks.min() < 0 or landmarks.max() >= s.n_vertices:
        raise ValueError("landmark outside the surface")
    pts = np.arange(s.n_vertices) if points is None else np.asarray(points, dtype=np.int64)
    if pts.min() < 0 or pts.max() >= s.n_vertices:
        raise ValueError("point outside the surface")
    if rows is None:
        rows = distance_matrix(s, landmarks, refine=refine)
    coords = np.ascontiguousarray(rows[:, pts].T)
    coords.setflags(write=False)
    return LandmarkEmbedding(landmarks=landmarks, points=pts, coords=coords, refine=refine,
                             surface=s)


def verify_isometry_on_landmarks(e: LandmarkEmbedding) -> float:
    """Max ``| ||K(x)-K(y)||_inf - dist(x,y) |`` over landmark pairs."""
    row = {int(p): r for r, p in enumerate(e.points)}
    missing = [int(x) for x in e.landmarks if int(x) not in row]
    if missing:
        raise ValueError(f"landmarks {missing} are not among the embedded points")
    m = len(e.landmarks)
    if m < 2:
        return 0.0
    a, b = np.triu_indices(m, 1)
    ra = np.array([row[int(e.landmarks[k])] for k in a])
    rb = np.array([row[int(e.landmarks[k])] for k in b])
    sup = e.sup_distance(ra, rb)
    # dist(x_a, x_b) read from either landmark's own field
    d_ab = e.coords[ra, b]
    d_ba = e.coords[rb, a]
    return float(max(np.abs(sup - d_ab).max(), np.abs(sup - d_ba).max()))


@dataclass(frozen=True)
class BiLipschitzReport:
    min_ratio: float
    max_ratio: float
    witness_min: tuple[int, int]
    witness_max: tuple[int, int]
    n_pairs: int
    skipped: int
    refine: int

    @property
    def constant(self):
        """C with (1 - C) dist <= ||K(x) - K(y)||_inf on the sample."""
        return 1.0 - self.min_ratio

    @property
    def upper_bound_holds(self):
        return self.max_ratio <= 1.0 + UPPER_SLACK


def sample_pairs(n_points, n_pairs=DEFAULT_PAIRS, seed=None):
    """All pairs when ``n_points <= 200``, else a seeded uniform sample."""
    if n_points <= ALL_PAIRS_LIMIT:
        i, j = np.triu_indices(n_points, 1)
        return np.column_stack([i, j])
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    i = rng.integers(0, n_points, size=n_pairs)
    j = rng.integers(0, n_points - 1, size=n_pairs)
    j = j + (j >= i)  # distinct without rejection
    return np.column_stack([i, j])


def verify_bilipschitz(e: LandmarkEmbedding, pairs=None, n_pairs=DEFAULT_PAIRS, seed=None,
                       distances=None) -> BiLipschitzReport:
    """Min/max of ``||K(x)-K(y)||_inf / dist(x,y)`` over row-index pairs.

    Coincident pairs (zero distance) are skipped and counted.
    """
    if pairs is None:
        pairs = sample_pairs(len(e.points), n_pairs, seed)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    d_all = e.point_distances() if distances is None else distances
    d = d_all[pairs[:, 0], pairs[:, 1]]
    keep = d > 0
    skipped = int((~keep).sum())
    pairs = pairs[keep]
    d = d[keep]
    if not len(pairs):
        raise ValueError("no non-coincident pairs to check")
    ratio = e.sup_distance(pairs[:, 0], pairs[:, 1]) / d
    lo = int(np.argmin(ratio))
    hi = int(np.argmax(ratio))

    def wit(k):
        return (int(e.points[pairs[k, 0]]), int(e.points[pairs[k, 1]]))

    return BiLipschitzReport(
        min_ratio=float(ratio[lo]),
        max_ratio=float(ratio[hi]),
        witness_min=wit(lo),
        witness_max=wit(hi),
        n_pairs=int(len(pairs)),
        skipped=skipped,
        refine=e.refine,
    )
