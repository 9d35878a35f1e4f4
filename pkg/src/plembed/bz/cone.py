"""Cone-vertex flattening by the standard conformal map, and its relatives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from ..mesh import PLSurface, ValidationError, build_pl_surface, total_vertex_angle
from ..metric import _surface
from ..qc import folding_map_dilatation, pointwise_dilatation, wedge_coefficients

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ConeFlatteningMap:
    """``psi = (lam/theta) phi``, ``r = a rho**(lam/theta)`` on cone-polar coordinates."""

    theta: float
    lam: float = TWO_PI
    a: float = 1.0

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("cone angle must be positive")
        if not (self.lam > 0 and self.a > 0):
            raise ValueError("target angle and scale must be positive")

    @property
    def exponent(self):
        return self.lam / self.theta

    def polar(self, rho, phi):
        rho = np.asarray(rho, dtype=float)
        return self.a * rho ** self.exponent, self.exponent * np.asarray(phi, dtype=float)

    def cartesian(self, pts):
        """Planar form ``z -> a z**(lam/theta)`` on an (m, 2) array (theta <= 2 pi)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rho = np.hypot(pts[:, 0], pts[:, 1])
        phi = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), TWO_PI)
        r, psi = self.polar(rho, phi)
        return np.column_stack([r * np.cos(psi), r * np.sin(psi)])


@dataclass(frozen=True)
class ConeLayout:
    vertex: int
    theta: float
    link: np.ndarray        # link vertices in cyclic order, first repeated at the end
    rho: np.ndarray         # distances to the link vertices
    phi: np.ndarray         # cumulative cone angle of each ray, phi[0] = 0, phi[-1] = theta
    r: np.ndarray
    psi: np.ndarray
    coords: np.ndarray      # planar image of the link vertices (apex at the origin)

    @property
    def image_angle_sum(self):
        """Sum of the angles between consecutive image rays, measured from coordinates."""
        c = self.coords
        a, b = c[:-1], c[1:]
        ang = np.arctan2(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0], np.einsum("ij,ij->i", a, b))
        return float(np.mod(ang, TWO_PI).sum())

    @property
    def closes(self):
        return bool(np.allclose(self.coords[0], self.coords[-1], atol=1e-9))


def _ordered_link(s: PLSurface, v: int):
    """Faces around ``v`` in cyclic order, as (face, start, end) link steps."""
    steps = []
    for f, tri in enumerate(s.faces):
        hits = np.nonzero(tri == v)[0]
        if hits.size:
            k = int(hits[0])
            steps.append((f, int(tri[(k + 1) % 3]), int(tri[(k + 2) % 3]), k))
    if not steps:
        raise ValidationError(f"vertex {v} is isolated", v)
    if s.boundary_vertex_mask()[v]:
        raise ValidationError(f"star of vertex {v} is not a disk (boundary vertex)", v)
    adj = {}
    for f, p, q, k in steps:
        adj.setdefault(p, []).append((q, f, k))
        adj.setdefault(q, []).append((p, f, k))
    if any(len(x) != 2 for x in adj.values()):
        raise ValidationError(f"star of vertex {v} is not a disk", v)
    start = steps[0][1]
    order = [start]
    faces = []
    prev_face = None
    cur = start
    # walk around the link cycle, preferring the face orientation for the first step
    first = [(steps[0][2], steps[0][0], steps[0][3])]
    while True:
        options = first if prev_face is None else [x for x in adj[cur] if x[1] != prev_face]
        nxt, f, k = options[0]
        faces.append((f, k))
        prev_face = f
        cur = nxt
        order.append(cur)
        if cur == start:
            break
        if len(order) > len(steps) + 1:
            raise ValidationError(f"star of vertex {v} is not a disk", v)
    if len(faces) != len(steps):
        raise ValidationError(f"star of vertex {v} is not a disk (link has several cycles)", v)
    return np.array(order, dtype=np.int64), faces


def flatten_cone_vertex(s, v: int, lam: float = TWO_PI, a: float = 1.0) -> ConeLayout:
    """Planar layout of the star of ``v`` under the standard conformal map."""
    s = _surface(s)
    v = int(v)
    theta = total_vertex_angle(s, v)
    if not theta > 0:
        raise ValidationError(f"vertex {v} has zero total angle", v)
    link, faces = _ordered_link(s, v)
    ang = s.corner_angles()
    phi = np.concatenate([[0.0], np.cumsum([ang[f, k] for f, k in faces])])
    rho = np.array([s.length(v, w) for w in link])
    cmap = ConeFlatteningMap(theta, lam, a)
    r, psi = cmap.polar(rho, phi)
    # phi[-1] equals theta up to summation order; pin the closing ray exactly
    psi[-1] = lam
    coords = np.column_stack([r * np.cos(psi), r * np.sin(psi)])
    return ConeLayout(vertex=v, theta=theta, link=link, rho=rho, phi=phi, r=r, psi=psi,
                      coords=coords)


def regular_star(theta, n=6, radius=1.0):
    """Disk of ``n`` isosceles triangles with apex angle ``theta/n`` (apex = vertex 0)."""
    if n < 3:
        raise ValueError("a star needs at least 3 triangles")
    if not 0 < theta / n < np.pi:
        raise ValueError("apex angle theta/n must lie in (0, pi)")
    base = 2.0 * radius * np.sin(theta / (2 * n))
    lengths = {}
    faces = []
    for i in range(n):
        p, q = 1 + i, 1 + (i + 1) % n
        faces.append([0, p, q])
        lengths[(0, p)] = radius
        lengths[(p, q)] = base
    return build_pl_surface(lengths, faces)


def hexagon_flattening(theta, radius=1.0, a=1.0):
    """Flatten a vertex of total angle ``theta`` encircled by a 6-triangle star."""
    return flatten_cone_vertex(regular_star(theta, 6, radius), 0, TWO_PI, a)


def conformality_samples(theta, n_samples=100, seed=0, rho_range=(0.25, 2.0), margin=0.02):
    u = qmc.Halton(d=2, seed=seed).random(n_samples)
    rho = rho_range[0] + (rho_range[1] - rho_range[0]) * u[:, 0]
    phi = theta * (margin + (1 - 2 * margin) * u[:, 1])
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi)])


def planar_conformality_check(theta, lam=TWO_PI, a=1.0, samples=100, seed=0):
    """Max sampled dilatation of the planar standard conformal map (expected 1).

    ``samples`` is a count of quasi-random sector points or an (m, 2) array.
    """
    if not 0 < theta <= TWO_PI:
        raise ValueError("planar check needs a sector angle in (0, 2*pi]")
    cmap = ConeFlatteningMap(theta, lam, a)
    pts = conformality_samples(theta, samples, seed) if np.isscalar(samples) else np.asarray(samples, float)
    if np.any(np.hypot(pts[:, 0], pts[:, 1]) == 0):
        raise ValueError("sample at the apex, where the map is not differentiable")
    return max(pointwise_dilatation(cmap.cartesian, x).K for x in pts)


def conformality_contrast(theta, lam=TWO_PI, a=1.0, samples=100, seed=0, dim=3):
    """Planar max K next to the dimension-``dim`` folding with the same angle ratio."""
    planar = planar_conformality_check(theta, lam, a, samples, seed)
    lo, hi = min(theta, lam), max(theta, lam)
    fold = folding_map_dilatation(lo, hi, dim)
    coeff = wedge_coefficients(lo, dim) if lo <= np.pi else None
    return {
        "planar_max_K": planar,
        "folding_K_I": fold.K_I,
        "folding_K": fold.K,
        "wedge_K": None if coeff is None else coeff.K,
    }


@dataclass(frozen=True)
class ContractionAnnulusMap:
    """Radially isometric contraction inside ``r1``, standard conformal map on ``r1 < rho < r2``."""

    theta: float
    r1: float
    r2: float

    def __post_init__(self):
        if not 0 < self.r1 < self.r2:
            raise ValueError("need 0 < r1 < r2")
        if self.theta < TWO_PI:
            raise ValueError("contraction map needs total angle theta >= 2*pi")

    @property
    def factor(self):
        return TWO_PI / self.theta

    @property
    def scale(self):
        # continuity at r1: a * r1**factor == r1
        return self.r1 ** (1.0 - self.factor)

    def polar(self, rho, phi):
        rho = np.asarray(rho, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if np.any(rho < 0) or np.any(rho > self.r2):
            raise ValueError("point outside the disk of radius r2")
        c = self.factor
        r = np.where(rho <= self.r1, rho, self.scale * rho ** c)
        return r, c * phi

    def __call__(self, rho, phi):
        r, psi = self.polar(rho, phi)
        return np.stack([r * np.cos(psi), r * np.sin(psi)], axis=-1)


def contraction_annulus_map(theta, r1, r2) -> ContractionAnnulusMap:
    return ContractionAnnulusMap(float(theta), float(r1), float(r2))
