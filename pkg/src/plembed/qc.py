"""Quasiconformal dilatations of maps and coefficients of wedge-type domains.

All dilatations are normalised to be >= 1.  Map dilatations come from the
singular values of the Jacobian: with ``J = det f'`` and
``s_1 >= ... >= s_n``, ``K_O = s_1**n / J`` and ``K_I = J / s_n**n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import qmc

from .curvature import dihedral_data
from .mesh import ValidationError

KINDS = ("pointwise-numeric", "closed-form-map", "coefficient-of-domain", "lower-bound")
TWO_PI = 2.0 * np.pi


class DilatationError(ValueError):
    pass


@dataclass(frozen=True)
class DilatationReport:
    K_I: float
    K_O: float
    K: float
    kind: str
    dim: int
    # True when K_O is only known as a lower bound for the domain
    K_O_is_bound: bool = False
    singular_values: tuple | None = None
    jacobian: float | None = None
    witness_edge: int | None = None

    def inequality_gaps(self):
        """Relative slack of ``K_I <= K_O**(n-1)`` and ``K_O <= K_I**(n-1)``; both <= 0 when they hold."""
        n = self.dim
        a = (self.K_I - self.K_O ** (n - 1)) / self.K_I
        b = (self.K_O - self.K_I ** (n - 1)) / self.K_O
        return a, b

    def satisfies_inequalities(self, rtol=1e-9):
        a, b = self.inequality_gaps()
        return a <= rtol and b <= rtol


# ---------------------------------------------------------------------------
# pointwise dilatation from a numeric Jacobian


def numeric_jacobian(f, x, h=None):
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if h is None:
        scale = np.linalg.norm(x)
        h = 1e-5 * (scale if scale > 0 else 1.0)
    pts = np.concatenate([x + h * np.eye(n), x - h * np.eye(n)])
    vals = np.asarray(f(pts), dtype=float)
    return ((vals[:n] - vals[n:]) / (2.0 * h)).T


def dilatation_from_jacobian(jac, kind="pointwise-numeric", where=None) -> DilatationReport:
    jac = np.asarray(jac, dtype=float)
    n = jac.shape[0]
    det = float(np.linalg.det(jac))
    if not det > 0:
        at = "" if where is None else f" at {np.asarray(where).tolist()}"
        raise DilatationError(f"Jacobian determinant {det:.3e} is not positive{at}")
    sv = np.linalg.svd(jac, compute_uv=False)
    J = float(np.prod(sv))
    k_o = max(float(sv[0] ** n / J), 1.0)
    k_i = max(float(J / sv[-1] ** n), 1.0)
    return DilatationReport(K_I=k_i, K_O=k_o, K=max(k_i, k_o), kind=kind, dim=n,
                            singular_values=tuple(float(s) for s in sv), jacobian=J)


def pointwise_dilatation(f, x, h=None) -> DilatationReport:
    """Dilatations of ``f`` at ``x`` by central differences.

    ``f`` maps an (m, n) array of points to an (m, n) array of images.
    """
    return dilatation_from_jacobian(numeric_jacobian(f, x, h), where=x)


# ---------------------------------------------------------------------------
# foldings between wedges


def _angle(x):
    return np.mod(np.arctan2(x[:, 1], x[:, 0]), TWO_PI)


@dataclass(frozen=True)
class FoldingMap:
    """``(r, phi, z) -> (r, (beta/alpha) phi, z)`` from the alpha-wedge onto the beta-wedge."""

    alpha: float
    beta: float
    dim: int

    def __post_init__(self):
        if not (0 < self.alpha <= TWO_PI and 0 < self.beta <= TWO_PI):
            raise DilatationError("wedge angles must lie in (0, 2*pi]")
        if self.dim < 2:
            raise DilatationError("dimension must be >= 2")

    @property
    def ratio(self):
        return self.beta / self.alpha

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        r = np.hypot(pts[:, 0], pts[:, 1])
        phi = _angle(pts) * self.ratio
        out = pts.copy()
        out[:, 0] = r * np.cos(phi)
        out[:, 1] = r * np.sin(phi)
        return out

    def analytic_jacobian(self, x):
        """Jacobian in Cartesian coordinates (for the numeric-vs-exact tests)."""
        x = np.asarray(x, dtype=float)
        r = np.hypot(x[0], x[1])
        phi = np.mod(np.arctan2(x[1], x[0]), TWO_PI)
        c = self.ratio
        psi = c * phi
        # columns: d/dr, (1/r) d/dphi in the source frame
        er, ep = np.array([np.cos(phi), np.sin(phi)]), np.array([-np.sin(phi), np.cos(phi)])
        fr, fp = np.array([np.cos(psi), np.sin(psi)]), np.array([-np.sin(psi), np.cos(psi)])
        j2 = np.outer(fr, er) + c * np.outer(fp, ep)
        jac = np.eye(self.dim)
        jac[:2, :2] = j2
        return jac

    def sample_points(self, n_points=100, seed=0, r_range=(0.5, 2.0), margin=0.05):
        """Quasi-random interior points of the source wedge."""
        d = self.dim
        u = qmc.Halton(d=max(d, 2), seed=seed).random(n_points)
        r = r_range[0] + (r_range[1] - r_range[0]) * u[:, 0]
        phi = self.alpha * (margin + (1 - 2 * margin) * u[:, 1])
        pts = np.zeros((n_points, d))
        pts[:, 0] = r * np.cos(phi)
        pts[:, 1] = r * np.sin(phi)
        if d > 2:
            pts[:, 2:] = 2.0 * u[:, 2:d] - 1.0
        return pts


def folding_map_dilatation(alpha, beta, n) -> DilatationReport:
    """Closed form for the folding: ``K_I = c``, ``K_O = K = c**(n-1)``, ``c = beta/alpha``."""
    if alpha > beta:
        raise DilatationError("folding needs alpha <= beta; use the inverse map otherwise")
    fmap = FoldingMap(alpha, beta, n)
    c = fmap.ratio
    return DilatationReport(K_I=c, K_O=c ** (n - 1), K=c ** (n - 1), kind="closed-form-map",
                            dim=n, singular_values=(c,) + (1.0,) * (n - 1), jacobian=c)


def folding_numeric_agreement(alpha, beta, n, n_points=100, seed=0):
    """Max relative deviation between the closed form and sampled numeric dilatations."""
    exact = folding_map_dilatation(alpha, beta, n)
    fmap = FoldingMap(alpha, beta, n)
    worst = 0.0
    reports = []
    for x in fmap.sample_points(n_points, seed):
        rep = pointwise_dilatation(fmap, x)
        reports.append(rep)
        for a, b in ((rep.K_I, exact.K_I), (rep.K_O, exact.K_O), (rep.K, exact.K)):
            worst = max(worst, abs(a - b) / b)
    return worst, reports


# ---------------------------------------------------------------------------
# domain coefficients


def wedge_coefficients(alpha, n) -> DilatationReport:
    """Coefficients of the convex wedge of angle ``alpha`` in R^n."""
    if not 0 < alpha <= TWO_PI:
        raise DilatationError("wedge angle must lie in (0, 2*pi]")
    if n < 2:
        raise DilatationError("dimension must be >= 2")
    if alpha > np.pi:
        raise DilatationError("coefficient unknown for non-convex wedge (alpha > pi)")
    k = np.pi / alpha
    return DilatationReport(K_I=k, K_O=k ** (1.0 / (n - 1)), K=k, kind="coefficient-of-domain",
                            dim=n, K_O_is_bound=True)


def dihedral_wedge_coefficients(angles, n) -> DilatationReport:
    """Coefficients of the dihedral wedge with ``q = len(angles)`` angular coordinates."""
    angles = [float(a) for a in np.atleast_1d(angles)]
    q = len(angles)
    if not 1 <= q <= n - 1:
        raise DilatationError(f"need 1 <= number of angles <= n - 1, got {q} for n = {n}")
    if not 0 < angles[0] <= TWO_PI or any(not 0 < a <= np.pi for a in angles[1:]):
        raise DilatationError("angles out of range: first in (0, 2*pi], others in (0, pi]")
    if any(a > np.pi for a in angles):
        raise DilatationError("coefficient unknown for non-convex dihedral wedge (angle > pi)")
    k = float(np.prod([np.pi / a for a in angles]))
    return DilatationReport(K_I=k, K_O=k ** (1.0 / (n - 1)), K=k, kind="coefficient-of-domain",
                            dim=n, K_O_is_bound=True)


def convex_polyhedron_bound(m, n) -> DilatationReport:
    """Lower bounds for a convex polyhedral domain in R^n with ``m`` faces."""
    m, n = int(m), int(n)
    if n < 2:
        raise DilatationError("dimension must be >= 2")
    if m <= n:
        raise DilatationError(f"a bounded convex polyhedron in R^{n} needs more than {n} faces")
    k = float(Fraction(m - n + 2, m - n))
    return DilatationReport(K_I=k, K_O=k ** (1.0 / (n - 1)), K=k, kind="lower-bound", dim=n,
                            K_O_is_bound=True)


REFLEX_TOL = 1e-9


def polyhedron_dihedral_bound(mesh, n=3) -> DilatationReport:
    """``K >= pi / alpha_min`` from the smallest interior dihedral of a convex mesh."""
    if not mesh.surface.is_closed:
        raise ValidationError("polyhedron bound needs a closed mesh")
    dih = dihedral_data(mesh).dihedral
    reflex = np.nonzero(dih > np.pi + REFLEX_TOL)[0]
    if reflex.size:
        e = int(reflex[0])
        raise DilatationError(f"mesh is not convex: edge {e} has reflex dihedral {dih[e]!r}")
    e = int(np.nanargmin(dih))
    w = wedge_coefficients(float(dih[e]), n)
    return DilatationReport(K_I=w.K_I, K_O=w.K_O, K=w.K, kind="lower-bound", dim=n,
                            K_O_is_bound=True, witness_edge=e)
