"""Pleated folding of a large acute triangle into the right prism over a smaller one.

The triangle ``T`` is cut into a fan of flat pieces around its circumcenter
``B``: level 0 uses the rays to the vertices and edge midpoints (six pieces),
each further level bisects every piece.  Pieces are chained from piece 0 by
rotations about the shared creases, so every piece is placed rigidly and the
material stays isometric whatever the fold angles are.  A Levenberg-Marquardt
loop then adjusts the fold angles and the global placement so that

* ``A_i`` lands on ``a_i`` (and the closing copy of ``A_1`` too),
* ``B`` lands on the vertical line through the circumcenter ``b`` of ``t``,
  at distance ``R`` from every ``a_i``,
* the boundary of ``T`` lies on the lateral faces of the prism.

The lateral-face term is the mean squared distance of each boundary side to
its face, integrated along the side.  A level-``k`` fold is also a level
``k + 1`` fold with the new creases left flat and the same objective, so the
optimum cannot get worse under refinement.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..mesh import EmbeddedMesh, ValidationError, embedded_mesh

MAX_ITER = 500
TOL = 1e-10
SIMILARITY_TOL = 1e-12
PERTURBATION = 1e-3


class FoldInputError(ValidationError):
    pass


def _angles(sides):
    s1, s2, s3 = sides
    a1 = np.arccos(np.clip((s2 * s2 + s3 * s3 - s1 * s1) / (2 * s2 * s3), -1, 1))
    a2 = np.arccos(np.clip((s1 * s1 + s3 * s3 - s2 * s2) / (2 * s1 * s3), -1, 1))
    return np.array([a1, a2, np.pi - a1 - a2])


def _is_acute(sides):
    s = np.sort(np.asarray(sides, float))
    return bool(s[0] + s[1] > s[2] and s[0] ** 2 + s[1] ** 2 > s[2] ** 2)


def triangle_vertices(sides):
    """Planar vertices with ``|A_k A_l| = s_p`` opposite ``A_p``, circumcenter at the origin."""
    s1, s2, s3 = (float(x) for x in sides)
    a1 = _angles(sides)[0]
    p = np.array([[0.0, 0.0], [s3, 0.0], [s2 * np.cos(a1), s2 * np.sin(a1)]])
    # circumcenter of p0 = origin, p1 on the x-axis
    d = 2 * (p[1, 0] * p[2, 1] - p[1, 1] * p[2, 0])
    b1 = p[1] @ p[1]
    b2 = p[2] @ p[2]
    c = np.array([(p[2, 1] * b1 - p[1, 1] * b2) / d, (p[1, 0] * b2 - p[2, 0] * b1) / d])
    return p - c


@dataclass(frozen=True)
class BasicConstructionInput:
    """Big triangle ``T`` and similar smaller triangle ``t`` (sides opposite vertices 1..3)."""

    big: tuple
    small: tuple
    alpha_min: float | None = None
    shrink: float | None = None

    def __post_init__(self):
        big = tuple(float(x) for x in self.big)
        small = tuple(float(x) for x in self.small)
        object.__setattr__(self, "big", big)
        object.__setattr__(self, "small", small)
        if len(big) != 3 or len(small) != 3:
            raise FoldInputError("triangles need three side lengths")
        if min(big) <= 0 or min(small) <= 0 or not np.all(np.isfinite(big + small)):
            raise FoldInputError("side lengths must be positive and finite")
        for name, s in (("big", big), ("small", small)):
            if not _is_acute(s):
                raise FoldInputError(f"{name} triangle {s} is not acute")
        ratios = np.array(small) / np.array(big)
        if np.ptp(ratios) > SIMILARITY_TOL * ratios.max():
            raise FoldInputError(f"triangles are not similar (side ratios {ratios.tolist()})")
        if ratios.max() > 1.0:
            raise FoldInputError("the small triangle must not exceed the big one")
        if self.alpha_min is not None:
            ang = _angles(big)
            if not np.all(ang > self.alpha_min):
                raise FoldInputError(f"an angle of T is not above alpha_min = {self.alpha_min}")
        if self.shrink is not None:
            if not 0 < self.shrink < 1:
                raise FoldInputError("shrink bound C must lie in (0, 1)")
            if not np.all(self.shrink * np.array(big) > np.array(small)):
                raise FoldInputError("C * |A_k A_l| > |a_k a_l| fails for some side")

    @classmethod
    def from_ratio(cls, big, small_first, **kw):
        """``small_first`` is the side of ``t`` matching the first side of ``T``."""
        big = tuple(float(x) for x in big)
        q = float(small_first) / big[0]
        return cls(big, tuple(q * x for x in big), **kw)

    @property
    def ratio(self):
        return self.small[0] / self.big[0]

    @property
    def big_vertices(self):
        return triangle_vertices(self.big)

    @property
    def small_vertices(self):
        return self.ratio * self.big_vertices

    @property
    def circumradius(self):
        return float(np.linalg.norm(self.big_vertices[0]))

    @property
    def small_circumradius(self):
        return self.ratio * self.circumradius

    @property
    def apex_height(self):
        """Height of ``B'`` above ``b``: ``sqrt(R**2 - r**2)``."""
        R = self.circumradius
        return float(R * np.sqrt(max(1.0 - self.ratio ** 2, 0.0)))


@dataclass(frozen=True)
class CreasePattern:
    """Fan of ``N = 6 * 2**level`` pieces ``(B, P_i, P_{i+1})`` around the circumcenter.

    ``boundary`` holds ``P_0..P_{N-1}`` (``P_0 = A_1``) in material coordinates
    with ``B`` at the origin.  Crease ``i`` (``1 <= i < N``) is ``B P_i``; the
    ray ``B P_0`` is the closing seam.
    """

    level: int
    boundary: np.ndarray
    side: np.ndarray           # side index p (0-based, opposite vertex p) of segment P_i P_{i+1}
    corner_index: np.ndarray   # positions of A_1, A_2, A_3 in the boundary

    @property
    def n_pieces(self):
        return int(len(self.boundary))

    @property
    def n_creases(self):
        return self.n_pieces - 1

    def faces(self):
        n = self.n_pieces
        i = np.arange(n)
        return np.column_stack([np.zeros(n, np.int64), 1 + i, 1 + (i + 1) % n])

    def pieces(self):
        """Material triangles (N, 3, 2)."""
        b = self.boundary
        n = len(b)
        return np.stack([np.zeros((n, 2)), b, b[(np.arange(n) + 1) % n]], axis=1)


def crease_pattern(inp: BasicConstructionInput, level: int) -> CreasePattern:
    level = int(level)
    if level < 0:
        raise ValueError("pattern level must be >= 0")
    A = inp.big_vertices
    per_side = 2 ** (level + 1)
    pts, side, corners = [], [], []
    # sides in boundary order: A1A2 (opposite A3), A2A3 (opposite A1), A3A1 (opposite A2)
    for k, (u, v, p) in enumerate(((0, 1, 2), (1, 2, 0), (2, 0, 1))):
        corners.append(len(pts))
        t = np.arange(per_side) / per_side
        pts.extend(A[u] + t[:, None] * (A[v] - A[u]))
        side.extend([p] * per_side)
    return CreasePattern(level=level, boundary=np.array(pts), side=np.array(side, np.int64),
                         corner_index=np.array(corners, np.int64))


@dataclass(frozen=True)
class FoldLevelResult:
    level: int
    constraint_residual: float
    max_constraint_error: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class PleatedSurface:
    mesh: EmbeddedMesh
    pattern: CreasePattern
    fold_angles: np.ndarray        # pi - rotation about each crease (pi = flat)
    constraint_residual: float     # L2 norm of the weighted constraint vector
    max_constraint_error: float
    isometry_residual: float
    seam_gap: float
    prism_height: float
    apex_height: float
    iterations: int
    feasible: bool
    tolerance: float
    face_rotations: np.ndarray
    history: tuple = field(default_factory=tuple)

    @property
    def residuals_by_level(self):
        return [h.constraint_residual for h in self.history]


def _skew(v):
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def _rotvec(w):
    th = float(np.linalg.norm(w))
    if th == 0.0:
        return np.eye(3)
    k = _skew(w / th)
    return np.eye(3) + np.sin(th) * k + (1 - np.cos(th)) * (k @ k)


class _Problem:
    """Residual and Jacobian for one crease pattern.

    Unknowns: crease rotations (N-1), then translation (3), then optional
    face-rotation parameters (3).  The global rotation is kept as a matrix
    and updated multiplicatively; its three Jacobian columns sit between the
    crease block and the translation.
    """

    def __init__(self, inp: BasicConstructionInput, pat: CreasePattern, face_rot_max=0.0):
        self.inp = inp
        self.pat = pat
        self.omega_max = float(face_rot_max)
        n = pat.n_pieces
        self.n = n
        b3 = np.column_stack([pat.boundary, np.zeros(n)])
        self.P = b3
        self.axes = np.ascontiguousarray(b3[1:] / np.linalg.norm(b3[1:], axis=1)[:, None])
        self.targets = np.column_stack([inp.small_vertices, np.zeros(3)])
        self.R = inp.circumradius
        a = self.targets
        self.normals = np.zeros((3, 3))
        self.anchor = np.zeros((3, 3))
        for p in range(3):
            u, v = a[(p + 1) % 3], a[(p + 2) % 3]
            d = v - u
            nrm = np.array([d[1], -d[0], 0.0]) / np.hypot(d[0], d[1])
            if nrm @ (u - a[p]) < 0:
                nrm = -nrm
            self.normals[p] = nrm
            self.anchor[p] = u
        seg = np.linalg.norm(np.roll(b3, -1, axis=0) - b3, axis=1)
        side_len = np.array(inp.big)
        self.seg_w = np.sqrt(seg / (3.0 * side_len[pat.side]))
        self.n_face = 3 if self.omega_max > 0 else 0
        self.n_params = (n - 1) + 3 + 3 + self.n_face

    # -- state helpers -------------------------------------------------------

    def chain(self, delta):
        rots = kernels.chain_rotations(self.axes, np.ascontiguousarray(delta, dtype=float))
        return np.concatenate([np.eye(3)[None], rots])  # C_0 .. C_{N-1}

    def positions(self, delta, Q, t):
        """Placed boundary points X_0..X_{N} (X_N is the closing copy of P_0)."""
        C = self.chain(delta)
        y = np.einsum("nij,nj->ni", C, self.P)
        y = np.vstack([y, C[-1] @ self.P[0]])
        return y, y @ Q.T + t, C

    def face_normals(self, u):
        if not self.n_face:
            return self.normals, np.zeros((3, 3))
        om = self.omega_max * np.tanh(u)
        dom = self.omega_max * (1 - np.tanh(u) ** 2)
        z = np.array([0.0, 0.0, 1.0])
        nrm = np.cos(om)[:, None] * self.normals + np.sin(om)[:, None] * z
        dn = (-np.sin(om)[:, None] * self.normals + np.cos(om)[:, None] * z) * dom[:, None]
        return nrm, dn

    # -- residual -------------------------------------------------------------

    def residual(self, delta, Q, t, u, want_jac=False):
        n = self.n
        y, X, C = self.positions(delta, Q, t)
        ci = self.pat.corner_index
        rows = []
        rows.append((X[ci] - self.targets).ravel())
        rows.append(X[n] - self.targets[0])
        b = np.zeros(3)
        rows.append(t[:2] - b[:2])
        dist = np.linalg.norm(t - self.targets, axis=1)
        rows.append(dist - self.R)
        nrm, dn = self.face_normals(u)
        side = self.pat.side
        d = np.einsum("ij,ij->i", X[:n] - self.anchor[side], nrm[side])
        d_next = np.einsum("ij,ij->i", X[1:] - self.anchor[side], nrm[side])
        w = self.seg_w
        rows.append(w * (d + 0.5 * d_next))
        rows.append(w * (0.5 * np.sqrt(3.0)) * d_next)
        r = np.concatenate(rows)
        if not want_jac:
            return r
        return r, self._jacobian(y, X, C, Q, t, nrm, dn, dist)

    def _jacobian(self, y, X, C, Q, t, nrm, dn, dist):
        n = self.n
        m = n - 1
        # dX_i / d(params) as (N+1, 3, n_params)
        wvec = np.ascontiguousarray(np.einsum("nij,nj->ni", C[1:], self.axes))
        depth = np.concatenate([np.arange(n), [n - 1]]).astype(np.int64)
        jc = kernels.chain_jacobian(wvec, np.ascontiguousarray(y), depth)  # (N+1, 3, m)
        dX = np.zeros((n + 1, 3, self.n_params))
        dX[:, :, :m] = np.einsum("ij,pjk->pik", Q, jc)
        Qy = y @ Q.T
        # d(Qy)/d(omega) for Q <- exp(omega) Q is omega x (Qy) = -[Qy]x omega
        dX[:, :, m:m + 3] = -np.array([_skew(v) for v in Qy])
        dX[:, :, m + 3:m + 6] = np.eye(3)
        ci = self.pat.corner_index
        blocks = [dX[ci].reshape(9, -1), dX[n]]
        jb = np.zeros((2, self.n_params))
        jb[0, m + 3] = jb[1, m + 4] = 1.0
        blocks.append(jb)
        jd = np.zeros((3, self.n_params))
        jd[:, m + 3:m + 6] = (t - self.targets) / dist[:, None]
        blocks.append(jd)
        side = self.pat.side
        npick = nrm[side]
        dd = np.einsum("ij,ijk->ik", npick, dX[:n])
        dd_next = np.einsum("ij,ijk->ik", npick, dX[1:])
        if self.n_face:
            base = m + 6
            dd[np.arange(n), base + side] += np.einsum("ij,ij->i", X[:n] - self.anchor[side], dn[side])
            dd_next[np.arange(n), base + side] += np.einsum("ij,ij->i", X[1:] - self.anchor[side],
                                                            dn[side])
        w = self.seg_w[:, None]
        blocks.append(w * (dd + 0.5 * dd_next))
        blocks.append(w * (0.5 * np.sqrt(3.0)) * dd_next)
        return np.vstack(blocks)

    # -- state packing ----------------------------------------------------------

    def flat_state(self):
        h = self.inp.apex_height
        return np.zeros(self.n - 1), np.eye(3), np.array([0.0, 0.0, h]), np.zeros(self.n_face)

    def step(self, state, dx):
        delta, Q, t, u = state
        m = self.n - 1
        return (delta + dx[:m], _rotvec(dx[m:m + 3]) @ Q, t + dx[m + 3:m + 6],
                u + dx[m + 6:] if self.n_face else u)


def _levenberg_marquardt(prob: _Problem, state, max_iter=MAX_ITER, tol=TOL):
    r, J = prob.residual(*state, want_jac=True)
    cost = float(r @ r)
    lam = 1e-3
    it = 0
    stall = 0
    while it < max_iter:
        if np.sqrt(cost) <= tol:
            break
        it += 1
        g = J.T @ r
        if np.max(np.abs(g)) <= 1e-15:
            break
        H = J.T @ J
        diag = np.maximum(np.diag(H), 1e-12)
        improved = False
        while lam < 1e16:
            try:
                dx = np.linalg.solve(H + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            cand = prob.step(state, dx)
            rc = prob.residual(*cand)
            cc = float(rc @ rc)
            if cc < cost:
                rel = (cost - cc) / cost
                state, cost = cand, cc
                r, J = prob.residual(*state, want_jac=True)
                lam = max(lam / 3.0, 1e-12)
                improved = True
                stall = stall + 1 if rel < 1e-12 else 0
                break
            lam *= 4.0
        if not improved or stall >= 5:
            break
    return state, r, it


def _isometry_residual(prob: _Problem, state):
    """Max edge-length change over the rigidly placed pieces (round-off only)."""
    delta, Q, t, _ = state
    C = prob.chain(delta)
    n = prob.n
    nxt = (np.arange(n) + 1) % n
    p0 = prob.P
    p1 = p0[nxt]
    # piece i uses C_i for both boundary corners, B at the origin
    x0 = np.einsum("nij,nj->ni", C, p0) @ Q.T + t
    x1 = np.einsum("nij,nj->ni", C, p1) @ Q.T + t
    err = [np.abs(np.linalg.norm(x0 - t, axis=1) - np.linalg.norm(p0, axis=1)),
           np.abs(np.linalg.norm(x1 - t, axis=1) - np.linalg.norm(p1, axis=1)),
           np.abs(np.linalg.norm(x1 - x0, axis=1) - np.linalg.norm(p1 - p0, axis=1))]
    return float(max(e.max() for e in err))


def _refine_state(state, n_old):
    """Level-k fold angles seen as a level-(k+1) fold with flat new creases."""
    delta, Q, t, u = state
    new = np.zeros(2 * n_old - 1)
    new[1::2] = delta  # old crease i becomes crease 2i
    return new, Q, t, u


def _solve_level(inp, level, face_rot_max, seed, warm=None):
    pat = crease_pattern(inp, level)
    prob = _Problem(inp, pat, face_rot_max)
    if warm is None:
        flat = prob.flat_state()
        rng = np.random.default_rng(seed)
        delta = flat[0] + PERTURBATION * rng.standard_normal(flat[0].shape)
        state, r, it = _levenberg_marquardt(prob, (delta,) + flat[1:])
        # the unperturbed flat state is exact when T = t
        s2, r2, it2 = _levenberg_marquardt(prob, flat)
        if r2 @ r2 <= r @ r:
            state, r = s2, r2
        return prob, state, r, it + it2
    state, r, it = _levenberg_marquardt(prob, warm)
    r0 = prob.residual(*warm)
    if r0 @ r0 < r @ r:
        state, r = warm, r0
    return prob, state, r, it


def fold_basic_construction(inp: BasicConstructionInput, level: int = 0, face_rot_max: float = 0.0,
                            seed: int = 0, tol: float = TOL) -> PleatedSurface:
    """Fold ``T`` into the prism over ``t`` with the level-``level`` crease pattern.

    Levels ``0..level`` are solved in turn, each warm-started from the one
    before.  The result is flagged infeasible when the constraint residual
    stays above ``tol``.
    """
    level = int(level)
    if level < 0:
        raise ValueError("pattern level must be >= 0")
    if face_rot_max < 0:
        raise ValueError("face rotation bound must be >= 0")
    history = []
    warm = None
    for k in range(level + 1):
        prob, state, r, it = _solve_level(inp, k, face_rot_max, seed, warm)
        res = float(np.linalg.norm(r))
        history.append(FoldLevelResult(level=k, constraint_residual=res,
                                       max_constraint_error=float(np.abs(r).max()),
                                       iterations=it, converged=res <= tol))
        if k < level:
            warm = _refine_state(state, prob.n)
    delta, Q, t, u = state
    _, X, _ = prob.positions(delta, Q, t)
    n = prob.n
    verts = np.vstack([t, X[:n]])
    mesh = embedded_mesh(verts, prob.pat.faces())
    om = face_rot_max * np.tanh(u) if prob.n_face else np.zeros(3)
    res = history[-1]
    return PleatedSurface(
        mesh=mesh,
        pattern=prob.pat,
        fold_angles=np.pi - delta,
        constraint_residual=res.constraint_residual,
        max_constraint_error=res.max_constraint_error,
        isometry_residual=_isometry_residual(prob, state),
        seam_gap=float(np.linalg.norm(X[n] - X[0])),
        prism_height=float(verts[:, 2].max()),
        apex_height=inp.apex_height,
        iterations=sum(h.iterations for h in history),
        feasible=res.constraint_residual <= tol,
        tolerance=tol,
        face_rotations=om,
        history=tuple(history),
    )
