"""Cogwheel disk realising a cone vertex of total angle above 2 pi in R^3.

The apex ``O`` is surrounded by ``2N`` congruent isosceles triangles
``(O, P_i, M_i)``, ``(O, M_i, P_{i+1})`` with legs ``radius``: the ``P_i`` sit
on the base circle, the ``M_i`` over the arc midpoints, lifted to the
elevation angle ``phi_e`` with ``cos(beta) = cos(pi/N) cos(phi_e)``.  Every
boundary chord carries an isosceles tooth with legs ``2 delta`` lying in the
plane of its ripple triangle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..curvature import vertex_defects
from ..mesh import EmbeddedMesh, ValidationError, embedded_mesh

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RippledCone:
    theta: float
    teeth: int
    radius: float
    delta: float
    beta: float          # apex angle of each of the 2N ripple triangles
    elevation: float
    mesh: EmbeddedMesh   # vertex 0 is the apex, then P_0, M_0, P_1, M_1, ..., then tooth tips

    @property
    def lift_height(self):
        return float(self.radius * np.sin(self.elevation))

    @property
    def apex_angle_sum(self):
        s = self.mesh.surface
        return float(s.vertex_angle_sums()[0])

    @property
    def apex_defect(self):
        return float(vertex_defects(self.mesh.surface)[0])

    def congruence_error(self):
        """Max side-length spread among ripple triangles and among teeth."""
        s = self.mesh.surface
        fl = np.sort(s.face_lengths(), axis=1)
        n = 2 * self.teeth
        rip, tooth = fl[:n], fl[n:]
        return float(max(np.ptp(rip, axis=0).max(), np.ptp(tooth, axis=0).max()))

    def double_gauss_bonnet(self):
        """Gauss-Bonnet residual of the disk glued to its mirror copy along the boundary."""
        return closed_double_residual(self.mesh)


def ripple_elevation(theta, n):
    beta = theta / (2 * n)
    c = np.cos(beta) / np.cos(np.pi / n)
    if c < -1.0 or c > 1.0:
        raise ValidationError(f"no real elevation for theta = {theta!r}, N = {n}")
    return beta, float(np.arccos(c))


def build_rippled_cone(theta: float, teeth: int, radius: float = 1.0, delta: float = 0.25) -> RippledCone:
    theta, n, rho, delta = float(theta), int(teeth), float(radius), float(delta)
    if not theta > TWO_PI:
        raise ValidationError("rippled cone needs theta > 2*pi; flatten the vertex instead")
    if n < 3:
        raise ValidationError("need at least 3 teeth")
    if not (rho > 0 and delta > 0):
        raise ValidationError("radius and delta must be positive")
    beta, phi_e = ripple_elevation(theta, n)
    if not beta < np.pi:
        raise ValidationError("ripple apex angle theta/(2N) must stay below pi")
    half_chord = rho * np.sin(beta / 2)
    if not 2 * delta > half_chord:
        raise ValidationError(f"tooth legs 2*delta = {2 * delta!r} must exceed half the chord {half_chord!r}")
    k = np.arange(n)
    rim = np.empty((2 * n, 3))
    a_p = TWO_PI * k / n
    a_m = np.pi * (2 * k + 1) / n
    rim[0::2] = rho * np.column_stack([np.cos(a_p), np.sin(a_p), np.zeros(n)])
    rim[1::2] = rho * np.column_stack([np.cos(phi_e) * np.cos(a_m), np.cos(phi_e) * np.sin(a_m),
                                       np.full(n, np.sin(phi_e))])
    nxt = np.roll(rim, -1, axis=0)
    mid = 0.5 * (rim + nxt)
    # outward direction in each ripple plane, perpendicular to its chord
    chord = nxt - rim
    out = mid - (np.einsum("ij,ij->i", mid, chord) / np.einsum("ij,ij->i", chord, chord))[:, None] * chord
    out /= np.linalg.norm(out, axis=1)[:, None]
    tip = mid + np.sqrt((2 * delta) ** 2 - half_chord ** 2) * out
    verts = np.vstack([np.zeros((1, 3)), rim, tip])
    i = np.arange(2 * n)
    j = (i + 1) % (2 * n)
    faces = np.vstack([np.column_stack([np.zeros(2 * n, np.int64), 1 + i, 1 + j]),
                       np.column_stack([1 + i, 1 + 2 * n + i, 1 + j])])
    mesh = embedded_mesh(verts, faces)
    return RippledCone(theta=theta, teeth=n, radius=rho, delta=delta, beta=beta, elevation=phi_e,
                       mesh=mesh)


def closed_double_residual(m) -> float:
    """Gauss-Bonnet residual of ``m`` glued to a mirror copy along its boundary.

    Interior vertices appear twice with their own defect; a boundary vertex
    becomes one vertex of angle ``2 * angle``.  The double has Euler
    characteristic ``2 chi`` since the boundary circles have ``chi = 0``.
    """
    s = m.surface if isinstance(m, EmbeddedMesh) else m
    bnd = s.boundary_vertex_mask()
    used = s.vertex_face_count() > 0
    ang = s.vertex_angle_sums()
    interior = used & ~bnd
    total = 2.0 * (TWO_PI - ang[interior]).sum() + (TWO_PI - 2.0 * ang[bnd]).sum()
    return float(total - TWO_PI * 2 * s.euler_characteristic)
