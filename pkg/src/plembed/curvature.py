"""Angle-defect Gaussian curvature, edge dihedrals and Gauss-Bonnet checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import EmbeddedMesh, PLSurface, ValidationError

GAUSS_BONNET_TOL = 1e-9


@dataclass(frozen=True)
class CurvatureReport:
    """Per-vertex defects and, for embedded meshes, per-edge dihedral data.

    Dihedral and mean-curvature arrays are indexed like ``surface.edges``
    and hold NaN on boundary edges (also listed in ``skipped_edges``).
    """

    defects: np.ndarray
    boundary_vertices: np.ndarray
    total_defect: float
    two_pi_chi: float
    dihedral: np.ndarray | None = None
    mean_measure: np.ndarray | None = None
    skipped_edges: np.ndarray | None = None

    @property
    def gauss_bonnet_gap(self):
        return abs(self.total_defect - self.two_pi_chi)


def _surface(s):
    return s.surface if isinstance(s, EmbeddedMesh) else s


def vertex_defects(s: PLSurface) -> np.ndarray:
    """2*pi - angle at interior vertices, pi - angle at boundary vertices."""
    s = _surface(s)
    sums = s.vertex_angle_sums()
    full = np.where(s.boundary_vertex_mask(), np.pi, 2.0 * np.pi)
    d = full - sums
    d[s.vertex_face_count() == 0] = 0.0
    return d


def angle_defects(s: PLSurface) -> CurvatureReport:
    s = _surface(s)
    d = vertex_defects(s)
    return CurvatureReport(
        defects=d,
        boundary_vertices=s.boundary_vertex_mask(),
        total_defect=float(d.sum()),
        two_pi_chi=2.0 * np.pi * s.euler_characteristic,
    )


def gauss_bonnet_check(s: PLSurface) -> float:
    """Signed residual ``sum(defects) - 2*pi*chi`` for a closed surface."""
    s = _surface(s)
    if not s.is_closed:
        raise ValidationError("Gauss-Bonnet check needs a closed surface (boundary found)")
    return float(vertex_defects(s).sum() - 2.0 * np.pi * s.euler_characteristic)


def gauss_bonnet_passes(s, tol=GAUSS_BONNET_TOL):
    return abs(gauss_bonnet_check(s)) < tol


def _edge_faces(s: PLSurface):
    """For every edge: first face traversing it, second face (or -1), and the
    directed endpoints (u -> v) as seen in the first face."""
    ne = s.n_edges
    f1 = np.full(ne, -1, dtype=np.int64)
    f2 = np.full(ne, -1, dtype=np.int64)
    uv = np.zeros((ne, 2), dtype=np.int64)
    f2_dir = np.zeros((ne, 2), dtype=np.int64)
    for f, tri in enumerate(s.faces):
        for k in range(3):
            e = s.face_edges[f, k]
            u, v = tri[(k + 1) % 3], tri[(k + 2) % 3]
            if f1[e] < 0:
                f1[e] = f
                uv[e] = (u, v)
            else:
                f2[e] = f
                f2_dir[e] = (u, v)
    return f1, f2, uv, f2_dir


def dihedral_data(m: EmbeddedMesh) -> CurvatureReport:
    """Interior dihedral angle and ``length * (pi - dihedral)`` per interior edge.

    Orientation is taken from the face order; closed meshes with negative
    signed volume are treated as inward-oriented and corrected.  Convex edges
    get positive measure, reflex edges negative.
    """
    s = m.surface
    if not s.orientable:
        raise ValidationError("dihedral data needs an orientable mesh")
    x = m.vertices
    if x.shape[1] == 2:
        x = np.column_stack([x, np.zeros(len(x))])
    elif x.shape[1] != 3:
        raise ValidationError("dihedral angles are defined for meshes in R^3")
    f1, f2, uv, f2_dir = _edge_faces(s)
    interior = f2 >= 0
    bad = interior & ~((f2_dir[:, 0] == uv[:, 1]) & (f2_dir[:, 1] == uv[:, 0]))
    if bad.any():
        e = int(np.nonzero(bad)[0][0])
        raise ValidationError(f"faces around edge {e} are not consistently oriented", e)
    f = m.faces
    normals = np.cross(x[f[:, 1]] - x[f[:, 0]], x[f[:, 2]] - x[f[:, 0]])
    orient = 1.0
    if s.is_closed:
        v = x[f]
        vol = np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum()
        orient = -1.0 if vol < 0 else 1.0
    dihedral = np.full(s.n_edges, np.nan)
    idx = np.nonzero(interior)[0]
    n1 = normals[f1[idx]]
    n2 = normals[f2[idx]]
    cr = np.cross(n1, n2)
    crn = np.linalg.norm(cr, axis=1)
    theta = np.arctan2(crn, np.einsum("ij,ij->i", n1, n2))
    e_vec = x[uv[idx, 1]] - x[uv[idx, 0]]
    sign = np.sign(np.einsum("ij,ij->i", cr, e_vec)) * orient
    dihedral[idx] = np.pi - sign * theta
    mean = s.edge_lengths * (np.pi - dihedral)
    d = vertex_defects(s)
    return CurvatureReport(
        defects=d,
        boundary_vertices=s.boundary_vertex_mask(),
        total_defect=float(d.sum()),
        two_pi_chi=2.0 * np.pi * s.euler_characteristic,
        dihedral=dihedral,
        mean_measure=mean,
        skipped_edges=np.nonzero(~interior)[0],
    )


@dataclass(frozen=True)
class ExtremalVertexCheck:
    vertex: int
    defect: float
    distance: float
    passed: bool


def extremal_vertex_defect_check(m: EmbeddedMesh) -> ExtremalVertexCheck:
    """Positive-curvature witness at the vertex farthest from the centroid.

    A farthest vertex is a first contact point of a shrinking sphere around
    the centroid, so all its edges point into an open half-space and its
    angle sum is below 2*pi.
    """
    s = m.surface
    if not s.is_closed:
        raise ValidationError("extremal vertex check needs a closed mesh")
    used = s.vertex_face_count() > 0
    dist = np.linalg.norm(m.vertices - m.vertices[used].mean(axis=0), axis=1)
    dist[~used] = -np.inf
    v = int(np.argmax(dist))
    d = float(vertex_defects(s)[v])
    return ExtremalVertexCheck(vertex=v, defect=d, distance=float(dist[v]), passed=d > 0)
