"""Piecewise-linear surfaces: intrinsic metrics, curvature, landmark embeddings,
quasiconformal dilatations and local isometric-embedding constructions."""
from ._accel import BACKEND
from .curvature import (
    CurvatureReport,
    angle_defects,
    dihedral_data,
    extremal_vertex_defect_check,
    gauss_bonnet_check,
)
from .kuratowski import kuratowski_embed, verify_bilipschitz, verify_isometry_on_landmarks
from .mesh import (
    EmbeddedMesh,
    MeshError,
    ParseError,
    PLSurface,
    ValidationError,
    build_pl_surface,
    embedded_mesh,
    load_mesh,
    save_mesh,
    topology_report,
    total_vertex_angle,
)
from .metric import distance_field, distance_matrix, farthest_point_net, short_map_check
from .qc import (
    DilatationError,
    DilatationReport,
    convex_polyhedron_bound,
    dihedral_wedge_coefficients,
    folding_map_dilatation,
    pointwise_dilatation,
    polyhedron_dihedral_bound,
    wedge_coefficients,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CurvatureReport",
    "DilatationError",
    "DilatationReport",
    "EmbeddedMesh",
    "MeshError",
    "PLSurface",
    "ParseError",
    "ValidationError",
    "angle_defects",
    "build_pl_surface",
    "convex_polyhedron_bound",
    "dihedral_data",
    "dihedral_wedge_coefficients",
    "distance_field",
    "distance_matrix",
    "embedded_mesh",
    "extremal_vertex_defect_check",
    "farthest_point_net",
    "folding_map_dilatation",
    "gauss_bonnet_check",
    "kuratowski_embed",
    "load_mesh",
    "pointwise_dilatation",
    "polyhedron_dihedral_bound",
    "save_mesh",
    "short_map_check",
    "topology_report",
    "total_vertex_angle",
    "verify_bilipschitz",
    "verify_isometry_on_landmarks",
    "wedge_coefficients",
]
