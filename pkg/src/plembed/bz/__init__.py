"""Local stages of the isometric PL embedding: cone flattening, subdivision, pleats, ripples."""
from .cone import (
    ConeFlatteningMap,
    ConeLayout,
    ContractionAnnulusMap,
    conformality_contrast,
    contraction_annulus_map,
    flatten_cone_vertex,
    hexagon_flattening,
    planar_conformality_check,
    regular_star,
)
from .fold import (
    BasicConstructionInput,
    CreasePattern,
    FoldInputError,
    PleatedSurface,
    crease_pattern,
    fold_basic_construction,
)
from .ripple import RippledCone, build_rippled_cone, closed_double_residual
from .subdivide import subdivide_n2

__all__ = [
    "BasicConstructionInput",
    "ConeFlatteningMap",
    "ConeLayout",
    "ContractionAnnulusMap",
    "CreasePattern",
    "FoldInputError",
    "PleatedSurface",
    "RippledCone",
    "build_rippled_cone",
    "closed_double_residual",
    "conformality_contrast",
    "contraction_annulus_map",
    "crease_pattern",
    "flatten_cone_vertex",
    "fold_basic_construction",
    "hexagon_flattening",
    "planar_conformality_check",
    "regular_star",
    "subdivide_n2",
]
