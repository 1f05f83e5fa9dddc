"""Certified bounded-diameter covers for graph classes of small asymptotic dimension."""

from .banana import annulus_cover, detect_fat_banana
from .covers import Certificate, Cover, VerificationReport, cover_to_partition, r_multiplicity, verify_cover, weak_diameter_coloring
from .geometric import Embedding, geometric_cover, grid_subgraph_cover, unit_ball_cover, validate_embedding
from .graph import DistanceOracle, GraphInputError, RealProjection, WeightedGraph, r_components, rooted_projection
from .pathwidth import PathDecomposition, normalize_pd, pw_cover
from .pipelines import chordal_scheme, genus_cover, k3p_cover, planar_cover
from .stitching import line_cover, stitch

__all__ = [
    "Certificate",
    "Cover",
    "DistanceOracle",
    "Embedding",
    "GraphInputError",
    "PathDecomposition",
    "RealProjection",
    "VerificationReport",
    "WeightedGraph",
    "annulus_cover",
    "chordal_scheme",
    "cover_to_partition",
    "detect_fat_banana",
    "genus_cover",
    "geometric_cover",
    "grid_subgraph_cover",
    "k3p_cover",
    "line_cover",
    "normalize_pd",
    "planar_cover",
    "pw_cover",
    "r_components",
    "r_multiplicity",
    "rooted_projection",
    "stitch",
    "unit_ball_cover",
    "validate_embedding",
    "verify_cover",
    "weak_diameter_coloring",
]
