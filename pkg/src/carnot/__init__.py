"""Exact Carnot algebras, Rockland checks and index computations at a point."""
from .exact import GaussQ
from .lie import (
    AlgebraMismatchError,
    GradedLieAlgebra,
    GroupElement,
    LinearMap,
    MalformedAlgebraError,
    ValidationReport,
    bch_product,
    coAd,
    dilate,
    dnc_rescale,
    validate,
)
from .algebras import abelian, engel, free_nilpotent, heisenberg, heisenberg_type
from .gbar import build_gbar, build_semidirect, flatten_orbit
from .enveloping import EnvelopingOperator, adjoint, multiply, pbw_normalize, sharp_product
from .rep import RepresentationAssembly, exact_gamma_criterion, rockland_scan
from .index import IndexReport, fredholm_index, spectral_flow, winding_number
from .osculating import FiltrationSpec, osculating_algebra

__version__ = "0.1.0"

__all__ = [
    "GaussQ",
    "AlgebraMismatchError",
    "GradedLieAlgebra",
    "GroupElement",
    "LinearMap",
    "MalformedAlgebraError",
    "ValidationReport",
    "bch_product",
    "coAd",
    "dilate",
    "dnc_rescale",
    "validate",
    "abelian",
    "engel",
    "free_nilpotent",
    "heisenberg",
    "heisenberg_type",
    "build_gbar",
    "build_semidirect",
    "flatten_orbit",
    "EnvelopingOperator",
    "adjoint",
    "multiply",
    "pbw_normalize",
    "sharp_product",
    "RepresentationAssembly",
    "exact_gamma_criterion",
    "rockland_scan",
    "IndexReport",
    "fredholm_index",
    "spectral_flow",
    "winding_number",
    "FiltrationSpec",
    "osculating_algebra",
]
