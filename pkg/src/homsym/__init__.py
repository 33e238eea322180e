"""Isometry analysis of left-invariant metrics on three-dimensional Lie groups."""

__version__ = "0.1.0"

from .exact import AlgebraError, Mat, ScalarDivisionError, SamplingError
from .lie import (StructureConstants, derivation_algebra, inner_outer_split, jacobi_passes,
                  load_constants)
from .cartan import FrameMetric, connection_coefficients, curvature, curvature_class, identity_suite
from .catalog import ParameterDomainError, catalog, identify_catalog
from .gauge import UnsupportedOperationError, canonicalize, exp_inner, gauge_rank
from .killing import build_pfaffian, closure_dimension, extra_killing_data

__all__ = [
    "AlgebraError", "Mat", "ScalarDivisionError", "SamplingError",
    "StructureConstants", "derivation_algebra", "inner_outer_split", "jacobi_passes", "load_constants",
    "FrameMetric", "connection_coefficients", "curvature", "curvature_class", "identity_suite",
    "ParameterDomainError", "catalog", "identify_catalog",
    "UnsupportedOperationError", "canonicalize", "exp_inner", "gauge_rank",
    "build_pfaffian", "closure_dimension", "extra_killing_data",
]
