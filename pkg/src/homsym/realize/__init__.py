"""Numeric coordinate oracle for the catalog."""
from .bianchi import BOXES, realization, sample_metric_params
from .expr import Dual, Expr, SingularPointError, dump_sexpr, from_sympy, parse_sexpr
from .fields import (
    ChartField,
    Realization,
    check_structure,
    enlarged_algebra_check,
    field_values,
    killing_residual,
    lie_bracket_eval,
    lie_derivative_form,
    pfaffian_consistency,
    sample_points,
)
