"""Exact mixed moments of noncommutative random vectors from q-commutator data."""

from .algebra import (
    Ann,
    Cre,
    Kind,
    ModelSpec,
    MomentQuery,
    OpExpr,
    OpSymbol,
    Pres,
    Var,
    gaussian_spec,
)
from .diagrams import (
    FeynmanDiagram,
    crossing_number,
    enumerate_pairings,
    is_catalan,
    partial_expectation,
    q_wick_moment,
    scalar_recursion_moment,
)
from .engine import EvalConfig, MomentEvaluator, moment, moment_equal_check, vacuum_expectation
from .exactmath import QPoly, parse_poly, poly_eval

__all__ = [
    "Ann", "Cre", "Kind", "ModelSpec", "MomentQuery", "OpExpr", "OpSymbol", "Pres", "Var",
    "gaussian_spec", "FeynmanDiagram", "crossing_number", "enumerate_pairings", "is_catalan",
    "partial_expectation", "q_wick_moment", "scalar_recursion_moment", "EvalConfig",
    "MomentEvaluator", "moment", "moment_equal_check", "vacuum_expectation", "QPoly",
    "parse_poly", "poly_eval",
]
