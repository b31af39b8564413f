"""Delta-method (statistical differential) approximations of E[g(X)] and Var[g(X)].

Quick start::

    >>> from statdiff import parse, Normal, approx_mean, oracle_mean
    >>> g = parse("exp(x)")
    >>> round(approx_mean(g, Normal(0, 0.1), 2), 12)
    1.005
"""

__version__ = "0.1.0"

from .errors import (DomainError, ExpressionSyntaxError, HypothesisFailure, InvalidDistribution,
                     NonFinite, NonIntegerExponent, QuadratureFailure, StatDiffError)
from .expr import Expr, evaluate, parse, poly_coefficients, poly_degree, to_text
from .jet import Jet, derivative_at, jet_of
from .dist import (CustomDensity, DiscreteFinite, Distribution, Exponential, MomentTable, Normal,
                   Uniform, parse_distribution, point_mass, third_moment_identity)
from .oracle import MCEstimate, expect, mc_mean, oracle_mean, oracle_variance
from .approx import (ExactnessVerdict, VerdictStatus, approx_mean, approx_variance_first,
                     approx_variance_second, exactness_verdict)
from .bounds import (BoundKind, ErrorBound, bound_bounded_derivative, bound_class_l,
                     bound_lyapunov, bound_moment_bounded_derivative, bound_peano,
                     class_l_membership, lyapunov_check, peano_remainder)

__all__ = [
    "BoundKind", "CustomDensity", "DiscreteFinite", "Distribution", "DomainError", "ErrorBound",
    "ExactnessVerdict", "Exponential", "ExpressionSyntaxError", "Expr", "HypothesisFailure",
    "InvalidDistribution", "Jet", "MCEstimate", "MomentTable", "NonFinite", "NonIntegerExponent",
    "Normal", "QuadratureFailure", "StatDiffError", "Uniform", "VerdictStatus",
    "approx_mean", "approx_variance_first", "approx_variance_second", "bound_bounded_derivative",
    "bound_class_l", "bound_lyapunov", "bound_moment_bounded_derivative", "bound_peano",
    "class_l_membership", "derivative_at", "evaluate", "exactness_verdict", "expect", "jet_of",
    "lyapunov_check", "mc_mean", "oracle_mean", "oracle_variance", "parse", "parse_distribution",
    "peano_remainder", "point_mass", "poly_coefficients", "poly_degree", "third_moment_identity",
    "to_text",
]
