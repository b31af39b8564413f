"""Statistical-differential approximations and exactness verdicts."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .dist import Distribution
from .expr import Const, Pow, Sub, as_expr, poly_coefficients
from .jet import MAX_ORDER, derivative_at, jet_of

DEFAULT_VERDICT_TOL = 1e-9


def _check_order(order: int) -> None:
    if int(order) != order or order < 2:
        raise ValueError(f"approximation order must be an integer >= 2, got {order!r}")
    if order > MAX_ORDER:
        raise ValueError(f"approximation order {order} exceeds the jet cap {MAX_ORDER}")


def approx_mean(g, d: Distribution, order: int = 2) -> float:
    """Truncated expansion of E[g(X)] about m = E[X].

    ``g(m) + sum_{k=2..order} mu_k g^(k)(m) / k!``; the first-order term is
    dropped because E[X - m] = 0. ``order=2`` is the classic two-term form
    ``g(m) + g''(m) Var[X] / 2``.
    """
    _check_order(order)
    g = as_expr(g)
    m = d.mean()
    c = jet_of(g, m, order).coeffs
    terms = [float(c[0])]
    terms += [d.central_moment(k) * float(c[k]) for k in range(2, order + 1)]
    return math.fsum(terms)


def approx_variance_first(g, d: Distribution) -> float:
    """First-order variance, ``g'(m)^2 Var[X]``."""
    g = as_expr(g)
    return derivative_at(g, d.mean(), 1) ** 2 * d.variance()


def approx_variance_second(g, d: Distribution, order: int = 2) -> float:
    """``E[(g(X) - a)^2]`` with ``a`` the two-term mean, itself expanded to ``order``.

    The outer expectation goes through :func:`approx_mean`, so ``order`` sets
    how many central moments it uses. Negative results are clamped to zero.
    """
    g = as_expr(g)
    a = approx_mean(g, d, 2)
    h = Pow(Sub(g, Const(a)), 2)
    return max(0.0, approx_mean(h, d, order))


class VerdictStatus(str, enum.Enum):
    EXACT_DEGREE2 = "ExactDegree2"
    EXACT_DEGREE3_ZERO_THIRD_MOMENT = "ExactDegree3ZeroThirdMoment"
    EXACT_BY_PEANO = "ExactByPeano"
    NOT_EXACT = "NotExact"


@dataclass(frozen=True)
class ExactnessVerdict:
    status: VerdictStatus
    residual: float
    conditions: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status is not VerdictStatus.NOT_EXACT

    def to_dict(self) -> dict:
        return {"status": self.status.value, "residual": self.residual,
                "conditions": dict(self.conditions)}


def exactness_verdict(g, d: Distribution, tol: float = DEFAULT_VERDICT_TOL, *,
                      oracle_tol: float = 1e-10) -> ExactnessVerdict:
    """Decide whether the two-term approximation of E[g(X)] is exact.

    Checked in order: ``g`` is a polynomial of degree <= 2; ``g`` is a cubic
    and the third central moment vanishes (relative to ``Var^(3/2)``); the
    Peano remainder of order 2 is below ``tol``. Otherwise ``NotExact`` with
    the remainder as residual.
    """
    from .bounds import peano_remainder

    g = as_expr(g)
    coeffs = poly_coefficients(g)
    degree = None if coeffs is None else max(coeffs, default=0)
    conditions: dict = {"poly_degree": degree}
    if degree is not None and degree <= 2:
        conditions.update(third_moment_zero=None, remainder_zero=True)
        return ExactnessVerdict(VerdictStatus.EXACT_DEGREE2, 0.0, conditions)

    mu3 = d.central_moment(3)
    mu3_zero = abs(mu3) <= tol * (1.0 + abs(d.variance()) ** 1.5)
    conditions["third_moment_zero"] = mu3_zero
    conditions["mu3"] = mu3
    if degree == 3 and mu3_zero:
        # For a cubic the order-2 remainder is exactly mu_3 * a_3.
        residual = mu3 * float(coeffs.get(3, 0))
        conditions["remainder_zero"] = abs(residual) <= tol
        return ExactnessVerdict(VerdictStatus.EXACT_DEGREE3_ZERO_THIRD_MOMENT, residual, conditions)

    residual = peano_remainder(g, d, 2, tol=oracle_tol)
    conditions["remainder_zero"] = abs(residual) <= tol
    status = VerdictStatus.EXACT_BY_PEANO if abs(residual) <= tol else VerdictStatus.NOT_EXACT
    return ExactnessVerdict(status, residual, conditions)
