"""Remainders and error bounds for the two-term mean approximation.

Every bound is returned as an :class:`ErrorBound` carrying the numbers that
gate it. Big-O constants are taken as 1, so the values are diagnostics to be
compared against the true error, not certified inequalities; domination is
only expected for small-spread distributions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dist import Distribution, chebyshev_grid
from .errors import DomainError, HypothesisFailure
from .expr import as_expr, poly_degree
from .jet import derivative_at, jet_of
from .oracle import DEFAULT_TOL, expect
from .quad import gauss_legendre_unit

SIGN_CHECK_ORDER = 8


class BoundKind(str, enum.Enum):
    PEANO_REMAINDER = "PeanoRemainder"
    CLASS_L = "ClassL"
    BOUNDED_DERIVATIVE = "BoundedDerivative"
    LYAPUNOV = "Lyapunov"
    LYAPUNOV_BOUNDED_DERIVATIVE = "LyapunovBoundedDerivative"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ErrorBound:
    kind: BoundKind
    value: float
    applicable: bool
    hypothesis_report: list[Check] = field(default_factory=list)
    signed: float | None = None  # Peano remainder before taking magnitude

    def dominates(self, true_error: float) -> bool:
        return abs(true_error) <= self.value

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "value": self.value,
            "applicable": self.applicable,
            "hypotheses": [c.to_dict() for c in self.hypothesis_report],
        }
        if self.signed is not None:
            out["signed"] = self.signed
        return out


def _make(kind: BoundKind, value: float, checks: list[Check], strict: bool,
          signed: float | None = None) -> ErrorBound:
    bound = ErrorBound(kind, float(value), all(c.passed for c in checks), checks, signed)
    if strict and not bound.applicable:
        failed = ", ".join(c.name for c in checks if not c.passed)
        raise HypothesisFailure(f"{kind.value} bound not applicable: {failed}", bound)
    return bound


def _grid_derivatives(g, region: tuple[float, float], max_order: int) -> np.ndarray:
    """Rows 0..max_order of derivatives of g on the 257-point Chebyshev grid."""
    grid = chebyshev_grid(*region)
    return jet_of(g, grid, max_order).derivatives()


# ---------------------------------------------------------------------------
# Peano kernel remainder


def peano_remainder(g, d: Distribution, n: int, *, tol: float = DEFAULT_TOL,
                    inner_tol: float = 1e-13) -> float:
    """Signed remainder ``E[(1/n!) int_m^X (X - t)^n g^(n+1)(t) dt]``.

    With ``t = m + s (X - m)`` the inner integral becomes
    ``(X - m)^(n+1) int_0^1 (1 - s)^n g^(n+1)(m + s (X - m)) ds``, which is
    integrated for all outer abscissae at once by a node-doubling
    Gauss-Legendre rule. The outer expectation uses the oracle's scheme.
    ``approx_mean(g, d, n) + peano_remainder(g, d, n)`` reconstructs E[g(X)].
    """
    if int(n) != n or n < 1:
        raise ValueError("remainder order n must be an integer >= 1")
    g = as_expr(g)
    m = d.mean()
    fact = math.factorial(n)

    def remainder(x):
        dx = np.asarray(x, dtype=float) - m

        def kernel(s):
            theta = m + s[:, None] * dx[None, :]
            return ((1.0 - s) ** n)[:, None] * derivative_at(g, theta, n + 1)

        inner = gauss_legendre_unit(kernel, tol=inner_tol)
        return dx ** (n + 1) * inner / fact

    return expect(remainder, d, tol)


def bound_peano(g, d: Distribution, n: int = 2, *, tol: float = DEFAULT_TOL) -> ErrorBound:
    r = peano_remainder(g, d, n, tol=tol)
    checks = [Check(f"g in C^{n + 1} on the support", True, "jet evaluation succeeded"),
              Check("remainder", True, f"signed remainder {r!r}")]
    return _make(BoundKind.PEANO_REMAINDER, abs(r), checks, False, signed=r)


# ---------------------------------------------------------------------------
# Class L


@dataclass(frozen=True)
class ClassLReport:
    member: bool
    checks: list[Check]
    note: str = ""

    def __bool__(self) -> bool:
        return self.member


def class_l_membership(g, region: tuple[float, float], max_order: int = SIGN_CHECK_ORDER) -> ClassLReport:
    """Grid test that ``g`` and its derivatives up to ``max_order`` are positive.

    Passes when ``g > 0`` and ``g^(j) >= 0`` on the grid for ``1 <= j <= max_order``.
    Then ``|g| = g`` on the region, so each derivative of ``g`` equals the
    matching derivative of ``|g|``.
    """
    g = as_expr(g)
    der = _grid_derivatives(g, region, max_order)
    checks = [Check("g > 0", bool(np.all(der[0] > 0)), f"min g = {der[0].min():.6g}")]
    for j in range(1, max_order + 1):
        checks.append(Check(f"g^({j}) >= 0", bool(np.all(der[j] >= 0)),
                            f"min = {der[j].min():.6g}"))
    member = all(c.passed for c in checks)
    note = ""
    deg = poly_degree(g)
    if deg is not None and deg <= 2:
        note = "degree <= 2: third derivative vanishes, bound is 0 regardless of membership"
    return ClassLReport(member, checks, note)


def bound_class_l(g, d: Distribution, *, max_order: int = SIGN_CHECK_ORDER,
                  tol: float = DEFAULT_TOL) -> ErrorBound:
    """``E[|X - m|^3 |g'''(X)|]``, gated on class-L membership over the evaluation region."""
    g = as_expr(g)
    m = d.mean()
    region = d.evaluation_region()
    deg = poly_degree(g)
    if deg is not None and deg <= 2:
        checks = [Check("g''' identically zero", True, f"polynomial of degree {deg}")]
    else:
        report = class_l_membership(g, region, max_order)
        checks = [Check("class L membership", report.member,
                        f"region [{region[0]:.6g}, {region[1]:.6g}]")]
        checks += report.checks
    value = expect(lambda x: np.abs(x - m) ** 3 * np.abs(derivative_at(g, x, 3)), d, tol)
    return _make(BoundKind.CLASS_L, value, checks, False)


# ---------------------------------------------------------------------------
# Bounded derivatives


def _derivative_cap_checks(g, d: Distribution, M: float, max_order: int) -> list[Check]:
    region = d.evaluation_region()
    der = _grid_derivatives(g, region, max_order)
    checks = []
    for j in range(3, max_order + 1):
        peak = float(np.max(np.abs(der[j])))
        checks.append(Check(f"|g^({j})| <= M", peak <= M, f"max {peak:.6g} vs M = {M:.6g}"))
    return checks


def bound_bounded_derivative(g, d: Distribution, M: float, *, max_order: int = SIGN_CHECK_ORDER,
                             tol: float = DEFAULT_TOL, strict: bool = True) -> ErrorBound:
    """``M E[|X - m|^3 e^{|X - m|}]`` for ``g`` with all derivatives of order >= 3 bounded by M.

    Raises:
      HypothesisFailure: the grid check finds ``|g^(j)| > M`` (``strict`` only).
    """
    if not M > 0:
        raise ValueError("M must be positive")
    g = as_expr(g)
    m = d.mean()
    checks = _derivative_cap_checks(g, d, M, max_order)
    value = M * expect(lambda x: np.abs(x - m) ** 3 * np.exp(np.abs(x - m)), d, tol)
    return _make(BoundKind.BOUNDED_DERIVATIVE, value, checks, strict)


def bound_moment_bounded_derivative(g, d: Distribution, M: float, n: int = 3, *,
                                    max_order: int = SIGN_CHECK_ORDER,
                                    strict: bool = True) -> ErrorBound:
    """``M nu_n^{3/n} exp(nu_n^{1/n})`` with ``nu_n = E|X - m|^n``, for ``n >= 3``."""
    if int(n) != n or n < 3:
        raise ValueError("moment order n must be an integer >= 3")
    if not M > 0:
        raise ValueError("M must be positive")
    g = as_expr(g)
    checks = _derivative_cap_checks(g, d, M, max_order)
    nu = d.abs_central_moment(n)
    checks.append(Check(f"E|X-m|^{n} finite", math.isfinite(nu), f"nu_{n} = {nu!r}"))
    value = M * nu ** (3.0 / n) * math.exp(nu ** (1.0 / n))
    return _make(BoundKind.LYAPUNOV_BOUNDED_DERIVATIVE, value, checks, strict)


# ---------------------------------------------------------------------------
# Lyapunov


def bound_lyapunov(g, d: Distribution, n: int = 3, *, strict: bool = True) -> ErrorBound:
    """``C^3 g'''(C + m)`` with ``C = (E|X - m|^n)^{1/n}``.

    Requires ``g^(j) >= 0`` on the evaluation region for ``3 <= j <= n``.

    Raises:
      HypothesisFailure: a sign check fails (``strict`` only).
      DomainError: ``g'''`` is undefined at ``C + m``.
    """
    if int(n) != n or n < 3:
        raise ValueError("moment order n must be an integer >= 3")
    g = as_expr(g)
    m = d.mean()
    region = d.evaluation_region()
    der = _grid_derivatives(g, region, n)
    checks = [Check(f"g^({j}) >= 0", bool(np.all(der[j] >= 0)), f"min = {der[j].min():.6g}")
              for j in range(3, n + 1)]
    nu = d.abs_central_moment(n)
    c = nu ** (1.0 / n)
    g3 = derivative_at(g, c + m, 3)
    checks.append(Check(f"E|X-m|^{n} finite", math.isfinite(nu), f"C = {c!r}"))
    checks.append(Check("g'''(C+m) >= 0", g3 >= 0, f"g'''({c + m:.6g}) = {g3:.6g}"))
    return _make(BoundKind.LYAPUNOV, abs(c**3 * g3), checks, strict)


@dataclass(frozen=True)
class LyapunovCheck:
    lhs: float
    rhs: float
    holds: bool


def lyapunov_check(d: Distribution, r: int, s: int) -> LyapunovCheck:
    """Compare ``nu_s^{1/s}`` against ``nu_r^{1/r}`` for ``0 < r < s``."""
    if not (0 < r < s):
        raise ValueError("need 0 < r < s")
    lhs = d.abs_central_moment(s) ** (1.0 / s)
    rhs = d.abs_central_moment(r) ** (1.0 / r)
    return LyapunovCheck(lhs, rhs, lhs >= rhs - 1e-9 * rhs)


__all__ = [
    "BoundKind", "Check", "ClassLReport", "ErrorBound", "LyapunovCheck",
    "bound_bounded_derivative", "bound_class_l", "bound_lyapunov",
    "bound_moment_bounded_derivative", "bound_peano", "class_l_membership",
    "lyapunov_check", "peano_remainder",
]
