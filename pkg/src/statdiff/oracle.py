"""Ground-truth expectations, independent of the Taylor machinery.

Discrete distributions are summed exactly, a few Gaussian cases have closed
forms, and everything else goes through adaptive quadrature of
``g(x) * pdf(x)``. None of this touches jets or moment tables, which is what
makes it usable as an oracle for them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import quad
from .dist import DiscreteFinite, Distribution, Normal
from .errors import DomainError, NonFinite, QuadratureFailure
from .expr import Const, Exp, Expr, Pow, Sub, as_expr, evaluate, poly_coefficients

DEFAULT_TOL = 1e-10
MAX_TAIL_PIECES = 8


def expect(f: Callable[[np.ndarray], np.ndarray], d: Distribution, tol: float = DEFAULT_TOL,
           breakpoints: Sequence[float] = ()) -> float:
    """E[f(X)] for a vectorized callable ``f``.

    Continuous laws on unbounded supports are integrated over a truncated
    range, then outward over tail pieces of doubling width until a piece
    drops below the tolerance. If that has not happened after
    ``MAX_TAIL_PIECES`` pieces, :class:`QuadratureFailure` is raised because
    the expectation may not exist.
    """
    if isinstance(d, DiscreteFinite):
        values = np.asarray(f(d.x), dtype=float)
        if not np.all(np.isfinite(values)):
            raise NonFinite("integrand is not finite at a support point")
        return math.fsum(d.p * values)

    lo, hi, tails = d.integration_range()
    bps = [d.mean(), *breakpoints]

    def integrand(x):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(f(x), dtype=float) * d.pdf(x)

    main = quad.integrate(integrand, lo, hi, abs_tol=tol, rel_tol=tol, breakpoints=bps).value
    pieces = [main]
    threshold = max(tol, tol * abs(main))
    for a, b in tails:
        outward = 1.0 if a >= hi else -1.0
        for _ in range(MAX_TAIL_PIECES):
            try:
                piece = quad.integrate(integrand, a, b, abs_tol=0.1 * tol, rel_tol=tol).value
            except DomainError:
                # f is undefined out there; the density mass beyond is what was dropped.
                break
            except NonFinite:
                raise QuadratureFailure(
                    f"integrand overflows on the tail piece [{a:.6g}, {b:.6g}]; "
                    "the expectation may not exist") from None
            pieces.append(piece)
            if abs(piece) <= threshold:
                break
            width = 2.0 * abs(b - a)
            a, b = (b, b + width) if outward > 0 else (a - width, a)
        else:
            raise QuadratureFailure(
                f"tail pieces out to {max(a, b) if outward > 0 else min(a, b):.6g} still "
                f"contribute {pieces[-1]:.3g}; the expectation may not exist"
            )
    return math.fsum(pieces)


def _exp_linear(g: Expr) -> tuple[float, float] | None:
    """Return (a, b) when g is exp(a*x + b) or a positive integer power of one."""
    power = 1
    if isinstance(g, Pow) and g.exponent > 0:
        power, g = g.exponent, g.base
    if not isinstance(g, Exp):
        return None
    coeffs = poly_coefficients(g.arg)
    if coeffs is None or max(coeffs, default=0) > 1:
        return None
    return power * float(coeffs.get(1, 0)), power * float(coeffs.get(0, 0))


def oracle_mean(g, d: Distribution, tol: float = DEFAULT_TOL) -> float:
    """E[g(X)] by exact summation, closed form, or adaptive quadrature."""
    g = as_expr(g)
    coeffs = poly_coefficients(g)
    if coeffs is not None and max(coeffs, default=0) == 0:
        return float(coeffs.get(0, 0))
    if isinstance(d, Normal):
        lin = _exp_linear(g)
        if lin is not None:
            a, b = lin
            return _finite(math.exp(b + a * d.mu + 0.5 * a * a * d.sigma**2))
    return _finite(expect(lambda x: evaluate(g, x), d, tol))


def oracle_variance(g, d: Distribution, tol: float = DEFAULT_TOL) -> float:
    """Var[g(X)], computed as E[(g - E g)^2] and clamped at zero."""
    g = as_expr(g)
    if isinstance(d, Normal):
        lin = _exp_linear(g)
        if lin is not None:
            a, b = lin
            s2 = (a * d.sigma) ** 2
            return _finite(math.exp(2 * (b + a * d.mu) + s2) * math.expm1(s2))
    mu = oracle_mean(g, d, tol)
    centered = Pow(Sub(g, Const(mu)), 2)
    return max(0.0, oracle_mean(centered, d, tol))


def _finite(value: float) -> float:
    if not math.isfinite(value):
        raise NonFinite(f"expectation evaluated to {value!r}")
    return value


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    std_error: float
    samples: int
    seed: int


def mc_mean(g, d: Distribution, samples: int, seed: int, *, workers: int = 1,
            chunk_size: int = 1 << 16) -> MCEstimate:
    """Monte Carlo estimate of E[g(X)] with counter-based sampling.

    Sample ``i`` is a pure function of ``(seed, i)`` and the sums are exactly
    rounded (``math.fsum``), so the result is bit-identical for any
    ``workers`` / ``chunk_size``.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    g = as_expr(g)
    values = np.empty(samples)
    starts = range(0, samples, chunk_size)

    def run(start: int) -> None:
        idx = np.arange(start, min(start + chunk_size, samples), dtype=np.uint64)
        values[start : start + idx.size] = evaluate(g, d.sample(seed, idx))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    if not np.all(np.isfinite(values)):
        raise NonFinite("a Monte Carlo sample of g is not finite")
    est = math.fsum(values) / samples
    var = math.fsum((values - est) ** 2) / (samples - 1)
    return MCEstimate(est, math.sqrt(var / samples), samples, seed)
