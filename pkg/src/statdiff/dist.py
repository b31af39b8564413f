"""Distributions of the random variable X and their moment tables."""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import quad
from .errors import DomainError, InvalidDistribution, QuadratureFailure
from .expr import Expr, as_expr, evaluate, to_text
from .rng import uniforms

MOMENT_TOL = 1e-12
GRID_POINTS = 257


def chebyshev_grid(lo: float, hi: float, n: int = GRID_POINTS) -> np.ndarray:
    """Chebyshev-Lobatto points on ``[lo, hi]``, endpoints included, ascending."""
    k = np.arange(n)
    t = -np.cos(np.pi * k / (n - 1))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


class MomentTable:
    """Lazily computed central and absolute central moments.

    The cache only grows. Writers hold a lock; readers of already cached
    entries see fully computed values because each entry is inserted after
    it is computed.
    """

    def __init__(self, dist: "Distribution") -> None:
        self._dist = dist
        self.central: dict[int, float] = {}
        self.absolute: dict[int, float] = {}
        self._lock = threading.RLock()

    def central_moment(self, k: int) -> float:
        value = self.central.get(k)
        if value is None:
            with self._lock:
                value = self.central.get(k)
                if value is None:
                    value = float(self._dist._central(k))
                    self.central[k] = value
        return value

    def abs_moment(self, k: int) -> float:
        value = self.absolute.get(k)
        if value is None:
            with self._lock:
                value = self.absolute.get(k)
                if value is None:
                    value = float(self._dist._absolute(k))
                    self.absolute[k] = value
        return value

    def ensure(self, order: int) -> None:
        for k in range(order + 1):
            self.central_moment(k)
            self.abs_moment(k)

    def violations(self, rel: float = 1e-9) -> list[str]:
        """Return descriptions of broken invariants among the cached entries."""
        out = []
        mu, nu = self.central, self.absolute
        if 0 in mu and mu[0] != 1.0:
            out.append(f"mu_0 = {mu[0]!r} != 1")
        if 1 in mu:
            scale = math.sqrt(mu.get(2, 0.0)) or 1.0
            if abs(mu[1]) > 1e-10 * max(1.0, scale):
                out.append(f"|mu_1| = {abs(mu[1]):.3g} > 1e-10")
        if mu.get(2, 0.0) < 0:
            out.append(f"mu_2 = {mu[2]!r} < 0")
        for k in sorted(nu):
            if nu[k] < 0:
                out.append(f"nu_{k} = {nu[k]!r} < 0")
            if k in mu and nu[k] < abs(mu[k]) * (1 - rel) - 1e-300:
                out.append(f"nu_{k} = {nu[k]!r} < |mu_{k}| = {abs(mu[k])!r}")
        ks = [k for k in sorted(nu) if k >= 1]
        for r, s in zip(ks, ks[1:]):
            lhs, rhs = nu[s] ** (1.0 / s), nu[r] ** (1.0 / r)
            if lhs < rhs - rel * rhs:
                out.append(f"Lyapunov broken: nu_{s}^(1/{s}) = {lhs!r} < nu_{r}^(1/{r}) = {rhs!r}")
        return out


class Distribution:
    """Common interface. Subclasses are immutable after construction."""

    discrete = False

    def __post_init__(self) -> None:
        self._validate()
        object.__setattr__(self, "moments", MomentTable(self))

    def _validate(self) -> None:  # pragma: no cover - overridden
        pass

    # -- first two moments -------------------------------------------------
    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        return self.central_moment(2)

    def std(self) -> float:
        return math.sqrt(self.variance())

    # -- moment tables -------------------------------------------------------
    def central_moment(self, k: int) -> float:
        _check_order(k)
        return self.moments.central_moment(k)

    def abs_central_moment(self, k: int) -> float:
        _check_order(k)
        return self.moments.abs_moment(k)

    def raw_moment(self, j: int) -> float:
        """E[X^j] from central moments by the finite binomial theorem."""
        _check_order(j)
        m = self.mean()
        terms = [math.comb(j, i) * self.central_moment(i) * m ** (j - i) for i in range(j + 1)]
        return math.fsum(terms)

    def is_degenerate(self) -> bool:
        """True for a point mass, detected by a vanishing fourth absolute moment."""
        return self.abs_central_moment(4) == 0.0

    # -- geometry ----------------------------------------------------------
    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def evaluation_region(self) -> tuple[float, float]:
        """Support, clipped to ``m +/- 8 sd`` when the support is unbounded."""
        lo, hi = self.support
        if math.isinf(lo) or math.isinf(hi):
            m, sd = self.mean(), self.std()
            lo = max(lo, m - 8 * sd)
            hi = min(hi, m + 8 * sd)
        return lo, hi

    def integration_range(self) -> tuple[float, float, list[tuple[float, float]]]:
        """Finite main range for quadrature plus tail pieces used for truncation accounting."""
        lo, hi = self.support
        return lo, hi, []

    def pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, seed: int, index: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def label(self) -> str:
        raise NotImplementedError

    def _central(self, k: int) -> float:
        raise NotImplementedError

    def _absolute(self, k: int) -> float:
        raise NotImplementedError


def _check_order(k: int) -> None:
    if k < 0 or int(k) != k:
        raise ValueError(f"moment order must be a nonnegative integer, got {k!r}")


def _fmt(v: float) -> str:
    # shortest round-trip text, without a trailing ".0" on integers
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


@dataclass(frozen=True, eq=False)
class DiscreteFinite(Distribution):
    points: tuple[float, ...]
    probs: tuple[float, ...]
    discrete = True

    def __init__(self, points: Sequence[float], probs: Sequence[float]) -> None:
        object.__setattr__(self, "points", tuple(float(p) for p in points))
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))
        self.__post_init__()

    def _validate(self) -> None:
        if len(self.points) == 0 or len(self.points) != len(self.probs):
            raise InvalidDistribution("points and probs must be nonempty and of equal length")
        if len(set(self.points)) != len(self.points):
            raise InvalidDistribution("points must be distinct")
        if not all(math.isfinite(p) for p in self.points):
            raise InvalidDistribution("points must be finite")
        if any(not (p >= 0) for p in self.probs):
            raise InvalidDistribution("probabilities must be nonnegative")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > 1e-12:
            raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")

    @property
    def x(self) -> np.ndarray:
        return np.array(self.points)

    @property
    def p(self) -> np.ndarray:
        return np.array(self.probs)

    def mean(self) -> float:
        return math.fsum(p * x for x, p in zip(self.points, self.probs))

    def _central(self, k: int) -> float:
        if k == 0:
            return 1.0
        m = self.mean()
        return math.fsum(p * (x - m) ** k for x, p in zip(self.points, self.probs))

    def _absolute(self, k: int) -> float:
        if k == 0:
            return 1.0
        m = self.mean()
        return math.fsum(p * abs(x - m) ** k for x, p in zip(self.points, self.probs))

    @property
    def support(self) -> tuple[float, float]:
        return min(self.points), max(self.points)

    def sample(self, seed: int, index: np.ndarray) -> np.ndarray:
        u = uniforms(seed, index, 0)
        cdf = np.cumsum(self.p)
        pos = np.searchsorted(cdf, u * cdf[-1], side="right")
        return self.x[np.minimum(pos, len(self.points) - 1)]

    @property
    def label(self) -> str:
        body = ",".join(f"{_fmt(x)}:{_fmt(p)}" for x, p in zip(self.points, self.probs))
        return f"discrete({body})"


def point_mass(c: float) -> DiscreteFinite:
    return DiscreteFinite([c], [1.0])


@dataclass(frozen=True, eq=False)
class Uniform(Distribution):
    a: float
    b: float

    def _validate(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.b > self.a):
            raise InvalidDistribution("uniform(a, b) needs finite a < b")

    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def _central(self, k: int) -> float:
        if k % 2:
            return 0.0
        h = 0.5 * (self.b - self.a)
        return h**k / (k + 1)

    def _absolute(self, k: int) -> float:
        h = 0.5 * (self.b - self.a)
        return h**k / (k + 1)

    @property
    def support(self) -> tuple[float, float]:
        return self.a, self.b

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def sample(self, seed: int, index: np.ndarray) -> np.ndarray:
        return self.a + (self.b - self.a) * uniforms(seed, index, 0)

    @property
    def label(self) -> str:
        return f"uniform({_fmt(self.a)},{_fmt(self.b)})"


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


@dataclass(frozen=True, eq=False)
class Normal(Distribution):
    mu: float
    sigma: float

    TRUNCATE = 12.0

    def _validate(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidDistribution("normal(mu, sigma) needs finite mu and sigma > 0")

    def mean(self) -> float:
        return float(self.mu)

    def _central(self, k: int) -> float:
        if k % 2:
            return 0.0
        return _double_factorial(k - 1) * self.sigma**k

    def _absolute(self, k: int) -> float:
        if k % 2 == 0:
            return _double_factorial(k - 1) * self.sigma**k
        # sigma^k 2^(k/2) Gamma((k+1)/2) / sqrt(pi), with Gamma((k+1)/2) = ((k-1)/2)!
        return self.sigma**k * 2 ** (k / 2) * math.factorial((k - 1) // 2) / math.sqrt(math.pi)

    @property
    def support(self) -> tuple[float, float]:
        return -math.inf, math.inf

    def integration_range(self):
        w = self.TRUNCATE * self.sigma
        lo, hi = self.mu - w, self.mu + w
        return lo, hi, [(lo - w, lo), (hi, hi + w)]

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    def sample(self, seed: int, index: np.ndarray) -> np.ndarray:
        u1 = uniforms(seed, index, 0)
        u2 = uniforms(seed, index, 1)
        return self.mu + self.sigma * np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    @property
    def label(self) -> str:
        return f"normal({_fmt(self.mu)},{_fmt(self.sigma)})"


def _subfactorial(k: int) -> int:
    d = 1  # !0
    for i in range(1, k + 1):
        d = i * d + (-1) ** i
    return d


def _unit_power_exp_integral(k: int) -> float:
    """int_0^1 u^k e^u du as a positive series sum_j 1 / (j! (k+j+1))."""
    terms = []
    j, fact = 0, 1.0
    while True:
        t = 1.0 / (fact * (k + j + 1))
        terms.append(t)
        if t < 1e-18 * terms[0]:
            break
        j += 1
        fact *= j
    return math.fsum(terms)


@dataclass(frozen=True, eq=False)
class Exponential(Distribution):
    rate: float

    TRUNCATE = 40.0  # standard deviations beyond the mean

    def _validate(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise InvalidDistribution("exponential(rate) needs rate > 0")

    def mean(self) -> float:
        return 1.0 / self.rate

    def _central(self, k: int) -> float:
        # E[(Y-1)^k] for Y ~ Exp(1) is the subfactorial !k
        return _subfactorial(k) / self.rate**k

    def _absolute(self, k: int) -> float:
        # E|Y-1|^k = e^{-1} (int_0^1 u^k e^u du + k!)
        if k == 0:
            return 1.0
        value = math.exp(-1.0) * (_unit_power_exp_integral(k) + math.factorial(k))
        return value / self.rate**k

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, math.inf

    def integration_range(self):
        hi = (1.0 + self.TRUNCATE) / self.rate
        return 0.0, hi, [(hi, 2 * hi)]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    def sample(self, seed: int, index: np.ndarray) -> np.ndarray:
        return -np.log(uniforms(seed, index, 0)) / self.rate

    @property
    def label(self) -> str:
        return f"exponential({_fmt(self.rate)})"


@dataclass(frozen=True, eq=False)
class CustomDensity(Distribution):
    """A density given as an expression in x on a finite interval.

    Densities whose integral is within 1e-3 of one are rescaled to integrate
    to exactly one; anything further off is rejected.
    """

    density: Expr
    lo: float
    hi: float
    norm: float = field(default=1.0, init=False)

    MAX_ATTEMPTS = 2000

    def __init__(self, density, lo: float, hi: float) -> None:
        object.__setattr__(self, "density", as_expr(density))
        object.__setattr__(self, "lo", float(lo))
        object.__setattr__(self, "hi", float(hi))
        object.__setattr__(self, "norm", 1.0)
        object.__setattr__(self, "_cache", {})
        self.__post_init__()

    def _validate(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.hi > self.lo):
            raise InvalidDistribution("density support must be a finite interval lo < hi")
        grid = chebyshev_grid(self.lo, self.hi)
        try:
            values = evaluate(self.density, grid)
        except DomainError as exc:
            raise InvalidDistribution(f"density undefined on its support: {exc}") from None
        if not np.all(np.isfinite(values)):
            raise InvalidDistribution("density is not finite on its support")
        if np.any(values < 0):
            raise InvalidDistribution("density is negative somewhere on its support")
        try:
            z = quad.integrate(self._raw_pdf, self.lo, self.hi,
                               abs_tol=1e-14, rel_tol=1e-13).value
        except (QuadratureFailure, DomainError) as exc:
            raise InvalidDistribution(f"cannot integrate density: {exc}") from None
        if abs(z - 1.0) >= 1e-3:
            raise InvalidDistribution(f"density integrates to {z!r}, not 1")
        object.__setattr__(self, "norm", z)
        object.__setattr__(self, "envelope", 1.25 * float(np.max(values)) / z)

    def _raw_pdf(self, x):
        return evaluate(self.density, x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = evaluate(self.density, x[inside]) / self.norm
        return out

    def _integrate(self, f, abs_tol: float, break_at_mean: bool = True) -> float:
        bps = (self.mean(),) if break_at_mean else ()
        return quad.integrate(lambda x: f(x) * self.pdf(x), self.lo, self.hi,
                              abs_tol=abs_tol, rel_tol=MOMENT_TOL, breakpoints=bps).value

    def mean(self) -> float:
        m = self._cache.get("mean")
        if m is None:
            scale = max(abs(self.lo), abs(self.hi))
            m = quad.integrate(lambda x: x * self.pdf(x), self.lo, self.hi,
                               abs_tol=MOMENT_TOL * scale, rel_tol=MOMENT_TOL).value
            self._cache["mean"] = m
        return m

    def _absolute(self, k: int) -> float:
        if k == 0:
            return 1.0
        m = self.mean()
        return self._integrate(lambda x: np.abs(x - m) ** k, abs_tol=1e-300)

    def _central(self, k: int) -> float:
        if k == 0:
            return 1.0
        if k == 1:
            return 0.0
        m = self.mean()
        scale = self.abs_central_moment(k)
        if k % 2 == 0:
            return scale
        return self._integrate(lambda x: (x - m) ** k, abs_tol=max(MOMENT_TOL * scale, 1e-300))

    @property
    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    def sample(self, seed: int, index: np.ndarray) -> np.ndarray:
        index = np.asarray(index, dtype=np.uint64)
        out = np.full(index.shape, np.nan)
        pending = np.arange(index.size)
        for attempt in range(self.MAX_ATTEMPTS):
            idx = index[pending]
            x = self.lo + (self.hi - self.lo) * uniforms(seed, idx, 2 * attempt + 2)
            v = uniforms(seed, idx, 2 * attempt + 3) * self.envelope
            ok = v <= self.pdf(x)
            out[pending[ok]] = x[ok]
            pending = pending[~ok]
            if pending.size == 0:
                return out
        raise InvalidDistribution("rejection sampler did not terminate")

    @property
    def label(self) -> str:
        return f"density({to_text(self.density)}; {_fmt(self.lo)}, {_fmt(self.hi)})"


# ---------------------------------------------------------------------------
# Distribution strings: "discrete(1:0.5,3:0.5)", "uniform(0,1)", "normal(0,0.1)",
# "exponential(2)", "density(expr; lo, hi)".

_DIST_RE = re.compile(r"^\s*([a-z]+)\s*\((.*)\)\s*$", re.DOTALL)


def _number(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidDistribution(f"{what}: {text.strip()!r} is not a number") from None


def parse_distribution(text: str) -> Distribution:
    """Build a distribution from its command-line string."""
    m = _DIST_RE.match(text)
    if m is None:
        raise InvalidDistribution(f"cannot parse distribution {text!r}")
    name, body = m.group(1), m.group(2)
    if name == "density":
        expr_text, sep, bounds = body.rpartition(";")
        if not sep:
            raise InvalidDistribution("density syntax is density(expr; lo, hi)")
        parts = bounds.split(",")
        if len(parts) != 2:
            raise InvalidDistribution("density needs exactly two bounds")
        lo, hi = (_number(p, "density bound") for p in parts)
        return CustomDensity(expr_text, lo, hi)
    args = [a for a in body.split(",")]
    if name == "discrete":
        points, probs = [], []
        for item in args:
            x, sep, p = item.partition(":")
            if not sep:
                raise InvalidDistribution(f"discrete entry {item.strip()!r} is not point:prob")
            points.append(_number(x, "discrete point"))
            probs.append(_number(p, "discrete probability"))
        return DiscreteFinite(points, probs)
    values = [_number(a, name) for a in args]
    arity = {"uniform": 2, "normal": 2, "exponential": 1}
    if name not in arity:
        raise InvalidDistribution(f"unknown distribution family {name!r}")
    if len(values) != arity[name]:
        raise InvalidDistribution(f"{name} takes {arity[name]} parameter(s), got {len(values)}")
    if name == "uniform":
        return Uniform(*values)
    if name == "normal":
        return Normal(*values)
    return Exponential(*values)


@dataclass(frozen=True)
class ThirdMomentIdentity:
    lhs: float
    rhs: float
    residual: float


def third_moment_identity(d: Distribution) -> ThirdMomentIdentity:
    """Compare E[X^3] against m^3 + 3 m Var[X].

    The relation holds when the third central moment vanishes; the caller
    decides whether that hypothesis applies.
    """
    lhs = d.raw_moment(3)
    m, var = d.mean(), d.variance()
    rhs = math.fsum([m**3, 3.0 * m * var])
    return ThirdMomentIdentity(lhs, rhs, lhs - rhs)
