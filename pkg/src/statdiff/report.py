"""Assemble approximation reports, error-decay sweeps and moment checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from . import __version__
from .approx import (DEFAULT_VERDICT_TOL, approx_mean, approx_variance_first,
                     approx_variance_second, exactness_verdict)
from .bounds import (BoundKind, bound_bounded_derivative, bound_class_l, bound_lyapunov,
                     bound_moment_bounded_derivative, bound_peano, lyapunov_check,
                     peano_remainder)
from .dist import Distribution, parse_distribution, third_moment_identity
from .errors import DomainError, HypothesisFailure
from .expr import parse, to_text
from .oracle import DEFAULT_TOL, mc_mean, oracle_mean, oracle_variance


@dataclass
class ApproxReport:
    function: str
    dist: str
    orders: list[int]
    mean_approx: list[float]
    oracle_mean: float
    true_error: list[float]
    variance: dict
    bounds: list[dict]
    verdict: dict
    seed: int
    tolerances: dict
    mc: dict | None = None
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def _bound_entry(kind: BoundKind, compute, true_error: float) -> dict:
    try:
        bound = compute()
    except HypothesisFailure as exc:
        bound = exc.bound
    except DomainError as exc:
        return {"kind": kind.value, "value": None, "applicable": False,
                "hypotheses": [], "error": str(exc), "dominates_true_error": None}
    entry = bound.to_dict()
    if kind is BoundKind.PEANO_REMAINDER:
        # the remainder is the error itself, not an upper bound on it
        entry["dominates_true_error"] = None
    else:
        entry["dominates_true_error"] = bound.dominates(true_error)
    return entry


def build_report(function: str, dist: str, *, max_order: int = 4, seed: int = 0,
                 oracle_tol: float = DEFAULT_TOL, verdict_tol: float = DEFAULT_VERDICT_TOL,
                 variance_order: int = 2, bound_m: float | None = None, moment_order: int = 3,
                 mc_samples: int = 0) -> ApproxReport:
    """Run every approximation, the oracle, the bounds and the verdict for one (g, X)."""
    g = parse(function)
    d = parse_distribution(dist)
    if max_order < 2:
        raise ValueError("max-order must be at least 2")
    orders = list(range(2, max_order + 1))
    means = [approx_mean(g, d, k) for k in orders]
    truth = oracle_mean(g, d, oracle_tol)
    errors = [abs(truth - a) for a in means]
    err2 = errors[0]

    variance = {
        "first": approx_variance_first(g, d),
        "second": approx_variance_second(g, d, variance_order),
        "second_order": variance_order,
        "oracle": oracle_variance(g, d, oracle_tol),
    }

    bounds = [
        _bound_entry(BoundKind.PEANO_REMAINDER, lambda: bound_peano(g, d, 2, tol=oracle_tol), err2),
        _bound_entry(BoundKind.CLASS_L, lambda: bound_class_l(g, d, tol=oracle_tol), err2),
        _bound_entry(BoundKind.LYAPUNOV, lambda: bound_lyapunov(g, d, moment_order, strict=False), err2),
    ]
    if bound_m is not None:
        bounds.append(_bound_entry(
            BoundKind.BOUNDED_DERIVATIVE,
            lambda: bound_bounded_derivative(g, d, bound_m, tol=oracle_tol, strict=False), err2))
        bounds.append(_bound_entry(
            BoundKind.LYAPUNOV_BOUNDED_DERIVATIVE,
            lambda: bound_moment_bounded_derivative(g, d, bound_m, moment_order, strict=False), err2))

    verdict = exactness_verdict(g, d, verdict_tol, oracle_tol=oracle_tol).to_dict()
    mc = None
    if mc_samples:
        est = mc_mean(g, d, mc_samples, seed)
        mc = {"estimate": est.estimate, "std_error": est.std_error, "samples": est.samples}

    return ApproxReport(
        function=to_text(g), dist=d.label, orders=orders, mean_approx=means,
        oracle_mean=truth, true_error=errors, variance=variance, bounds=bounds,
        verdict=verdict, seed=seed,
        tolerances={"oracle": oracle_tol, "verdict": verdict_tol}, mc=mc,
    )


@dataclass
class SweepRow:
    order: int
    approximation: float
    true_error: float
    peano_remainder: float


@dataclass
class Sweep:
    function: str
    dist: str
    oracle_mean: float
    rows: list[SweepRow]
    seed: int
    tolerances: dict
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def build_sweep(function: str, dist: str, orders, *, seed: int = 0,
                oracle_tol: float = DEFAULT_TOL) -> Sweep:
    """One row per truncation order: approximation, |true error|, Peano remainder."""
    g = parse(function)
    d = parse_distribution(dist)
    truth = oracle_mean(g, d, oracle_tol)
    rows = []
    for k in orders:
        a = approx_mean(g, d, k)
        rows.append(SweepRow(k, a, abs(truth - a), peano_remainder(g, d, k, tol=oracle_tol)))
    return Sweep(to_text(g), d.label, truth, rows, seed, {"oracle": oracle_tol})


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class MomentCheckReport:
    dist: str
    max_k: int
    central: dict[int, float]
    absolute: dict[int, float]
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["central"] = {str(k): v for k, v in self.central.items()}
        out["absolute"] = {str(k): v for k, v in self.absolute.items()}
        out["passed"] = self.passed
        return out


def run_checks(dist: str | Distribution, max_k: int = 8, tol: float = 1e-9) -> MomentCheckReport:
    """Moment-table invariants, the Lyapunov chain and the third-moment identity."""
    d = parse_distribution(dist) if isinstance(dist, str) else dist
    if max_k < 2:
        raise ValueError("max-k must be at least 2")
    d.moments.ensure(max_k)
    checks = []
    problems = d.moments.violations(rel=tol)
    checks.append(CheckResult("moment table invariants", not problems, "; ".join(problems) or "ok"))

    chain_ok, worst = True, []
    for k in range(1, max_k):
        res = lyapunov_check(d, k, k + 1)
        if not res.holds:
            chain_ok = False
            worst.append(f"k={k}: {res.lhs!r} < {res.rhs!r}")
    checks.append(CheckResult(f"Lyapunov chain k=1..{max_k}", chain_ok, "; ".join(worst) or "nondecreasing"))

    if d.abs_central_moment(4) == 0.0:
        checks.append(CheckResult("degenerate => zero variance", d.variance() == 0.0,
                                  f"variance {d.variance()!r}"))

    mu2, mu3 = d.variance(), d.central_moment(3)
    if abs(mu3) <= tol * (1.0 + mu2**1.5):
        ident = third_moment_identity(d)
        ok = abs(ident.residual) <= 1e-8 * (1.0 + abs(ident.lhs))
        checks.append(CheckResult("third-moment identity E[X^3] = m^3 + 3 m Var", ok,
                                  f"lhs {ident.lhs!r}, rhs {ident.rhs!r}, residual {ident.residual!r}"))
    else:
        checks.append(CheckResult("third-moment identity", True,
                                  f"skipped: mu_3 = {mu3!r} is not zero"))

    return MomentCheckReport(
        dist=d.label, max_k=max_k,
        central={k: d.central_moment(k) for k in range(max_k + 1)},
        absolute={k: d.abs_central_moment(k) for k in range(max_k + 1)},
        checks=checks,
    )

