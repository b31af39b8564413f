"""Command-line front end.

Subcommands::

    statdiff report --function "exp(x)" --dist "normal(0,0.1)" --max-order 4
    statdiff check  --dist "uniform(0,1)" --max-k 8
    statdiff sweep  --function "exp(x)" --dist "uniform(0,1)" --orders 2..6

Exit codes: 0 success, 1 a check failed, 2 bad input (syntax or
distribution string), 3 domain or hypothesis failure, 4 quadrature failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .errors import (DomainError, ExpressionSyntaxError, HypothesisFailure, InvalidDistribution,
                     NonFinite, QuadratureFailure)
from .report import build_report, build_sweep, run_checks

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_DOMAIN, EXIT_QUADRATURE = 0, 1, 2, 3, 4


def fmt17(value) -> str:
    """Shared numeric formatting for CSV: 17 significant digits (round-trips a double)."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def _json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt17(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# report


def report_csv_rows(rep: dict) -> list[list]:
    rows = []
    for k, a, e in zip(rep["orders"], rep["mean_approx"], rep["true_error"]):
        rows.append(["mean_approx", k, a])
        rows.append(["true_error", k, e])
    rows.append(["oracle_mean", None, rep["oracle_mean"]])
    rows.append(["variance_first", None, rep["variance"]["first"]])
    rows.append(["variance_second", rep["variance"]["second_order"], rep["variance"]["second"]])
    rows.append(["oracle_variance", None, rep["variance"]["oracle"]])
    for b in rep["bounds"]:
        rows.append([f"bound:{b['kind']}", None, b["value"]])
    rows.append(["verdict_residual", None, rep["verdict"]["residual"]])
    if rep.get("mc"):
        rows.append(["mc_estimate", None, rep["mc"]["estimate"]])
        rows.append(["mc_std_error", None, rep["mc"]["std_error"]])
    return rows


def _report_table(rep: dict) -> str:
    out = [
        f"statdiff {rep['version']}  g(x) = {rep['function']}   X ~ {rep['dist']}",
        f"oracle tol {rep['tolerances']['oracle']:g}, verdict tol {rep['tolerances']['verdict']:g}, "
        f"seed {rep['seed']}",
        "",
        f"{'order':>5}  {'mean approx':>22}  {'|true error|':>12}",
    ]
    for k, a, e in zip(rep["orders"], rep["mean_approx"], rep["true_error"]):
        out.append(f"{k:>5}  {a:>22.15g}  {e:>12.4e}")
    out.append(f"{'oracle':>5}  {rep['oracle_mean']:>22.15g}")
    v = rep["variance"]
    out += [
        "",
        f"variance  first-order {v['first']:.12g}   second (order {v['second_order']}) "
        f"{v['second']:.12g}   oracle {v['oracle']:.12g}",
    ]
    if rep.get("mc"):
        mc = rep["mc"]
        out.append(f"monte carlo  {mc['estimate']:.12g} +/- {mc['std_error']:.3g} "
                   f"({mc['samples']} samples)")
    out += ["", "error bounds (diagnostic, big-O constant 1):"]
    for b in rep["bounds"]:
        value = "n/a" if b["value"] is None else f"{b['value']:.4e}"
        flag = "applicable" if b["applicable"] else "NOT applicable"
        dom = b.get("dominates_true_error")
        dom_txt = "" if dom is None else ("  dominates |error|" if dom else "  BELOW |error|")
        out.append(f"  {b['kind']:<26} {value:>12}  {flag}{dom_txt}")
        for h in b["hypotheses"]:
            if not h["passed"]:
                out.append(f"      failed: {h['name']} ({h['detail']})")
        if b.get("error"):
            out.append(f"      error: {b['error']}")
    verdict = rep["verdict"]
    out += ["", f"verdict: {verdict['status']}  (residual {verdict['residual']:.4e})"]
    return "\n".join(out) + "\n"


def cmd_report(args) -> int:
    rep = build_report(
        args.function, args.dist, max_order=args.max_order, seed=args.seed,
        oracle_tol=args.oracle_tol, verdict_tol=args.verdict_tol,
        variance_order=args.variance_order, bound_m=args.bound_m,
        moment_order=args.moment_order, mc_samples=args.mc_samples,
    ).to_dict()
    if args.format == "json":
        args.out.write(_json(rep) + "\n")
    elif args.format == "csv":
        args.out.write(_csv(["quantity", "order", "value"], report_csv_rows(rep)))
    else:
        args.out.write(_report_table(rep))
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def parse_orders(text: str) -> list[int]:
    """``"2..6"`` -> [2, 3, 4, 5, 6]; ``"3"`` -> [3]; ``"2,4,6"`` -> [2, 4, 6]."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            orders = list(range(int(lo), int(hi) + 1))
        else:
            orders = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid order range {text!r}") from None
    if not orders or min(orders) < 2:
        raise argparse.ArgumentTypeError("orders must be nonempty and >= 2")
    return orders


def cmd_sweep(args) -> int:
    sweep = build_sweep(args.function, args.dist, args.orders, seed=args.seed,
                        oracle_tol=args.oracle_tol).to_dict()
    rows = sweep["rows"]
    if args.format == "json":
        args.out.write(_json(sweep) + "\n")
    elif args.format == "csv":
        args.out.write(_csv(
            ["order", "approximation", "true_error", "peano_remainder"],
            [[r["order"], r["approximation"], r["true_error"], r["peano_remainder"]] for r in rows],
        ))
    else:
        lines = [f"g(x) = {sweep['function']}   X ~ {sweep['dist']}   oracle {sweep['oracle_mean']:.15g}",
                 f"{'order':>5}  {'approximation':>22}  {'|true error|':>12}  {'peano remainder':>16}"]
        for r in rows:
            lines.append(f"{r['order']:>5}  {r['approximation']:>22.15g}  "
                         f"{r['true_error']:>12.4e}  {r['peano_remainder']:>16.4e}")
        args.out.write("\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# check


def cmd_check(args) -> int:
    rep = run_checks(args.dist, args.max_k, args.tol)
    if args.format == "json":
        args.out.write(_json(rep.to_dict()) + "\n")
    else:
        lines = [f"X ~ {rep.dist}", f"{'k':>3}  {'mu_k':>24}  {'nu_k':>24}"]
        for k in range(rep.max_k + 1):
            lines.append(f"{k:>3}  {rep.central[k]:>24.17g}  {rep.absolute[k]:>24.17g}")
        lines.append("")
        for c in rep.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        args.out.write("\n".join(lines) + "\n")
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------


def _default_seed() -> int:
    env = os.environ.get("STATDIFF_SEED")
    return int(env) if env else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="statdiff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"statdiff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dist", required=True, help='e.g. "normal(0,0.1)" or "discrete(1:0.5,3:0.5)"')
    common.add_argument("--seed", type=int, default=None,
                        help="Monte Carlo seed (default: $STATDIFF_SEED or 0)")
    common.add_argument("--oracle-tol", type=float, default=1e-10)

    p = sub.add_parser("report", parents=[common], help="approximations, oracle, bounds, verdict")
    p.add_argument("--function", required=True)
    p.add_argument("--max-order", type=int, default=4)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--verdict-tol", type=float, default=1e-9)
    p.add_argument("--variance-order", type=int, default=2)
    p.add_argument("--bound-m", type=float, default=None,
                   help="derivative cap M; enables the bounded-derivative bounds")
    p.add_argument("--moment-order", type=int, default=3,
                   help="absolute moment order n for the Lyapunov bounds")
    p.add_argument("--mc-samples", type=int, default=100_000, help="0 disables Monte Carlo")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", parents=[common], help="error decay across truncation orders")
    p.add_argument("--function", required=True)
    p.add_argument("--orders", type=parse_orders, default=parse_orders("2..6"))
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="moment-table invariants and identities")
    p.add_argument("--dist", required=True)
    p.add_argument("--max-k", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.out = out
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    try:
        return args.func(args)
    except ExpressionSyntaxError as exc:
        err.write(f"error: syntax error: {exc.message} at offset {exc.offset}\n")
        return EXIT_INPUT
    except (DomainError, HypothesisFailure) as exc:
        kind = "domain error" if isinstance(exc, DomainError) else "hypothesis failure"
        err.write(f"error: {kind}: {exc}\n")
        return EXIT_DOMAIN
    except (QuadratureFailure, NonFinite) as exc:
        err.write(f"error: quadrature failure: {exc}\n")
        return EXIT_QUADRATURE
    except (InvalidDistribution, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT

if __name__ == "__main__":
    sys.exit(main())
