from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from statdiff.approx import approx_mean
from statdiff.bounds import (BoundKind, bound_bounded_derivative, bound_class_l, bound_lyapunov,
                             bound_moment_bounded_derivative, bound_peano, class_l_membership,
                             lyapunov_check, peano_remainder)
from statdiff.dist import Normal, Uniform, parse_distribution, point_mass
from statdiff.errors import HypothesisFailure
from statdiff.expr import parse
from statdiff.oracle import oracle_mean

from conftest import SUITE

FUNCTIONS = ["exp(x)", "sin(x)", "ln(1+x)"]
PEANO_DISTS = ["uniform(0,1)", "normal(0.5,0.1)", "discrete(0:0.3,0.5:0.4,1:0.3)"]


def test_peano_uniform_exp_closed_form():
    # E[e^X] - (e^m + e^m / 24) on U(0, 1)
    expected = (math.e - 1) - math.exp(0.5) * (1 + 1 / 24)
    assert peano_remainder(parse("exp(x)"), Uniform(0, 1), 2) == pytest.approx(expected, rel=1e-10)


def test_peano_vanishes_for_cubic_on_symmetric():
    assert abs(peano_remainder(parse("x^3"), Normal(0, 1), 2)) < 1e-12


@pytest.mark.parametrize("text", FUNCTIONS)
@pytest.mark.parametrize("dist_text", PEANO_DISTS)
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_peano_reconstructs_expectation(text, dist_text, n):
    g, d = parse(text), parse_distribution(dist_text)
    truth = oracle_mean(g, d)
    total = approx_mean(g, d, n) + peano_remainder(g, d, n)
    assert abs(total - truth) <= 1e-9 * (1 + abs(truth))


@pytest.mark.parametrize("text", FUNCTIONS)
def test_remainder_shrinks_with_order(text):
    g, d = parse(text), parse_distribution("uniform(0,1)")
    r = [abs(peano_remainder(g, d, n)) for n in (2, 4, 6, 8)]
    assert all(b < a for a, b in zip(r, r[1:]))


def test_point_mass_remainder_is_zero():
    assert peano_remainder(parse("exp(x)"), point_mass(0.7), 2) == 0.0
    b = bound_class_l(parse("exp(x)"), point_mass(0.7))
    assert b.value == 0.0 and b.applicable


def test_bound_peano_reports_signed_value():
    b = bound_peano(parse("exp(x)"), Uniform(0, 1))
    assert b.kind is BoundKind.PEANO_REMAINDER
    assert b.signed is not None and b.signed > 0  # exp is convex
    assert b.value == abs(b.signed)


@pytest.mark.parametrize("dist_text", ["normal(0,0.1)", "uniform(0,0.5)"])
def test_class_l_and_lyapunov_dominate_on_small_spread(dist_text):
    g, d = parse("exp(x)"), parse_distribution(dist_text)
    err = abs(oracle_mean(g, d) - approx_mean(g, d, 2))
    cl = bound_class_l(g, d)
    ly = bound_lyapunov(g, d, 3)
    assert cl.applicable and ly.applicable
    assert all(c.passed for c in cl.hypothesis_report + ly.hypothesis_report)
    assert cl.value >= 10 * err
    assert ly.value >= 10 * err


def test_class_l_value_against_scipy():
    d = Normal(0.0, 0.1)
    ref = sp_integrate.quad(lambda x: abs(x) ** 3 * math.exp(x) * math.exp(-50 * x * x)
                            / (0.1 * math.sqrt(2 * math.pi)), -2, 2, points=[0], epsabs=1e-15)[0]
    assert bound_class_l(parse("exp(x)"), d).value == pytest.approx(ref, rel=1e-9)


def test_class_l_trivial_for_quadratic():
    b = bound_class_l(parse("x^2 - 3*x"), Uniform(-1, 1))
    assert b.applicable and b.value == 0.0


@pytest.mark.parametrize("text, region, member", [
    ("exp(x)", (-3, 3), True),
    ("x^2+1", (-1, 1), False),
    ("1/x", (0.1, 2), False),
    ("exp(2*x)*(1+x^3)", (0, 2), True),
    ("sin(x)", (0, 1), False),
])
def test_class_l_membership(text, region, member):
    assert bool(class_l_membership(parse(text), region)) is member


def test_class_l_not_applicable_is_returned_not_raised():
    b = bound_class_l(parse("1/x"), Uniform(0.1, 2))
    assert not b.applicable


def test_bounded_derivative_sin_uniform():
    b = bound_bounded_derivative(parse("sin(x)"), Uniform(0, 1), 1.0)
    # 2 * int_0^(1/2) u^3 e^u du, with antiderivative e^u (u^3 - 3u^2 + 6u - 6)
    closed = 2 * (math.exp(0.5) * (0.125 - 0.75 + 3 - 6) + 6)
    assert b.applicable
    assert b.value == pytest.approx(closed, rel=1e-10)
    g, d = parse("sin(x)"), Uniform(0, 1)
    assert b.dominates(oracle_mean(g, d) - approx_mean(g, d, 2))


def test_bounded_derivative_rejects_large_derivatives():
    with pytest.raises(HypothesisFailure) as info:
        bound_bounded_derivative(parse("exp(x)"), Normal(0, 1), 1.0)
    assert not info.value.bound.applicable
    lenient = bound_bounded_derivative(parse("exp(x)"), Normal(0, 1), 1.0, strict=False)
    assert not lenient.applicable


def test_moment_bounded_derivative_value():
    b = bound_moment_bounded_derivative(parse("sin(x)"), Uniform(0, 1), 1.0, n=4)
    nu4 = 1 / 80
    assert b.value == pytest.approx(nu4 ** 0.75 * math.exp(nu4 ** 0.25), rel=1e-13)
    assert b.value == pytest.approx(0.052227, rel=1e-4)
    assert b.kind is BoundKind.LYAPUNOV_BOUNDED_DERIVATIVE


def test_moment_bounded_derivative_needs_n_at_least_3():
    with pytest.raises(ValueError):
        bound_moment_bounded_derivative(parse("sin(x)"), Uniform(0, 1), 1.0, n=2)


def test_lyapunov_exp_normal_value():
    d = Normal(0.0, 0.1)
    c = d.abs_central_moment(3) ** (1 / 3)
    b = bound_lyapunov(parse("exp(x)"), d, 3)
    assert b.value == pytest.approx(c**3 * math.exp(c), rel=1e-14)


def test_lyapunov_sign_gate():
    # g''' = sin >= 0 on [0, pi] but g'''' = cos changes sign there
    d = Uniform(0.0, math.pi)
    assert bound_lyapunov(parse("cos(x)"), d, 3).applicable
    with pytest.raises(HypothesisFailure):
        bound_lyapunov(parse("cos(x)"), d, 4)


def test_lyapunov_rejects_n_below_3():
    with pytest.raises(ValueError):
        bound_lyapunov(parse("exp(x)"), Normal(0, 1), 2)


@pytest.mark.parametrize("dist_text", SUITE)
@pytest.mark.parametrize("r, s", [(1, 2), (2, 3), (3, 8), (1, 8)])
def test_lyapunov_check(dist_text, r, s):
    res = lyapunov_check(parse_distribution(dist_text), r, s)
    assert res.holds and res.lhs >= res.rhs * (1 - 1e-9)


def test_lyapunov_check_argument_order():
    with pytest.raises(ValueError):
        lyapunov_check(Uniform(0, 1), 3, 2)


def test_bound_to_dict():
    out = bound_lyapunov(parse("exp(x)"), Normal(0, 0.1)).to_dict()
    assert out["kind"] == "Lyapunov"
    assert out["applicable"] is True
    assert {h["name"] for h in out["hypotheses"]} >= {"g^(3) >= 0", "g'''(C+m) >= 0"}
    assert np.isfinite(out["value"])
