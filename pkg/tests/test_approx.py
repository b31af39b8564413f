from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statdiff.approx import (VerdictStatus, approx_mean, approx_variance_first,
                             approx_variance_second, exactness_verdict)
from statdiff.dist import Normal, Uniform, parse_distribution, point_mass
from statdiff.expr import Add, Const, Mul, Pow, X, parse
from statdiff.oracle import oracle_mean, oracle_variance

from conftest import SUITE, SYMMETRIC


def test_exp_normal_two_term():
    assert approx_mean(parse("exp(x)"), Normal(0.0, 0.1), 2) == 1.005


def test_cubic_discrete_order3():
    d = parse_distribution("discrete(1:0.5,3:0.5)")
    assert approx_mean(parse("x^3"), d, 3) == 14.0


def test_first_order_variance_example():
    assert approx_variance_first(parse("exp(x)"), Normal(0.0, 0.1)) == pytest.approx(0.01,
                                                                                    rel=1e-15)


def test_second_order_variance_below_oracle():
    g, d = parse("exp(x)"), Normal(0.0, 0.1)
    v2 = approx_variance_second(g, d, 2)
    assert v2 == pytest.approx(0.009975, rel=1e-12)
    assert v2 < oracle_variance(g, d)


def test_second_order_variance_of_square():
    assert approx_variance_second(parse("x^2"), Normal(0, 1), 4) == pytest.approx(2.0, abs=1e-9)


@pytest.mark.parametrize("order", [0, 1, 2.5, -3, 33])
def test_order_validation(order):
    with pytest.raises(ValueError):
        approx_mean(parse("exp(x)"), Uniform(0, 1), order)


def _poly(coeffs):
    g = Const(float(coeffs[0]))
    for k, c in enumerate(coeffs[1:], start=1):
        g = Add(g, Mul(Const(float(c)), Pow(X, k)))
    return g


coefficient = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(coefficient, min_size=3, max_size=3), st.sampled_from(SUITE))
def test_quadratics_are_exact(coeffs, dist_text):
    g, d = _poly(coeffs), parse_distribution(dist_text)
    truth = oracle_mean(g, d)
    assert abs(approx_mean(g, d, 2) - truth) <= 1e-9 * (1 + abs(truth))
    assert exactness_verdict(g, d).status is VerdictStatus.EXACT_DEGREE2


@settings(max_examples=40, deadline=None)
@given(st.lists(coefficient, min_size=4, max_size=4), st.sampled_from(SYMMETRIC))
def test_cubics_exact_on_symmetric(coeffs, dist_text):
    g, d = _poly(coeffs), parse_distribution(dist_text)
    truth = oracle_mean(g, d)
    for order in (2, 3):
        assert abs(approx_mean(g, d, order) - truth) <= 1e-9 * (1 + abs(truth))


def test_cubic_not_exact_on_skewed():
    g, d = parse("x^3"), parse_distribution("exponential(1)")
    err = oracle_mean(g, d) - approx_mean(g, d, 2)
    assert err == pytest.approx(d.central_moment(3), rel=1e-9)  # mu_3 * g'''/3!
    v = exactness_verdict(g, d)
    assert v.status is VerdictStatus.NOT_EXACT
    assert v.residual == pytest.approx(2.0, rel=1e-8)


@pytest.mark.parametrize("text, dist_text, status", [
    ("x^2+1", "exponential(1)", VerdictStatus.EXACT_DEGREE2),
    ("x^3", "normal(5,2)", VerdictStatus.EXACT_DEGREE3_ZERO_THIRD_MOMENT),
    ("x^3 - x", "discrete(1:0.5,3:0.5)", VerdictStatus.EXACT_DEGREE3_ZERO_THIRD_MOMENT),
    ("exp(x)", "uniform(0,1)", VerdictStatus.NOT_EXACT),
    ("sin(x)", "point(0)", None),
    ("x^4", "discrete(-1:0.5,1:0.5)", VerdictStatus.NOT_EXACT),
])
def test_verdicts(text, dist_text, status):
    if dist_text == "point(0)":
        # a degenerate law makes every approximation exact via the remainder
        v = exactness_verdict(parse(text), point_mass(0.3))
        assert v.status is VerdictStatus.EXACT_BY_PEANO
        assert v.exact
        return
    v = exactness_verdict(parse(text), parse_distribution(dist_text))
    assert v.status is status
    assert v.exact == (status is not VerdictStatus.NOT_EXACT)


def test_verdict_residual_is_the_error():
    g, d = parse("exp(x)"), Uniform(0.0, 1.0)
    v = exactness_verdict(g, d)
    assert v.residual == pytest.approx(oracle_mean(g, d) - approx_mean(g, d, 2), rel=1e-8)


@pytest.mark.parametrize("dist_text", SUITE)
@pytest.mark.parametrize("shift, scale", [(0.0, 2.0), (1.5, 1.0), (-0.7, 0.5)])
def test_shift_scale_coherence(dist_text, shift, scale):
    # approximating h(x) = g(a + b x) under X equals approximating g under a + b X,
    # which for g = exp reduces to exp(a) times the approximation of exp(b x)
    d = parse_distribution(dist_text)
    g = parse(f"exp({shift} + {scale}*x)")
    h = parse(f"exp({scale}*x)")
    for order in (2, 3, 4):
        assert approx_mean(g, d, order) == pytest.approx(math.exp(shift) * approx_mean(h, d, order),
                                                         rel=1e-13)


@pytest.mark.parametrize("dist_text", SUITE)
def test_affine_first_order_variance_exact(dist_text):
    g, d = parse("4*x - 1"), parse_distribution(dist_text)
    assert approx_variance_first(g, d) == pytest.approx(oracle_variance(g, d), rel=1e-12)


def test_order_increases_accuracy_for_exp():
    g, d = parse("exp(x)"), Uniform(0.0, 1.0)
    truth = oracle_mean(g, d)
    errs = [abs(approx_mean(g, d, k) - truth) for k in range(2, 11)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-9
    np.testing.assert_array_less(errs[2::2], errs[0:-2:2])
