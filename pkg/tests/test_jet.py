from __future__ import annotations

import math

import numpy as np
import pytest

from statdiff.errors import DomainError
from statdiff.expr import parse
from statdiff.jet import MAX_ORDER, Jet, derivative_at, jet_of


def test_exp_jet_at_zero():
    c = jet_of(parse("exp(x)"), 0.0, 5).coeffs
    np.testing.assert_allclose(c, [1 / math.factorial(k) for k in range(6)], rtol=1e-15)


def test_cubic_derivatives():
    d = jet_of(parse("x^3"), 2.0, 5).derivatives()
    np.testing.assert_array_equal(d, [8.0, 12.0, 12.0, 6.0, 0.0, 0.0])


def test_ln_derivatives():
    # d^k/dx^k ln(x) = (-1)^(k-1) (k-1)! / x^k
    x = 1.7
    d = jet_of(parse("ln(x)"), x, 6).derivatives()
    expected = [math.log(x)] + [(-1) ** (k - 1) * math.factorial(k - 1) / x**k for k in range(1, 7)]
    np.testing.assert_allclose(d, expected, rtol=1e-13)


@pytest.mark.parametrize("text, exact", [
    ("sin(x)", lambda x, k: math.sin(x + k * math.pi / 2)),
    ("cos(x)", lambda x, k: math.cos(x + k * math.pi / 2)),
    ("sqrt(x)", lambda x, k: math.prod(0.5 - j for j in range(k)) * x ** (0.5 - k)),
    ("1/x", lambda x, k: (-1) ** k * math.factorial(k) / x ** (k + 1)),
])
def test_closed_form_derivatives(text, exact):
    x = 0.8
    d = jet_of(parse(text), x, 7).derivatives()
    np.testing.assert_allclose(d, [exact(x, k) for k in range(8)], rtol=1e-12)


def _central_difference(f, x, k, h):
    # k-th derivative by the k-th central difference of step h
    return sum((-1) ** j * math.comb(k, j) * f(x + (k / 2 - j) * h) for j in range(k + 1)) / h**k


@pytest.mark.parametrize("text, f", [
    ("exp(x)", math.exp), ("sin(x)", math.sin), ("x^3", lambda x: x**3),
    ("ln(1+x)", lambda x: math.log1p(x)),
])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_against_finite_differences(text, f, k):
    # step grows with k to balance O(h^2) truncation against rounding
    h, rel = {1: (1e-5, 1e-7), 2: (1e-4, 1e-6), 3: (1e-3, 1e-4), 4: (1e-2, 1e-3)}[k]
    x = 0.37
    jet_value = derivative_at(parse(text), x, k)
    fd = _central_difference(f, x, k, h)
    assert jet_value == pytest.approx(fd, rel=rel, abs=1e-6)


@pytest.mark.parametrize("composite, direct", [
    ("exp(ln(x))", "x"),
    ("sin(x)^2 + cos(x)^2", "1"),
    ("sqrt(x)^2", "x"),
    ("exp(x)*exp(0-x)", "1"),
    ("ln(exp(x))", "x"),
])
def test_composition_consistency(composite, direct):
    a = jet_of(parse(composite), 0.6, 8).coeffs
    b = jet_of(parse(direct), 0.6, 8).coeffs
    np.testing.assert_allclose(a, b, atol=1e-14, rtol=1e-14)


@pytest.mark.parametrize("text", ["exp(sin(x))", "ln(1+x^2)/(2+cos(x))", "sqrt(x)*x^-3"])
def test_truncation_consistency(text):
    g = parse(text)
    high = jet_of(g, 1.3, 10).coeffs
    for n in (0, 1, 4, 7):
        np.testing.assert_allclose(jet_of(g, 1.3, n).coeffs, high[: n + 1], rtol=1e-14, atol=0)


def test_vectorized_centers_match_scalar():
    g = parse("exp(x)*sin(x) + x^4")
    centers = np.linspace(-1, 1, 9)
    batch = jet_of(g, centers, 5).coeffs
    assert batch.shape == (6, 9)
    for i, c in enumerate(centers):
        np.testing.assert_array_equal(batch[:, i], jet_of(g, c, 5).coeffs)


@pytest.mark.parametrize("text, x", [("ln(x)", 0.0), ("ln(x)", -2.0), ("1/x", 0.0),
                                     ("sqrt(x)", 0.0)])
def test_domain_errors(text, x):
    with pytest.raises(DomainError):
        jet_of(parse(text), x, 3)


def test_order_limits():
    g = parse("exp(x)")
    jet_of(g, 0.0, MAX_ORDER)
    with pytest.raises(ValueError):
        jet_of(g, 0.0, MAX_ORDER + 1)
    with pytest.raises(ValueError):
        jet_of(g, 0.0, -1)


def test_jet_arithmetic_primitives():
    x = Jet.variable(2.0, 3)
    y = (x * x - 1) / (x + 1)  # equals x - 1 away from x = -1
    np.testing.assert_allclose(y.coeffs, [1.0, 1.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose((x ** 3).derivatives(), [8.0, 12.0, 12.0, 6.0])
