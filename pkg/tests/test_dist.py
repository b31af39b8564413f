from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import stats

from statdiff.dist import (CustomDensity, DiscreteFinite, Exponential, Normal, Uniform,
                           chebyshev_grid, parse_distribution, point_mass, third_moment_identity)
from statdiff.errors import InvalidDistribution
from statdiff.expr import X
from statdiff.oracle import expect

from conftest import SUITE, SYMMETRIC


def test_discrete_example_moments():
    d = parse_distribution("discrete(1:0.5,3:0.5)")
    assert d.mean() == 2.0
    assert d.variance() == 1.0
    assert d.central_moment(3) == 0.0
    assert d.raw_moment(3) == 14.0


def test_uniform_closed_forms():
    d = Uniform(0.0, 1.0)
    assert d.variance() == pytest.approx(1 / 12, rel=1e-15)
    assert d.central_moment(4) == pytest.approx(1 / 80, rel=1e-15)
    assert d.central_moment(5) == 0.0
    assert d.abs_central_moment(3) == pytest.approx(1 / 32, rel=1e-15)


@pytest.mark.parametrize("k, expected", [(2, 0.01), (3, 0.0), (4, 3e-4), (6, 1.5e-5)])
def test_normal_central_moments(k, expected):
    assert Normal(0.0, 0.1).central_moment(k) == pytest.approx(expected, rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("k", range(1, 9))
def test_normal_absolute_moments_against_scipy(k):
    d = Normal(1.0, 0.7)
    ref, _ = sp_integrate.quad(lambda x: abs(x - 1.0) ** k * stats.norm.pdf(x, 1.0, 0.7),
                               -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13)
    assert d.abs_central_moment(k) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("k", range(2, 9))
def test_exponential_moments_against_scipy(k):
    d = Exponential(2.0)
    m = 0.5
    pdf = lambda x: 2.0 * math.exp(-2.0 * x)  # noqa: E731
    mu = sp_integrate.quad(lambda x: (x - m) ** k * pdf(x), 0, m, epsabs=1e-15, epsrel=1e-13)[0] \
        + sp_integrate.quad(lambda x: (x - m) ** k * pdf(x), m, np.inf, epsabs=1e-15, epsrel=1e-13)[0]
    nu = sp_integrate.quad(lambda x: abs(x - m) ** k * pdf(x), 0, m, epsabs=1e-15, epsrel=1e-13)[0] \
        + sp_integrate.quad(lambda x: abs(x - m) ** k * pdf(x), m, np.inf, epsabs=1e-15, epsrel=1e-13)[0]
    assert d.central_moment(k) == pytest.approx(mu, rel=1e-10)
    assert d.abs_central_moment(k) == pytest.approx(nu, rel=1e-10)


def test_custom_density_moments_against_scipy():
    d = parse_distribution("density(2*x; 0, 1)")
    assert d.mean() == pytest.approx(2 / 3, rel=1e-13)
    for k in range(2, 7):
        ref = sp_integrate.quad(lambda x: (x - 2 / 3) ** k * 2 * x, 0, 1, points=[2 / 3],
                                epsabs=1e-15, epsrel=1e-13)[0]
        assert d.central_moment(k) == pytest.approx(ref, rel=1e-10, abs=1e-15)


@pytest.mark.parametrize("dist_text", SUITE)
@pytest.mark.parametrize("k", range(0, 9))
def test_raw_moments_match_direct_expectation(dist_text, k):
    d = parse_distribution(dist_text)
    direct = expect(lambda x: np.asarray(x, dtype=float) ** k, d, 1e-12)
    assert d.raw_moment(k) == pytest.approx(direct, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("dist_text", SUITE)
def test_moment_table_invariants(dist_text):
    d = parse_distribution(dist_text)
    d.moments.ensure(8)
    assert d.moments.violations() == []
    assert d.central_moment(0) == 1.0
    for k in range(1, 9):
        assert d.abs_central_moment(k) >= abs(d.central_moment(k)) * (1 - 1e-12)


@pytest.mark.parametrize("dist_text", SUITE)
def test_lyapunov_norms_nondecreasing(dist_text):
    d = parse_distribution(dist_text)
    norms = [d.abs_central_moment(k) ** (1 / k) for k in range(1, 9)]
    for a, b in zip(norms, norms[1:]):
        assert b >= a * (1 - 1e-9)


def test_degenerate_detection():
    d = point_mass(3.0)
    assert d.is_degenerate()
    assert d.variance() == 0.0
    assert not Uniform(0, 1).is_degenerate()


@pytest.mark.parametrize("dist_text", SYMMETRIC)
def test_third_moment_identity_on_symmetric(dist_text):
    ident = third_moment_identity(parse_distribution(dist_text))
    assert abs(ident.residual) <= 1e-8 * (1 + abs(ident.lhs))


def test_third_moment_identity_fails_on_skewed():
    ident = third_moment_identity(Exponential(1.0))
    assert abs(ident.residual) == pytest.approx(2.0, rel=1e-12)  # mu_3 of Exp(1)


@pytest.mark.parametrize("dist_text, kind", [
    ("uniform(0,1)", Uniform), ("normal(0,0.1)", Normal), ("exponential(2)", Exponential),
    ("discrete(1:0.5,3:0.5)", DiscreteFinite), ("density(2*x; 0, 1)", CustomDensity),
    (" normal( 1 , 2 ) ", Normal),
])
def test_parse_distribution(dist_text, kind):
    assert isinstance(parse_distribution(dist_text), kind)


@pytest.mark.parametrize("dist_text", [
    "discrete(1:0.7,3:0.4)", "discrete(1:0.5,1:0.5)", "discrete(1:-0.5,3:1.5)", "discrete(1)",
    "uniform(1,0)", "uniform(0)", "normal(0,0)", "normal(0,-1)", "exponential(0)",
    "gamma(1,2)", "normal(a,1)", "density(x; 0, 1)", "density(x - 0.5; 0, 1)",
    "density(1; 0, inf)", "density(ln(x); 0, 1)", "nonsense",
])
def test_invalid_distributions(dist_text):
    with pytest.raises(InvalidDistribution):
        parse_distribution(dist_text)


def test_custom_density_normalizes_small_drift():
    d = CustomDensity(2.0005 * X, 0.0, 1.0)
    assert d.norm == pytest.approx(1.00025, rel=1e-12)
    assert expect(lambda x: np.ones_like(x), d) == pytest.approx(1.0, abs=1e-12)


def test_label_round_trip():
    for dist_text in SUITE:
        d = parse_distribution(dist_text)
        again = parse_distribution(d.label)
        assert again.mean() == d.mean()
        assert again.variance() == d.variance()


def test_chebyshev_grid():
    g = chebyshev_grid(-2.0, 3.0)
    assert g.size == 257
    assert g[0] == -2.0 and g[-1] == 3.0
    assert np.all(np.diff(g) > 0)


@pytest.mark.parametrize("dist_text", SUITE)
def test_samples_lie_in_support(dist_text):
    d = parse_distribution(dist_text)
    xs = d.sample(7, np.arange(5000, dtype=np.uint64))
    lo, hi = d.support
    assert np.all(np.isfinite(xs))
    assert np.all((xs >= lo) & (xs <= hi))
    assert np.array_equal(xs, d.sample(7, np.arange(5000, dtype=np.uint64)))
