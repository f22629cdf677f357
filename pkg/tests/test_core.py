import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from gevfit import (
    DataSample,
    DegenerateData,
    DomainError,
    GevParams,
    OutOfSupport,
    ZeroShape,
    beta_of,
    cdf,
    endpoints,
    log_likelihood,
    logpdf,
    pdf,
    quantile,
    sample,
    standardize,
    support_contains,
)
from oracles import ks_band_99, naive_loglik

# Frozen from a 40-digit quadrature of the density over (beta, 21].
CDF_AT_21 = 0.83032803607780859286


def ds(*v):
    return DataSample.from_values(v)


class TestParams:
    def test_tau_must_be_positive(self):
        with pytest.raises(DomainError):
            GevParams(0.0, 1.0, 0.1)
        with pytest.raises(DomainError):
            GevParams(-1.0, 1.0, 0.1)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            GevParams(1.0, math.nan, 0.1)

    @pytest.mark.parametrize("theta, beta", [
        (GevParams(0.5, 20, 0.2), 17.5),
        (GevParams(1, 0, -1), 1.0),
        (GevParams(0.5, 20, -0.2), 22.5),
    ])
    def test_beta(self, theta, beta):
        assert beta_of(theta) == pytest.approx(beta, rel=1e-15)
        assert theta.beta() == beta_of(theta)

    def test_beta_undefined_at_zero_shape(self):
        with pytest.raises(ZeroShape):
            beta_of(GevParams(1, 0, 0))

    def test_endpoints(self):
        assert endpoints(GevParams(0.5, 20, 0.2)) == (pytest.approx(17.5), math.inf)
        assert endpoints(GevParams(0.5, 20, 0)) == (-math.inf, math.inf)
        assert endpoints(GevParams(0.5, 20, -0.2)) == (-math.inf, pytest.approx(22.5))


class TestDataSample:
    def test_sorted_and_extremes(self):
        d = ds(3, 1, 2)
        assert list(d.values) == [1, 2, 3]
        assert list(d.observed) == [3, 1, 2]
        assert (d.y_min, d.y_max, d.n) == (1, 3, 3)

    @pytest.mark.parametrize("vals", [[1.0], [2.0, 2.0, 2.0], [1.0, math.inf], [1.0, math.nan]])
    def test_degenerate(self, vals):
        with pytest.raises(DegenerateData):
            DataSample.from_values(vals)

    def test_read_only(self):
        d = ds(1, 2)
        with pytest.raises(ValueError):
            d.values[0] = 5

    def test_fingerprint_ignores_order(self):
        assert ds(1, 2, 3).fingerprint == ds(3, 2, 1).fingerprint
        assert ds(1, 2, 3).fingerprint != ds(1, 2, 4).fingerprint


class TestSupport:
    def test_examples(self):
        assert support_contains(GevParams(0.5, 20, 0.2), ds(18, 19))
        assert not support_contains(GevParams(0.5, 20, -0.2), ds(20, 23))
        assert support_contains(GevParams(0.1, 0, 0), ds(-1e6, 1e6))

    @given(st.floats(0.05, 5), st.floats(-3, 3), st.floats(-2, 2).filter(lambda x: abs(x) > 1e-3),
           st.integers(0, 10_000))
    def test_agrees_with_positive_w(self, tau, mu, xi, seed):
        y = np.random.default_rng(seed).normal(0, 2, 7)
        d = DataSample.from_values(y)
        th = GevParams(tau, mu, xi)
        w = 1 + xi * (d.values - mu) / tau
        assert support_contains(th, d) == bool(np.all(w > 0))


class TestStandardize:
    def test_examples(self):
        assert list(standardize(GevParams(1, 0, 1), ds(1, 2)).w) == [2, 3]
        w = standardize(GevParams(2, 0, -0.5), ds(1, 1.5)).w
        assert w[0] == pytest.approx(0.75)

    def test_boundary_excluded(self):
        with pytest.raises(OutOfSupport):
            standardize(GevParams(1, 1, 1), ds(0, 2))  # beta = 0 = y_min

    def test_zero_shape(self):
        with pytest.raises(ZeroShape):
            standardize(GevParams(1, 0, 0), ds(0, 1))


class TestLogLikelihood:
    def test_gumbel_example(self):
        assert log_likelihood(GevParams(1, 0, 0), np.array([0.0])) == -1.0

    def test_out_of_support_sentinel(self):
        assert log_likelihood(GevParams(0.5, 20, 0.2), ds(10, 20)) == -math.inf

    def test_naive_summation_oracle(self):
        th = GevParams(0.5, 20, 0.2)
        d = sample(th, 10, 5)
        ref = float(naive_loglik(0.5, 20, 0.2, d.values.tolist()))
        assert log_likelihood(th, d) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("xi", [-0.7, -0.2, 0.0, 0.3, 2.5])
    def test_equals_sum_of_logpdf(self, xi):
        th = GevParams(1.3, -2.0, xi)
        d = sample(th, 50, 1)
        assert log_likelihood(th, d) == pytest.approx(float(np.sum(logpdf(th, d.values))),
                                                      rel=1e-12)

    def test_density_matches_cdf_derivative(self):
        th = GevParams(0.5, 20, 0.2)
        ys = np.array([18.0, 19.5, 20.0, 21.0, 25.0])
        h = 1e-5
        num = (cdf(th, ys + h) - cdf(th, ys - h)) / (2 * h)
        np.testing.assert_allclose(pdf(th, ys), num, rtol=1e-6)

    def test_continuous_at_zero_shape(self):
        d = sample(GevParams(1, 0, 0.0), 100, 3)
        base = log_likelihood(GevParams(1, 0, 0.0), d)
        gaps = [abs(log_likelihood(GevParams(1, 0, x), d) - base) for x in (1e-2, 1e-4, 1e-6)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-3

    @given(st.floats(0.1, 10), st.floats(-5, 5), st.floats(-100, 100),
           st.floats(-0.8, 1.5), st.integers(0, 1000))
    def test_location_scale_equivariance(self, a, c, mu, xi, seed):
        th = GevParams(1.0, mu, xi)
        d = sample(th, 30, seed)
        lhs = log_likelihood(GevParams(a, a * mu + c, xi), d.affine(a, c))
        rhs = log_likelihood(th, d) - d.n * math.log(a)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


class TestCdfQuantile:
    def test_at_location(self):
        assert cdf(GevParams(0.5, 20, 0.3), 20.0) == pytest.approx(math.exp(-1))
        assert cdf(GevParams(0.5, 20, 0.0), 20.0) == pytest.approx(math.exp(-1))

    def test_clamped_outside_support(self):
        assert cdf(GevParams(1, 0, -0.5), 5.0) == 1.0
        assert cdf(GevParams(1, 0, 0.5), -5.0) == 0.0

    def test_quadrature_oracle(self):
        assert cdf(GevParams(0.5, 20, 0.2), 21.0) == pytest.approx(CDF_AT_21, abs=1e-8)
        th = GevParams(0.5, 20, 0.2)
        val, _ = integrate.quad(lambda y: float(pdf(th, y)), 17.5, 21.0, epsabs=1e-13)
        assert val == pytest.approx(CDF_AT_21, abs=1e-8)

    def test_quantile_examples(self):
        assert quantile(GevParams(0.5, 20, 0.3), math.exp(-1)) == pytest.approx(20.0)
        assert quantile(GevParams(1, 0, 0), math.exp(-1)) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            quantile(GevParams(1, 0, 0.1), p)

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            th = GevParams(rng.uniform(0.1, 5), rng.uniform(-10, 10), rng.uniform(-0.9, 2))
            p = rng.uniform(0.001, 0.999)
            assert cdf(th, quantile(th, p)) == pytest.approx(p, abs=1e-10)


class TestSample:
    def test_deterministic(self):
        th = GevParams(0.5, 20, 0.2)
        np.testing.assert_array_equal(sample(th, 50, 9).observed, sample(th, 50, 9).observed)

    def test_within_support(self):
        d = sample(GevParams(0.5, 20, 0.2), 5000, 1)
        assert d.y_min > 17.5

    def test_ks_band(self):
        th = GevParams(0.5, 20, 0.2)
        d = sample(th, 100_000, 3)
        n = d.n
        F = cdf(th, d.values)
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - F), np.max(F - (i - 1) / n))
        assert ks < ks_band_99(n)

    def test_minimum_size(self):
        with pytest.raises(DomainError):
            sample(GevParams(1, 0, 0), 1, 0)
