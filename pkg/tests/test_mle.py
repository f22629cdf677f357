import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gevfit import DataSample, DegenerateData, DomainError, GevParams, sample
from gevfit.lab import LAB_SEARCH, multistart_maximum, replicate_fits
from gevfit.mle import (
    WARN_AT_BOUND,
    WARN_LOW_SHAPE,
    WARN_SPURIOUS,
    Candidate,
    SearchConfig,
    _pick,
    candidate_report,
    fit,
)
from gevfit.profile import profile_loglik
from oracles import naive_loglik


@pytest.fixture(scope="module")
def fit_pos(fig2_pos):
    return fit(fig2_pos)


class TestFigure2Fit:
    def test_shape_within_three_se(self, fit_pos):
        se_xi = fit_pos.se[2]
        assert abs(fit_pos.xi_hat - 0.2) < 3 * se_xi

    def test_stationary(self, fit_pos, fig2_pos):
        pt = profile_loglik(fit_pos.xi_hat, fig2_pos)
        assert abs(pt.pl_deriv) < 1e-6 * fig2_pos.n

    def test_loglik_matches_naive_sum(self, fit_pos, fig2_pos):
        th = fit_pos.theta_hat
        ref = float(naive_loglik(th.tau, th.mu, th.xi, fig2_pos.values.tolist()))
        assert fit_pos.loglik == pytest.approx(ref, rel=1e-12)

    def test_inside_support(self, fit_pos, fig2_pos):
        assert fit_pos.beta_hat < fig2_pos.y_min

    def test_no_warnings(self, fit_pos):
        assert fit_pos.warnings == []

    def test_to_dict_keys(self, fit_pos):
        d = fit_pos.to_dict()
        assert {"tau", "mu", "xi", "beta", "loglik", "se", "warnings", "stationary_points",
                "n", "config", "hessian"} <= set(d)
        assert d["config"]["xi_upper"] == 5.0
        assert set(d["se"]) == {"mu", "tau", "xi"}


class TestCandidates:
    def test_single_dominant_point(self, fig2_pos):
        rows = candidate_report(fig2_pos)
        assert len(rows) == 1
        xi, pl, d = rows[0]
        assert abs(d) < 1e-6 * fig2_pos.n

    def test_stable_under_grid_refinement(self, fig2_neg):
        a = fit(fig2_neg, SearchConfig(coarse_grid_size=256), inference=False)
        b = fit(fig2_neg, SearchConfig(coarse_grid_size=1024), inference=False)
        assert a.xi_hat == pytest.approx(b.xi_hat, abs=1e-8)
        assert a.loglik == pytest.approx(b.loglik, rel=1e-12)

    def test_tie_break_prefers_stationary_then_small_shape(self):
        pts = [Candidate(0.3, -10.0, 0.0, "grid", None),
               Candidate(0.5, -10.0, 0.0, "stationary", None),
               Candidate(-0.2, -10.0, 0.0, "stationary", None),
               Candidate(0.9, -11.0, 0.0, "stationary", None)]
        win, tie = _pick(pts, 10)
        assert win.xi == -0.2
        assert tie

    def test_clear_winner_is_not_a_tie(self):
        pts = [Candidate(0.5, -10.0, 0.0, "stationary", None),
               Candidate(-0.2, -10.1, 0.0, "stationary", None)]
        win, tie = _pick(pts, 10)
        assert win.xi == 0.5 and not tie


def test_multistart_cannot_beat_fit(small_pos):
    res = fit(small_pos, inference=False)
    best = multistart_maximum(small_pos, restarts=20, seed=3)
    assert res.loglik >= best - 1e-6 * small_pos.n


@pytest.mark.parametrize("a, c", [(3.0, -7.0), (0.01, 100.0), (250.0, 0.0)])
def test_affine_equivariance(small_pos, a, c):
    base = fit(small_pos, inference=False)
    moved = fit(small_pos.affine(a, c), inference=False)
    assert moved.xi_hat == pytest.approx(base.xi_hat, abs=1e-8)
    assert moved.theta_hat.tau == pytest.approx(a * base.theta_hat.tau, rel=1e-8)
    assert moved.theta_hat.mu == pytest.approx(a * base.theta_hat.mu + c, rel=1e-8, abs=1e-8 * a)
    assert moved.loglik == pytest.approx(base.loglik - small_pos.n * math.log(a), rel=1e-9)


def test_consistency_trend():
    med = []
    for n in (250, 1000, 4000):
        fits = replicate_fits(GevParams(0.5, 20.0, 0.2), n, 7, 30, LAB_SEARCH)
        med.append(np.median([abs(f.theta_hat.xi - 0.2) for f in fits]))
    assert med[0] > med[1] > med[2]


@settings(max_examples=25)
@given(st.integers(5, 60), st.floats(-0.6, 1.0), st.integers(0, 10_000))
def test_fit_stays_inside_support(n, xi, seed):
    d = sample(GevParams(1.0, 0.0, xi), n, seed)
    res = fit(d, SearchConfig(coarse_grid_size=32), inference=False)
    th = res.theta_hat
    assert th.xi < n - 1
    assert math.isfinite(res.loglik)
    if th.xi != 0.0:
        assert np.all(1 + th.xi * (d.values - th.mu) / th.tau > 0)


class TestTinySamples:
    @pytest.mark.parametrize("vals", [[0, 1], [0, 1, 2], [1, 2, 3, 4, 100], [0, 0, 0, 1]])
    def test_climb_to_cap_is_ignored(self, vals):
        res = fit(vals)
        assert WARN_SPURIOUS in res.warnings
        assert res.xi_hat < 1.0

    def test_interior_maximum_kept(self):
        res = fit([0, 1, 2, 3, 10])
        assert WARN_SPURIOUS in res.warnings
        assert WARN_AT_BOUND not in res.warnings
        assert 0.0 < res.xi_hat < 1.0
        assert abs(profile_loglik(res.xi_hat, DataSample.from_values([0, 1, 2, 3, 10])).pl_deriv) < 1e-6


def test_low_shape_warning():
    res = fit(sample(GevParams(1.0, 0.0, -0.8), 300, 4))
    assert res.xi_hat < -0.5
    assert WARN_LOW_SHAPE.format(-0.5) in res.warnings
    assert res.se is None


class TestConfig:
    @pytest.mark.parametrize("cfg", [
        SearchConfig(xi_lower=-1.0),
        SearchConfig(xi_lower=0.5, xi_upper=0.2),
        SearchConfig(coarse_grid_size=4),
        SearchConfig(refine_tol=0.0),
        SearchConfig(xi_upper=250.0),
    ])
    def test_rejected(self, cfg, small_pos):
        with pytest.raises(DomainError):
            fit(small_pos, cfg)

    def test_default_upper(self):
        assert SearchConfig().resolved_upper(1000) == 5.0
        assert SearchConfig().resolved_upper(3) == pytest.approx(2 - 1e-6)

    def test_grid_endpoints(self):
        g = SearchConfig(coarse_grid_size=64).grid(100)
        assert g[0] == -0.99 and g[-1] == 5.0 and np.all(np.diff(g) > 0)

    def test_degenerate(self):
        with pytest.raises(DegenerateData):
            fit([3.0, 3.0, 3.0])
