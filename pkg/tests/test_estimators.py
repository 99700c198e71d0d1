import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monotrend._random import stream
from monotrend.errors import InvalidInput
from monotrend.estimators import (ApproximationWarning, cv_bandwidth, cv_curve,
                                  default_bandwidth_grid, estimate_derivative,
                                  estimate_hurst, estimate_sigma2, estimate_tau2,
                                  isotonic_residuals, oversmooth_bandwidth)
from monotrend.isotonic import Block, IsotonicFit, fit_isotonic
from monotrend.noise import DependenceSpec, sample


def step_fit(n, jumps):
    """Fit on ``n`` points with the given ``{start_index: size}`` jumps."""
    fitted = np.zeros(n)
    for i, d in jumps.items():
        fitted[i:] += d
    starts = [0] + sorted(jumps)
    ends = [s - 1 for s in starts[1:]] + [n - 1]
    blocks = tuple(Block(a, b, float(fitted[a])) for a, b in zip(starts, ends))
    return IsotonicFit(fitted, blocks)


class TestTau2:
    def test_alternating_hand_value(self):
        est = estimate_tau2([1.0, -1.0, 1.0, -1.0])
        assert est.max_lag == 2
        np.testing.assert_allclose(est.acvf, [1.0, -0.75, 0.5])
        assert est.value == pytest.approx(0.25)
        assert not est.clamped

    def test_zero_residuals(self):
        assert estimate_tau2(np.zeros(16)).value == 0.0

    def test_iid_close_to_one(self):
        vals = [estimate_tau2(sample(DependenceSpec("IID"), 10_000, stream(1, r))).value
                for r in range(20)]
        assert abs(np.mean(vals) - 1) <= 0.1

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=4, max_size=200))
    def test_bartlett_weights_keep_it_non_negative(self, r):
        est = estimate_tau2(r)
        assert est.value >= -1e-12 * (1 + est.acvf[0])
        assert not est.clamped or est.value == est.acvf[0]

    def test_uncentered(self):
        a = estimate_tau2(np.ones(25))
        assert a.value > 1.0

    def test_requires_four(self):
        with pytest.raises(InvalidInput):
            estimate_tau2([1.0, 2.0, 3.0])

    def test_residuals_from_fit(self):
        ys = np.array([0.0, 2.0, 1.0, 3.0])
        np.testing.assert_allclose(isotonic_residuals(ys), [0.0, 0.5, -0.5, 0.0])


class TestHurst:
    @pytest.mark.parametrize("h", [0.5, 0.8])
    def test_fgn_accuracy(self, h):
        spec = DependenceSpec("FGN", hurst=h)
        est = [estimate_hurst(sample(spec, 2 ** 14, stream(2, r))).value for r in range(20)]
        assert np.mean(np.abs(np.array(est) - h)) <= 0.05

    def test_linear_trend_invariance(self):
        x = sample(DependenceSpec("FGN", hurst=0.7), 2 ** 12, stream(3))
        t = np.arange(x.size) / x.size
        a = estimate_hurst(x).value
        b = estimate_hurst(x + 5.0 - 3.0 * t).value
        assert abs(a - b) <= 1e-10

    def test_regression_recomputed(self):
        x = sample(DependenceSpec("FGN", hurst=0.7), 2 ** 12, stream(4))
        e = estimate_hurst(x)
        w = e.weights
        slope = np.polyfit(e.octaves, e.log2_variances, 1, w=np.sqrt(w))[0]
        assert slope == pytest.approx(e.regression_slope, abs=1e-10)
        assert e.value == pytest.approx((e.regression_slope + 1) / 2)
        assert 0 < e.value < 1

    def test_short_input(self):
        with pytest.raises(InvalidInput):
            estimate_hurst(np.zeros(32))

    def test_vanishing_moments(self):
        with pytest.raises(InvalidInput):
            estimate_hurst(np.random.default_rng(0).normal(size=1024), vanishing_moments=1)


class TestSigma2:
    def test_constant(self):
        assert estimate_sigma2(np.full(5, 3.0)) == 0.0

    def test_two_points(self):
        assert estimate_sigma2([0.0, 1.0]) == 0.5

    def test_fgn_sample(self):
        x = sample(DependenceSpec("FGN", hurst=0.7, marginal_var=0.2), 10_000, stream(5))
        assert estimate_sigma2(x) == pytest.approx(0.2, rel=0.15)

    def test_farima_warns(self):
        with pytest.warns(ApproximationWarning):
            estimate_sigma2([0.0, 1.0, 2.0], "FARIMA")
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            estimate_sigma2([0.0, 1.0, 2.0], "FGN")


class TestDerivative:
    def test_single_jump_at_t0(self):
        fit = step_fit(10, {5: 2.0})
        d = estimate_derivative(fit, 0.5, 0.1)
        assert d.value == pytest.approx(2.0 / (0.1 * math.sqrt(2 * math.pi)))

    def test_flat_fit(self):
        d = estimate_derivative(fit_isotonic(np.ones(10)), 0.5, 0.1)
        assert d.value == 0.0 and d.degenerate

    def test_two_jumps_hand_sum(self):
        fit = step_fit(10, {2: 1.0, 7: 3.0})
        h, t0 = 0.2, 0.4

        def k(u):
            return math.exp(-u * u / 2) / math.sqrt(2 * math.pi)

        expect = (1.0 * k((t0 - 0.2) / h) + 3.0 * k((t0 - 0.7) / h)) / h
        assert estimate_derivative(fit, t0, h).value == pytest.approx(expect)

    def test_linear_in_jumps(self):
        ys = np.linspace(0, 1, 50) + np.random.default_rng(1).normal(0, 0.2, 50)
        fit = fit_isotonic(ys)
        doubled = IsotonicFit(2 * fit.fitted,
                              tuple(b._replace(level=2 * b.level) for b in fit.blocks))
        assert estimate_derivative(doubled, 0.5, 0.2).value == \
            2 * estimate_derivative(fit, 0.5, 0.2).value

    def test_validation(self):
        fit = step_fit(10, {5: 1.0})
        with pytest.raises(InvalidInput):
            estimate_derivative(fit, 1.0, 0.1)
        with pytest.raises(InvalidInput):
            estimate_derivative(fit, 0.5, 0.0)


class TestBandwidth:
    def test_oversmooth(self):
        assert oversmooth_bandwidth(128) == 0.5
        assert oversmooth_bandwidth(10 ** 7) == pytest.approx(0.1, rel=1e-12)
        with pytest.raises(InvalidInput):
            oversmooth_bandwidth(1)

    def test_default_grid(self):
        g = default_bandwidth_grid(1000)
        assert g.size == 10
        assert g[0] == pytest.approx(0.1) and g[-1] == pytest.approx(1000 ** -0.1)

    def test_single_candidate(self):
        assert cv_bandwidth(np.arange(20.0), candidate_hs=[0.3]) == 0.3

    def test_duplicate_candidates(self):
        assert cv_bandwidth(np.arange(20.0), candidate_hs=[0.2, 0.2]) == 0.2

    def test_smoke_linear_trend(self):
        n = 500
        t = np.arange(1, n + 1) / n
        ys = t + np.random.default_rng(2).normal(0, 0.3, n)
        hs = default_bandwidth_grid(n)
        cv = cv_curve(ys, hs, seed=3)
        assert np.all(np.isfinite(cv))
        h = cv_bandwidth(ys, 0.5, hs, seed=3)
        assert hs.min() <= h <= hs.max()
        assert h == hs[np.argmin(cv)]

    def test_seeded(self):
        ys = np.linspace(0, 1, 100) + np.random.default_rng(3).normal(0, 0.3, 100)
        hs = default_bandwidth_grid(100)
        assert np.array_equal(cv_curve(ys, hs, 9), cv_curve(ys, hs, 9))

    def test_bad_candidates(self):
        with pytest.raises(InvalidInput):
            cv_curve(np.arange(10.0), [0.1, -0.2])
