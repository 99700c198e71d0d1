import math

import numpy as np
import pytest

from monotrend._random import stream
from monotrend.errors import (DegenerateConstraint, InvalidInput,
                              InvalidNuisance, Unsupported)
from monotrend.inference import (EMPTY_SET, UNBOUNDED_AT_GRID, Method, band,
                                 ci_ln_lrd, ci_ln_srd, ci_psi, ci_tn_srd,
                                 lrd_nuisance, lrd_threshold)
from monotrend.isotonic import fit_isotonic
from monotrend.limits import HurstMode, Provenance
from monotrend.noise import DependenceSpec, sample
from monotrend.stats import ProfileFunction


def noisy_exp(n=200, seed=0, sd=0.3):
    t = np.arange(1, n + 1) / n
    return np.exp(t) + np.random.default_rng(seed).normal(0, sd, n)


class TestSrdIntervals:
    def test_two_point_l(self):
        ci = ci_ln_srd([1.0, 0.0], 0.6, tau2=1.0, quantile=0.08)
        assert ci.lower == pytest.approx(0.3, abs=1e-7)
        assert ci.upper == pytest.approx(0.7, abs=1e-7)

    def test_two_point_t(self):
        ci = ci_tn_srd([1.0, 0.0], 0.6, tau2=1.0, quantile=0.08)
        assert ci.lower == pytest.approx(0.3, abs=1e-7)
        assert ci.upper == pytest.approx(0.7, abs=1e-7)

    def test_infinite_quantile_spans_range(self):
        for f in (ci_ln_srd, ci_tn_srd):
            ci = f([1.0, 0.0], 0.6, tau2=1.0, quantile=math.inf, search_range=(-3, 4))
            assert (ci.lower, ci.upper) == (-3, 4)
            assert UNBOUNDED_AT_GRID in ci.flags

    def test_zero_quantile_gives_flat_stretch(self):
        ci = ci_ln_srd([0.0, 0.0, 1.0, 1.0], 0.6, tau2=1.0, quantile=0.0)
        assert ci.lower == pytest.approx(0.0, abs=1e-7)
        assert ci.upper == pytest.approx(1.0, abs=1e-7)

    def test_matches_direct_scan(self):
        ys = noisy_exp(120, 1)
        for f, stat in ((ci_ln_srd, "l_raw"), (ci_tn_srd, "t_raw")):
            ci = f(ys, 0.5, 0.1, tau2=0.09)
            pf = ProfileFunction(ys, 0.5)
            grid = np.linspace(*ci.search_range, 20001)
            inside = grid[getattr(pf, stat)(grid) <= ci.threshold]
            step = grid[1] - grid[0]
            assert abs(inside.min() - ci.lower) <= step
            assert abs(inside.max() - ci.upper) <= step

    def test_point_estimate_inside_and_finite(self):
        for seed in range(10):
            ys = noisy_exp(150, seed)
            ci = ci_ln_srd(ys, 0.4, 0.05)
            assert ci.lower <= ci.theta_hat <= ci.upper
            assert np.isfinite(ci.length) and not ci.flags
            assert ci.nuisance["tau2"] > 0

    def test_table_quantile_used(self):
        ci = ci_ln_srd(noisy_exp(), 0.5, 0.10, tau2=0.1)
        assert ci.quantile.value == 1.62
        assert ci.quantile.provenance is Provenance.EMBEDDED_PAPER
        assert ci.threshold == pytest.approx(0.162)

    def test_nonpositive_tau2(self):
        with pytest.raises(InvalidNuisance):
            ci_ln_srd(noisy_exp(), 0.5, tau2=0.0)
        with pytest.raises(InvalidNuisance):
            ci_ln_srd(np.ones(20), 0.5)

    def test_bad_alpha(self):
        with pytest.raises(InvalidInput):
            ci_ln_srd(noisy_exp(), 0.5, alpha=1.0)

    def test_to_dict(self):
        d = ci_ln_srd(noisy_exp(), 0.5, 0.1).to_dict()
        assert d["method"] == "LN_SRD" and d["quantile"]["provenance"] == "EMBEDDED_PAPER"
        assert "tau2" in d["nuisance"]


class TestLrdIntervals:
    def test_threshold_at_half(self):
        assert lrd_threshold(1000, 0.5, 0.4, 0.7, 2.0) == pytest.approx(0.16 * 2.0)

    def test_threshold_scaling_in_a(self):
        h = 0.8
        e = (2 * h - 1) / (2 - h)
        a = lrd_threshold(500, h, 0.3, 0.5, 1.7)
        b = lrd_threshold(500, h, 0.6, 0.5, 1.7)
        assert b / a == pytest.approx(2 ** (2 + e), rel=1e-12)

    def test_nuisance_checks(self):
        ys = noisy_exp()
        with pytest.raises(InvalidNuisance):
            ci_ln_lrd(ys, 0.5, 0.1, hurst=0.8, a_hat=0.3, b_hat=0.0)
        with pytest.raises(InvalidNuisance):
            ci_ln_lrd(ys, 0.5, 0.1, hurst=0.8, a_hat=-1.0, b_hat=1.0)
        with pytest.raises(InvalidInput):
            ci_ln_lrd(ys, 0.5, 0.1, hurst=0.5, a_hat=0.3, b_hat=1.0)

    def test_interval_and_nearest_key(self):
        ci = ci_ln_lrd(noisy_exp(), 0.5, 0.10, hurst=0.83, a_hat=0.3, b_hat=0.8)
        assert ci.quantile.hurst == 0.8 and ci.quantile.value == 7.74
        assert ci.lower <= ci.theta_hat <= ci.upper and not ci.flags

    def test_plug_in_nuisance(self):
        n = 500
        t = np.arange(1, n + 1) / n
        ys = np.exp(t) + sample(DependenceSpec("FGN", hurst=0.8, marginal_var=0.2), n,
                                stream(8))
        est = lrd_nuisance(ys, 0.5)
        assert est["a_hat"] == pytest.approx(math.sqrt(np.var(ys, ddof=1)))
        assert est["b_hat"] > 0 and 0 < est["hurst"] < 1
        assert est["bandwidth"] == pytest.approx(n ** (-1 / 7))

    @pytest.mark.xfail(strict=True, reason="plug-in threshold with the embedded H=0.9 "
                       "quantile over-covers at n=500; see decisions ledger")
    def test_desk_coverage_fgn_09(self):
        n, reps, t0 = 500, 150, 0.5
        t = np.arange(1, n + 1) / n
        spec = DependenceSpec("FGN", hurst=0.9, marginal_var=0.2)
        hits = 0
        for r in range(reps):
            ys = np.exp(t) + sample(spec, n, stream(31, r))
            est = lrd_nuisance(ys, t0)
            ci = ci_ln_lrd(ys, t0, 0.10, hurst=0.9, a_hat=est["a_hat"],
                           b_hat=est["b_hat"])
            hits += ci.contains(math.exp(t0))
        assert 0.70 <= hits / reps <= 0.90


class TestPsiIntervals:
    def test_jump_point_is_empty(self):
        ys = np.array([0.0, 0.1, 0.2, 1.0, 1.1, 1.2])
        fit = fit_isotonic(ys)
        assert fit.jump_indices.tolist() == [1, 2, 3, 4, 5]
        ci = ci_psi(ys, 0.55, 0.10)
        assert ci.empty and EMPTY_SET in ci.flags
        assert math.isnan(ci.lower) and ci.length == 0.0 and not ci.contains(0.5)

    def test_infinite_quantile_full_range(self):
        ci = ci_psi(noisy_exp(), 0.5, quantile=math.inf, search_range=(0, 5))
        assert (ci.lower, ci.upper) == (0, 5) and UNBOUNDED_AT_GRID in ci.flags

    def test_two_point_ratio_is_one_on_unit_interval(self):
        ci = ci_psi([1.0, 0.0], 0.6, 0.10, search_range=(0.0, 1.0))
        assert ci.empty
        # beyond [0, 1] one split block contributes and the ratio exceeds 1
        assert UNBOUNDED_AT_GRID in ci_psi([1.0, 0.0], 0.6, 0.10).flags

    def test_endpoints_on_sublevel_set(self):
        ys = noisy_exp(100, 3)
        ci = ci_psi(ys, 0.5, quantile=3.0, search_range=(0.5, 3.5))
        pf = ProfileFunction(ys, 0.5)
        grid = np.linspace(0.5, 3.5, 2000)
        inside = grid[pf.psi(grid) < 3.0]
        step = grid[1] - grid[0]
        assert inside.min() - step <= ci.lower <= inside.min()
        assert inside.max() <= ci.upper <= inside.max() + step

    def test_conservative_quantile(self):
        ci = ci_psi(noisy_exp(), 0.5, 0.10, hurst=0.7, hurst_mode=HurstMode.CONSERVATIVE)
        assert ci.quantile.value == 27.05 and ci.quantile.hurst == 0.95
        with pytest.raises(Unsupported):
            ci_psi(noisy_exp(), 0.5, 0.20, hurst_mode=HurstMode.CONSERVATIVE)

    def test_default_search_range(self):
        ys = noisy_exp()
        ci = ci_psi(ys, 0.5, 0.1)
        span = np.ptp(ys)
        assert ci.search_range == pytest.approx((ys.min() - 0.25 * span,
                                                 ys.max() + 0.25 * span))


class TestBand:
    def test_identical_points_constant_band(self):
        ys = noisy_exp(10, 2)
        b = band(ys, 0.1, (0.41, 0.49), k=2, tau2=0.1)
        ci = b.pointwise[0]
        assert b.pointwise[1].lower == ci.lower and b.pointwise[1].upper == ci.upper
        assert b.lower_steps.tolist() == [ci.lower, ci.lower]
        assert b.upper_steps.tolist() == [ci.upper, ci.upper]

    def test_envelopes(self):
        ys = noisy_exp(400, 4)
        for rule in ("max", "min"):
            b = band(ys, 0.1, lower_rule=rule)
            assert b.t_points.size == 7
            assert np.all(b.lower_steps <= b.upper_steps)
            assert np.all(np.diff(b.upper_steps) >= 0)
            step = np.diff(b.lower_steps)
            assert np.all(step >= 0) if rule == "max" else np.all(step <= 0)
            assert b.pointwise[0].level == pytest.approx(0.9 ** (1 / 7))

    def test_step_convention(self):
        b = band(noisy_exp(400, 5), 0.1, (0.2, 0.8), k=4)
        t = b.t_points
        mid = 0.5 * (t[1] + t[2])
        assert b.lower(mid) == b.lower_steps[1]
        assert b.upper(mid) == b.upper_steps[2]
        assert b.lower(t[1]) == b.lower_steps[1] and b.upper(t[1]) == b.upper_steps[1]
        with pytest.raises(InvalidInput):
            b.lower(0.9)

    def test_covers_truth_usually(self):
        # known tau2 isolates the band construction from the residual-based estimate
        hits = 0
        for seed in range(20):
            b = band(noisy_exp(400, seed, 0.2), 0.1, tau2=0.04)
            hits += b.covers(np.exp)
        assert hits >= 15

    def test_psi_band_runs(self):
        b = band(noisy_exp(300, 6), 0.1, k=4, per_point_method=Method.PSI)
        assert b.method is Method.PSI and len(b.pointwise) == 4

    def test_errors(self):
        with pytest.raises(Unsupported):
            band(noisy_exp(), per_point_method=Method.LN_LRD)
        with pytest.raises(InvalidInput):
            band(noisy_exp(), interval_ab=(0.0, 0.5))
        with pytest.raises(InvalidInput):
            band(noisy_exp(), k=1)
        with pytest.raises(DegenerateConstraint, match="band point 0"):
            band(noisy_exp(10), interval_ab=(0.05, 0.5), k=2, tau2=0.1)
