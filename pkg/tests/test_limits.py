import math

import numpy as np
import pytest

from monotrend.errors import InvalidInput, OutOfRange, Unsupported
from monotrend.limits import (DEFAULT_PROBS, SRD, HurstMode, Provenance,
                              QuantileRow, QuantileTable, Statistic, TableSet,
                              empirical_quantile, load_default_tables, lookup,
                              quantile_se, resolve, simulate_m1, simulate_m2,
                              table_dir)


@pytest.fixture(scope="module")
def tables():
    return load_default_tables()


def small_table(rows=((0.5, 1.0, 0.1), (0.9, 2.0, 0.2))):
    return QuantileTable(Statistic.L, {0.5: tuple(QuantileRow(*r) for r in rows),
                                       0.8: tuple(QuantileRow(p, 2 * q, s) for p, q, s in rows)},
                         Provenance.SIMULATED_M1, {"n": 10})


class TestLookup:
    def test_conservative_psi(self, tables):
        assert lookup(tables, Statistic.PSI, 0.7, 0.90, HurstMode.CONSERVATIVE) == 27.05

    def test_srd_psi(self, tables):
        assert lookup(tables, "PSI", SRD, 0.95) == 25.21

    def test_lrd_l(self, tables):
        assert lookup(tables, Statistic.L, 0.9, 0.90) == 9.64

    def test_provenance_reported(self, tables):
        r = resolve(tables, Statistic.PSI, SRD, 0.5)
        assert r.provenance is Provenance.EMBEDDED_PAPER and r.value == 2.21

    def test_conservative_other_level_unsupported(self, tables):
        with pytest.raises(Unsupported):
            lookup(tables, Statistic.PSI, 0.7, 0.80, HurstMode.CONSERVATIVE)

    def test_exact_missing_key(self, tables):
        with pytest.raises(OutOfRange):
            lookup(tables, Statistic.PSI, 0.65, 0.90)

    def test_nearest(self, tables):
        assert lookup(tables, Statistic.PSI, 0.68, 0.90, HurstMode.NEAREST_H) == \
            lookup(tables, Statistic.PSI, 0.7, 0.90)
        # halfway between 0.7 and 0.8 goes to the larger index
        assert resolve(small_table(), Statistic.L, 0.65, 0.5, HurstMode.NEAREST_H).hurst == 0.8

    def test_interpolation_in_p(self):
        assert lookup(small_table(), Statistic.L, 0.5, 0.7) == pytest.approx(1.5)
        with pytest.raises(OutOfRange):
            lookup(small_table(), Statistic.L, 0.5, 0.95)

    def test_simulated_t_table_present(self, tables):
        r = resolve(tables, Statistic.T, SRD, 0.9)
        assert r.provenance is Provenance.SIMULATED_M1 and 0 < r.value < 1.62

    def test_bad_p(self, tables):
        with pytest.raises(InvalidInput):
            lookup(tables, Statistic.L, SRD, 1.0)

    def test_env_override(self, tmp_path, monkeypatch):
        small_table().save(tmp_path / "mine.json")
        monkeypatch.setenv("MONOTREND_TABLE_DIR", str(tmp_path))
        assert table_dir() == tmp_path
        ts = load_default_tables()
        assert ts.names == ("mine",)


class TestTableFormat:
    def test_round_trip_byte_identical(self):
        for path in sorted(table_dir().glob("*.json")):
            text = path.read_text()
            assert QuantileTable.from_json(text).to_json() == text

    def test_embedded_monotone(self, tables):
        for _, t in tables:
            for h in t.hursts:
                q = [r.q for r in t.rows(h)]
                assert all(b >= a for a, b in zip(q, q[1:]))

    def test_rejects_decreasing(self):
        with pytest.raises(InvalidInput):
            small_table(((0.5, 2.0, 0.1), (0.9, 1.0, 0.1)))
        with pytest.raises(InvalidInput):
            small_table(((0.9, 1.0, 0.1), (0.5, 2.0, 0.1)))

    def test_infinite_round_trip(self):
        t = small_table(((0.5, 1.0, 0.1), (0.9, math.inf, math.inf)))
        again = QuantileTable.from_json(t.to_json())
        assert math.isinf(again.rows(0.5)[1].q)
        assert again.to_json() == t.to_json()

    def test_table_set_order(self, tables):
        provs = [t.provenance for _, t in tables]
        assert provs == sorted(provs, key=lambda p: p is not Provenance.EMBEDDED_PAPER)
        assert isinstance(tables, TableSet)


class TestQuantiles:
    def test_single_realisation(self):
        for p in DEFAULT_PROBS:
            assert empirical_quantile([3.5], p) == 3.5

    def test_order_statistic(self):
        x = np.arange(1, 11, dtype=float)
        assert empirical_quantile(x, 0.5) == 5.0
        assert empirical_quantile(x, 0.9) == 9.0
        assert empirical_quantile(x, 0.91) == 10.0

    def test_uniform_se(self):
        u = np.random.default_rng(0).uniform(size=10_000)
        assert quantile_se(u, 0.5) == pytest.approx(0.005, rel=0.5)

    def test_se_scales_with_root_m(self):
        rng = np.random.default_rng(1)
        a = np.mean([quantile_se(rng.normal(size=2000), 0.5) for _ in range(30)])
        b = np.mean([quantile_se(rng.normal(size=4000), 0.5) for _ in range(30)])
        assert a / b == pytest.approx(math.sqrt(2), rel=0.15)

    def test_empty_window_is_infinite(self):
        x = np.r_[np.zeros(50), np.full(50, np.inf)]
        assert math.isinf(quantile_se(x, 0.99))


class TestSimulation:
    def test_m1_small_dominance_and_determinism(self):
        a, ta = simulate_m1(n=500, M=40, seed=3, probs=(0.5, 0.9))
        b, tb = simulate_m1(n=500, M=40, seed=3, probs=(0.5, 0.9), workers=2)
        assert np.array_equal(a.l_values, b.l_values)
        assert np.array_equal(a.psi_values, b.psi_values)
        assert ta.to_json() == tb.to_json()
        assert np.all(a.l_values >= a.t_values) and np.all(a.t_values >= 0)
        assert a.m == 40 and a.method is Provenance.SIMULATED_M1

    def test_m1_single_replication(self):
        s, t = simulate_m1(n=200, M=1, statistic=Statistic.L, probs=(0.1, 0.5, 0.9))
        assert [r.q for r in t.rows(SRD)] == [s.l_values[0]] * 3

    def test_m1_lrd_runs(self):
        s, t = simulate_m1(n=512, M=20, hurst=0.8, statistic=Statistic.L, probs=(0.5,))
        assert t.hursts == (0.8,) and np.all(s.l_values >= s.t_values)

    def test_m2_zero_noise(self):
        s, _ = simulate_m2(step=0.01, M=3, zero_noise=True)
        assert np.all(s.l_values == s.t_values)
        assert np.all(np.isinf(s.psi_values))

    def test_m2_small(self):
        a, _ = simulate_m2(step=0.005, M=30, seed=4)
        b, _ = simulate_m2(step=0.005, M=30, seed=4, workers=3)
        assert np.array_equal(a.l_values, b.l_values) and a.redraws == b.redraws
        assert np.all(a.l_values >= a.t_values - 1e-12)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            simulate_m1(n=50, M=10)
        with pytest.raises(InvalidInput):
            simulate_m1(n=500, M=10, probs=(0.5, 0.4))
        with pytest.raises(InvalidInput):
            simulate_m2(step=0.0)
        with pytest.raises(InvalidInput):
            simulate_m1(n=500, M=10, hurst=1.0)
