"""Small M1 and M2 runs of the limit quantiles.

Both designs should agree within Monte Carlo error; the shipped tables
hold the large-sample values.  Uses a modest M so it finishes quickly.
"""

from monotrend import Statistic, load_default_tables, lookup, simulate_m1, simulate_m2
from monotrend.limits import SRD, empirical_quantile


def main():
    m1, _ = simulate_m1(n=10_000, M=500, seed=11)
    m2, _ = simulate_m2(step=1e-3, M=500, seed=11)
    tables = load_default_tables()
    for stat in (Statistic.L, Statistic.PSI):
        for p in (0.5, 0.9):
            a = empirical_quantile(m1.values(stat), p)
            b = empirical_quantile(m2.values(stat), p)
            print(f"{stat.value:>3} p={p}: M1 {a:.3f}  M2 {b:.3f}  "
                  f"table {lookup(tables, stat, SRD, p)}")
    print(f"share of infinite Psi: M1 {m1.n_psi_infinite / m1.m:.2f}, "
          f"M2 {m2.n_psi_infinite / m2.m:.2f}")


if __name__ == "__main__":
    main()
