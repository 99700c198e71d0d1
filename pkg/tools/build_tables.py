"""Build the packaged quantile tables.

The four published tables (Psi and L, methods M1 and M2) are transcribed
below as ``p q1 se1 q2 se2 ...`` rows for the columns SRD, H = 0.7, 0.8,
0.9, 0.95.  The short-range extension tables (L, T and Psi on a fine
probability grid reaching p = 0.999) are simulated with method M1.

Usage::

    python3 tools/build_tables.py            # published tables only
    python3 tools/build_tables.py --simulate # also rebuild the extension
"""

import argparse
from pathlib import Path

from monotrend.limits import (Provenance, QuantileRow, QuantileTable, SRD,
                              simulate_m1)

HURSTS = (SRD, 0.7, 0.8, 0.9, 0.95)
STATISTIC = {"psi_m1": "PSI", "psi_m2": "PSI", "l_m1": "L", "l_m2": "L"}
METHOD = {"psi_m1": "M1", "psi_m2": "M2", "l_m1": "M1", "l_m2": "M2"}

PUBLISHED = {
    "psi_m1": """
.10 -0.35 0.011 -0.02 0.011 0.17 0.015 0.33 0.052 0.58 0.062
.15 0.10 0.024 0.26 0.019 0.47 0.040 0.63 0.001 0.90 0.002
.20 0.39 0.013 0.51 0.018 0.71 0.015 0.86 0.012 1.14 0.014
.25 0.55 0.009 0.73 0.023 0.92 0.002 1.09 0.008 1.36 0.008
.30 0.83 0.027 0.96 0.026 1.13 0.036 1.29 0.020 1.58 0.030
.35 1.04 0.012 1.20 0.011 1.36 0.022 1.50 0.012 1.99 0.012
.40 1.25 0.020 1.48 0.027 1.59 0.019 1.71 0.008 2.21 0.011
.45 1.69 0.053 1.79 0.016 1.85 0.003 1.94 0.003 2.41 0.005
.50 2.21 0.021 2.19 0.006 2.11 0.012 2.20 0.051 2.66 0.025
.55 2.88 0.047 2.69 0.053 2.43 0.010 2.49 0.041 2.93 0.042
.60 3.87 0.068 3.41 0.030 2.88 0.028 2.80 0.015 3.24 0.020
.65 6.28 0.103 4.69 0.310 3.47 0.067 3.18 0.038 3.59 0.072
.70 20.03 0.022 7.92 0.349 4.31 0.173 3.70 0.011 4.03 0.097
.75 23.91 0.032 22.82 0.060 5.95 0.286 4.40 0.035 4.68 0.060
.80 24.25 0.020 23.79 0.019 10.89 0.494 5.72 0.132 5.77 0.122
.85 24.67 0.022 24.51 0.036 24.14 0.023 8.43 0.539 8.30 0.096
.90 25.00 0.041 25.12 0.031 25.28 0.054 26.43 0.165 27.05 0.248
.95 25.21 0.023 25.92 0.017 26.32 0.026 28.02 0.489 33.13 0.188
""",
    "psi_m2": """
.10 -0.34 0.011 -0.02 0.011 0.15 0.015 0.33 0.052 0.59 0.062
.15 0.09 0.024 0.24 0.019 0.44 0.040 0.63 0.001 0.91 0.002
.20 0.38 0.013 0.50 0.018 0.69 0.015 0.85 0.012 1.13 0.014
.25 0.54 0.009 0.77 0.023 0.93 0.002 1.10 0.008 1.36 0.008
.30 0.85 0.027 0.91 0.026 1.11 0.036 1.30 0.020 1.58 0.030
.35 1.02 0.012 1.19 0.011 1.39 0.022 1.52 0.012 1.99 0.012
.40 1.25 0.020 1.44 0.027 1.60 0.019 1.72 0.008 2.22 0.011
.45 1.70 0.053 1.78 0.016 1.84 0.003 1.95 0.003 2.40 0.005
.50 2.23 0.021 2.17 0.006 2.10 0.012 2.21 0.051 2.70 0.025
.55 2.85 0.047 2.70 0.053 2.45 0.010 2.51 0.041 2.92 0.042
.60 3.90 0.068 3.38 0.030 2.85 0.028 2.83 0.015 3.27 0.020
.65 6.30 0.103 4.48 0.310 3.50 0.067 3.21 0.038 3.59 0.072
.70 20.02 0.022 7.80 0.349 4.20 0.173 3.71 0.011 4.04 0.097
.75 23.89 0.032 22.80 0.060 6.12 0.286 4.40 0.035 4.66 0.060
.80 24.22 0.020 23.76 0.019 10.80 0.494 5.83 0.132 5.73 0.122
.85 24.61 0.022 24.49 0.036 24.10 0.023 8.51 0.539 8.24 0.096
.90 25.01 0.041 25.16 0.031 25.29 0.054 26.51 0.165 27.10 0.248
.95 25.27 0.023 25.90 0.017 26.30 0.026 28.13 0.489 33.15 0.188
""",
    "l_m1": """
.10 0.01 0.001 0.02 0.001 0.03 0.000 0.04 0.000 0.05 0.000
.15 0.02 0.000 0.05 0.000 0.08 0.004 0.09 0.005 0.10 0.004
.20 0.04 0.001 0.10 0.000 0.14 0.018 0.18 0.018 0.19 0.018
.25 0.06 0.001 0.16 0.000 0.23 0.003 0.29 0.004 0.31 0.004
.30 0.10 0.002 0.24 0.001 0.34 0.002 0.36 0.002 0.39 0.003
.35 0.13 0.004 0.34 0.010 0.48 0.028 0.50 0.029 0.51 0.025
.40 0.17 0.005 0.44 0.018 0.66 0.005 0.69 0.005 0.72 0.005
.45 0.22 0.010 0.57 0.012 0.87 0.011 0.90 0.011 0.92 0.011
.50 0.28 0.009 0.71 0.010 1.12 0.039 1.47 0.041 1.61 0.033
.55 0.35 0.013 0.91 0.042 1.43 0.034 1.61 0.036 1.75 0.035
.60 0.43 0.020 1.14 0.068 1.79 0.028 1.88 0.029 1.92 0.031
.65 0.54 0.005 1.42 0.009 2.21 0.024 2.49 0.026 2.62 0.027
.70 0.66 0.002 1.76 0.037 2.79 0.041 3.25 0.043 3.87 0.042
.75 0.82 0.004 2.18 0.000 3.52 0.019 4.37 0.020 4.99 0.020
.80 1.00 0.002 2.77 0.017 4.48 0.044 5.01 0.047 5.36 0.045
.85 1.23 0.003 3.56 0.045 5.85 0.018 6.66 0.019 7.11 0.018
.90 1.62 0.002 4.63 0.035 7.74 0.060 9.64 0.063 10.21 0.063
.95 2.26 0.006 6.64 0.120 11.23 0.029 15.61 0.031 19.91 0.033
""",
    "l_m2": """
.10 0.01 0.001 0.03 0.001 0.03 0.000 0.04 0.000 0.05 0.000
.15 0.02 0.000 0.05 0.000 0.08 0.004 0.08 0.005 0.10 0.004
.20 0.04 0.001 0.10 0.000 0.15 0.018 0.18 0.018 0.19 0.018
.25 0.07 0.001 0.16 0.000 0.23 0.003 0.29 0.004 0.31 0.004
.30 0.09 0.002 0.24 0.001 0.34 0.002 0.36 0.002 0.39 0.003
.35 0.13 0.004 0.35 0.010 0.50 0.028 0.48 0.029 0.52 0.025
.40 0.17 0.005 0.43 0.018 0.66 0.005 0.69 0.005 0.71 0.005
.45 0.24 0.010 0.57 0.012 0.85 0.011 0.90 0.011 0.93 0.011
.50 0.28 0.009 0.71 0.010 1.10 0.039 1.48 0.041 1.61 0.033
.55 0.35 0.013 0.97 0.042 1.39 0.034 1.62 0.036 1.76 0.035
.60 0.44 0.020 1.13 0.068 1.76 0.028 1.90 0.029 1.92 0.031
.65 0.55 0.005 1.42 0.009 2.25 0.024 2.51 0.026 2.61 0.027
.70 0.65 0.002 1.78 0.037 2.82 0.041 3.28 0.043 3.87 0.042
.75 0.80 0.004 2.18 0.000 3.51 0.019 4.38 0.020 5.01 0.020
.80 1.00 0.002 2.74 0.017 4.42 0.044 5.06 0.047 5.36 0.045
.85 1.23 0.003 3.52 0.045 5.84 0.018 6.67 0.019 7.13 0.018
.90 1.62 0.002 4.67 0.035 7.79 0.060 9.66 0.063 10.24 0.063
.95 2.25 0.006 6.68 0.120 11.19 0.029 15.63 0.031 20.00 0.033
""",
}

EXTENDED_PROBS = tuple(round(0.01 * i, 2) for i in range(1, 100)) + \
    tuple(round(0.99 + 0.001 * i, 3) for i in range(1, 10))


def published_table(key: str) -> QuantileTable:
    entries = {h: [] for h in HURSTS}
    for line in PUBLISHED[key].strip().splitlines():
        f = [float(x) for x in line.split()]
        for j, h in enumerate(HURSTS):
            entries[h].append(QuantileRow(f[0], f[1 + 2 * j], f[2 + 2 * j]))
    return QuantileTable(STATISTIC[key], entries, Provenance.EMBEDDED_PAPER,
                         {"method": METHOD[key], "n": 10 ** 6, "M": 10 ** 4})


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1]
                                         / "src" / "monotrend" / "data"))
    ap.add_argument("--simulate", action="store_true")
    ap.add_argument("--M", type=int, default=20000)
    ap.add_argument("--n", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=20231)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for key in PUBLISHED:
        published_table(key).save(out / f"{key}.json")
    if args.simulate:
        samp, _ = simulate_m1(n=args.n, M=args.M, seed=args.seed,
                              probs=EXTENDED_PROBS, workers=args.workers)
        for stat in ("L", "T", "PSI"):
            samp.table(stat, EXTENDED_PROBS).save(out / f"srd_m1_{stat.lower()}.json")


if __name__ == "__main__":
    main()
