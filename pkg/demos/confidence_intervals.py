"""Pointwise intervals for m(1/2) on a synthetic exponential trend.

Generates ARMA(2,2) noise around e^t, fits the isotonic estimate and
prints the L_n, T_n and Psi intervals.  Then repeats with long-range
dependent noise, where the L_n interval needs H, a and b.

Run with ``python3 demos/confidence_intervals.py``.
"""

import math

import numpy as np

from monotrend import ci_ln_lrd, ci_ln_srd, ci_psi, ci_tn_srd
from monotrend import DependenceSpec, generate
from monotrend.inference import lrd_nuisance


def main():
    n, t0 = 500, 0.5
    t = np.arange(1, n + 1) / n
    spec = DependenceSpec("ARMA", ar=(0.8, -0.5), ma=(-0.2, 0.3), marginal_var=0.2)
    ys = np.exp(t) + generate(spec, n, seed=1).values
    print(f"true m(t0) = {math.exp(t0):.4f}")
    for name, f in (("L_n", ci_ln_srd), ("T_n", ci_tn_srd), ("Psi", ci_psi)):
        ci = f(ys, t0, 0.10)
        print(f"{name:>4}: [{ci.lower:.4f}, {ci.upper:.4f}]  length {ci.length:.4f}  "
              f"flags {sorted(ci.flags)}")

    fgn = DependenceSpec("FGN", hurst=0.9, marginal_var=0.2)
    ys = np.exp(t) + generate(fgn, n, seed=2).values
    est = lrd_nuisance(ys, t0)
    ci = ci_ln_lrd(ys, t0, 0.10, hurst=0.9, a_hat=est["a_hat"], b_hat=est["b_hat"])
    print(f"LRD L_n with H=0.9, a_hat={est['a_hat']:.3f}, b_hat={est['b_hat']:.3f}: "
          f"[{ci.lower:.4f}, {ci.upper:.4f}]")


if __name__ == "__main__":
    main()
