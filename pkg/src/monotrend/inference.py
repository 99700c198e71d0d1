"""Confidence intervals for m(t0) by test inversion, and confidence bands.

For an interval the statistic profile ``theta -> S_n(theta)`` is compared
with a limit quantile ``q``:

* ``LN_SRD`` / ``TN_SRD``: ``{theta : S_n(theta) <= tau2 q}``; the profile is
  U-shaped, so each endpoint is found by grid bracketing and bisection.
* ``LN_LRD``: ``{theta : n^{-e} L_n(theta) <= a^2 (a/b)^e q}`` with
  ``e = (2H - 1)/(2 - H)``.
* ``PSI``: ``[inf, sup]`` of ``{theta : Psi_n(theta) < q}`` on a dense grid.
  The set can be empty, e.g. when ``t0`` is a jump point of the fit.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidNuisance, MonotrendError, Unsupported
from .estimators import (estimate_derivative, estimate_hurst, estimate_sigma2,
                         estimate_tau2, isotonic_residuals,
                         oversmooth_bandwidth)
from .isotonic import _as_series, fit_isotonic
from .limits import (SRD, HurstMode, QuantileLookup, Statistic,
                     load_default_tables, resolve, table_dir)
from .stats import ProfileFunction

__all__ = [
    "Method",
    "ConfidenceInterval",
    "ConfidenceBand",
    "ci_ln_srd",
    "ci_tn_srd",
    "ci_ln_lrd",
    "ci_psi",
    "band",
    "lrd_nuisance",
    "lrd_threshold",
    "UNBOUNDED_AT_GRID",
    "EMPTY_SET",
]

UNBOUNDED_AT_GRID = "UNBOUNDED_AT_GRID"
EMPTY_SET = "EMPTY_SET"

_BRACKET_POINTS = 256
_REL_TOL = 1e-8


class Method(str, enum.Enum):
    LN_SRD = "LN_SRD"
    TN_SRD = "TN_SRD"
    LN_LRD = "LN_LRD"
    PSI = "PSI"


@dataclass(frozen=True)
class ConfidenceInterval:
    """Test-inversion interval.

    ``lower``/``upper`` are ``nan`` for an empty set; ``flags`` may contain
    ``UNBOUNDED_AT_GRID`` (an endpoint hit the search range) or ``EMPTY_SET``.
    """

    lower: float
    upper: float
    level: float
    method: Method
    nuisance: dict
    theta_hat: float
    threshold: float
    quantile: QuantileLookup | float
    search_range: tuple
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for name in ("lower", "upper", "theta_hat", "threshold"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "search_range", tuple(float(x) for x in self.search_range))

    @property
    def empty(self) -> bool:
        return EMPTY_SET in self.flags

    @property
    def length(self) -> float:
        return 0.0 if self.empty else self.upper - self.lower

    def contains(self, theta: float) -> bool:
        return (not self.empty) and self.lower <= theta <= self.upper

    def to_dict(self) -> dict:
        q = self.quantile.to_dict() if isinstance(self.quantile, QuantileLookup) \
            else {"value": _num(self.quantile), "provenance": "OVERRIDE"}
        return {
            "method": self.method.value,
            "level": self.level,
            "lower": None if self.empty else self.lower,
            "upper": None if self.empty else self.upper,
            "theta_hat": self.theta_hat,
            "threshold": _num(self.threshold),
            "quantile": q,
            "nuisance": {k: _num(v) for k, v in self.nuisance.items()},
            "search_range": list(self.search_range),
            "flags": sorted(self.flags),
        }


def _num(x):
    if isinstance(x, (float, np.floating)) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, np.generic):
        return x.item()
    return x


@functools.lru_cache(maxsize=4)
def _cached_tables(path: str):
    return load_default_tables(path)


def _tables(table):
    return _cached_tables(str(table_dir())) if table is None else table


def _check_level(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must lie in (0, 1), got {alpha}")


def _quantile(table, statistic, hurst, p, mode, override):
    if override is not None:
        return float(override), float(override)
    res = resolve(_tables(table), statistic, hurst, p, mode)
    return res.value, res


def _default_range(ys, inflate):
    lo, hi = float(ys.min()), float(ys.max())
    span = hi - lo if hi > lo else max(1.0, abs(hi))
    return lo - inflate * span, hi + inflate * span


def _bisect(f, inside, outside, tol):
    """Crossing between a point with ``f <= 0`` and one with ``f > 0``."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if f(mid) <= 0:
            inside = mid
        else:
            outside = mid
    return inside


def _u_shape_endpoints(stat, thr, theta_hat, search):
    """Sublevel set ``{stat <= thr}`` of a U-shaped profile around ``theta_hat``."""
    lo_s, hi_s = search
    tol = _REL_TOL * (hi_s - lo_s)
    flags = set()

    def f(th):
        return float(stat(np.array([th]))[0]) - thr

    ends = []
    for edge in (lo_s, hi_s):
        grid = np.linspace(edge, theta_hat, _BRACKET_POINTS)
        vals = stat(grid) - thr
        out = np.flatnonzero(vals > 0)
        if out.size == 0:
            flags.add(UNBOUNDED_AT_GRID)
            ends.append(edge)
            continue
        j = out[-1]  # last grid point, walking toward theta_hat, outside the set
        ends.append(_bisect(f, grid[j + 1], grid[j], tol))
    return ends[0], ends[1], flags


def _srd(series, t0, alpha, table, tau2, statistic, method, quantile, search_range):
    _check_level(alpha)
    series = _as_series(series)
    pf = ProfileFunction(series, t0)
    nuisance = {}
    if tau2 is None:
        est = estimate_tau2(isotonic_residuals(series, pf.fit))
        tau2 = est.value
        nuisance["tau2_clamped"] = est.clamped
    if not (np.isfinite(tau2) and tau2 > 0):
        raise InvalidNuisance(f"tau2 must be positive, got {tau2}")
    nuisance = {"tau2": float(tau2), **nuisance}
    q, q_info = _quantile(table, statistic, SRD, 1 - alpha, HurstMode.EXACT_H, quantile)
    thr = tau2 * q
    search = tuple(search_range) if search_range is not None else \
        _default_range(series.ys, 1.0)
    stat = pf.l_raw if statistic is Statistic.L else pf.t_raw
    lo, hi, flags = _u_shape_endpoints(stat, thr, pf.theta_hat, search)
    return ConfidenceInterval(lo, hi, 1 - alpha, method, nuisance, pf.theta_hat,
                              thr, q_info, search, frozenset(flags))


def ci_ln_srd(series, t0: float, alpha: float = 0.05, table=None,
              tau2: float | None = None, quantile: float | None = None,
              search_range=None) -> ConfidenceInterval:
    """``{theta : L_n(theta) / tau2 <= q_L(1 - alpha)}`` under short-range dependence.

    Parameters
    ----------
    series : Series or array_like
    t0 : float
        Location in (0, 1).
    alpha : float
    table : QuantileTable or TableSet, optional
        Defaults to the packaged tables.
    tau2 : float, optional
        Long-run variance; estimated from the isotonic residuals if omitted.
    quantile : float, optional
        Use this value instead of a table quantile.
    search_range : (float, float), optional
        Default ``[min y - range, max y + range]``.

    Examples
    --------
    >>> ci = ci_ln_srd([1.0, 0.0], 0.6, tau2=1.0, quantile=0.08)
    >>> round(ci.lower, 6), round(ci.upper, 6)
    (0.3, 0.7)
    """
    return _srd(series, t0, alpha, table, tau2, Statistic.L, Method.LN_SRD,
                quantile, search_range)


def ci_tn_srd(series, t0: float, alpha: float = 0.05, table=None,
              tau2: float | None = None, quantile: float | None = None,
              search_range=None) -> ConfidenceInterval:
    """As :func:`ci_ln_srd` with the T statistic and its quantiles."""
    return _srd(series, t0, alpha, table, tau2, Statistic.T, Method.TN_SRD,
                quantile, search_range)


def lrd_threshold(n: int, hurst: float, a_hat: float, b_hat: float, q: float) -> float:
    """Bound on the raw ``L_n``: ``n^e a^2 (a/b)^e q`` with ``e = (2H-1)/(2-H)``."""
    e = (2 * hurst - 1) / (2 - hurst)
    return n ** e * a_hat ** 2 * (a_hat / b_hat) ** e * q


def lrd_nuisance(series, t0: float, bandwidth: float | None = None,
                 vanishing_moments: int = 4) -> dict:
    """Plug-in ``H``, ``a = sigma`` and ``b = m'(t0)/2`` for :func:`ci_ln_lrd`."""
    series = _as_series(series)
    fit = fit_isotonic(series)
    h = bandwidth if bandwidth is not None else oversmooth_bandwidth(series.n)
    deriv = estimate_derivative(fit, t0, h)
    return {
        "hurst": estimate_hurst(series.ys, vanishing_moments).value,
        "a_hat": math.sqrt(estimate_sigma2(series)),
        "b_hat": deriv.value / 2.0,
        "bandwidth": h,
    }


def ci_ln_lrd(series, t0: float, alpha: float, table=None, hurst: float = None,
              a_hat: float = None, b_hat: float = None,
              hurst_mode=HurstMode.NEAREST_H, quantile: float | None = None,
              search_range=None) -> ConfidenceInterval:
    """``{theta : n^{-e} L_n(theta) <= a^2 (a/b)^e q_{L,H}(1 - alpha)}``.

    Raises
    ------
    InvalidNuisance
        If ``b_hat <= 0`` or ``a_hat <= 0``.
    """
    _check_level(alpha)
    if hurst is None or not 0.5 < hurst < 1.0:
        raise InvalidInput(f"hurst must lie in (0.5, 1), got {hurst}")
    if a_hat is None or not a_hat > 0:
        raise InvalidNuisance(f"a_hat must be positive, got {a_hat}")
    if b_hat is None or not b_hat > 0:
        raise InvalidNuisance(f"b_hat must be positive, got {b_hat} "
                              "(degenerate derivative estimate)")
    series = _as_series(series)
    pf = ProfileFunction(series, t0)
    q, q_info = _quantile(table, Statistic.L, hurst, 1 - alpha, hurst_mode, quantile)
    thr = lrd_threshold(series.n, hurst, a_hat, b_hat, q)
    search = tuple(search_range) if search_range is not None else \
        _default_range(series.ys, 1.0)
    lo, hi, flags = _u_shape_endpoints(pf.l_raw, thr, pf.theta_hat, search)
    nuisance = {"hurst": float(hurst), "a_hat": float(a_hat), "b_hat": float(b_hat)}
    return ConfidenceInterval(lo, hi, 1 - alpha, Method.LN_LRD, nuisance,
                              pf.theta_hat, thr, q_info, search, frozenset(flags))


def ci_psi(series, t0: float, alpha: float = 0.05, table=None, hurst: float = SRD,
           hurst_mode=HurstMode.EXACT_H, search_range=None, grid_size: int = 2000,
           quantile: float | None = None) -> ConfidenceInterval:
    """``[inf, sup]`` of ``{theta : Psi_n(theta) < q_Psi(1 - alpha)}``.

    The default search range is the data range widened by 25% on each side.
    With ``hurst_mode="CONSERVATIVE"`` the H = 0.95 column is used whatever
    ``hurst`` is, which needs ``alpha`` in {0.05, 0.10}.
    """
    _check_level(alpha)
    series = _as_series(series)
    pf = ProfileFunction(series, t0)
    q, q_info = _quantile(table, Statistic.PSI, hurst, 1 - alpha, hurst_mode, quantile)
    search = tuple(search_range) if search_range is not None else \
        _default_range(series.ys, 0.25)
    lo_s, hi_s = search
    nuisance = {"hurst": float(hurst)}
    args = (1 - alpha, Method.PSI, nuisance, pf.theta_hat, q, q_info, search)
    if math.isinf(q) and q > 0:
        return ConfidenceInterval(lo_s, hi_s, *args, frozenset({UNBOUNDED_AT_GRID}))
    grid = np.linspace(lo_s, hi_s, int(grid_size))
    inside = pf.psi(grid) < q
    idx = np.flatnonzero(inside)
    if idx.size == 0:
        return ConfidenceInterval(math.nan, math.nan, *args, frozenset({EMPTY_SET}))
    tol = _REL_TOL * (hi_s - lo_s)

    def f(th):
        return 0.0 if float(pf.psi(np.array([th]))[0]) < q else 1.0

    flags = set()
    i, j = idx[0], idx[-1]
    if i == 0:
        lower = lo_s
        flags.add(UNBOUNDED_AT_GRID)
    else:
        lower = _bisect(f, grid[i], grid[i - 1], tol)
    if j == grid.size - 1:
        upper = hi_s
        flags.add(UNBOUNDED_AT_GRID)
    else:
        upper = _bisect(f, grid[j], grid[j + 1], tol)
    return ConfidenceInterval(lower, upper, *args, frozenset(flags))


# ---------------------------------------------------------------- bands

@dataclass(frozen=True)
class ConfidenceBand:
    """Monotone step envelopes over ``[t_points[0], t_points[-1]]``.

    ``lower(t) = lower_steps[i]`` on ``[t_i, t_{i+1})`` and
    ``upper(t) = upper_steps[i+1]`` on ``(t_i, t_{i+1}]``.
    """

    t_points: np.ndarray
    lower_steps: np.ndarray
    upper_steps: np.ndarray
    level: float
    method: Method
    pointwise: tuple
    raw_lower: np.ndarray
    raw_upper: np.ndarray
    lower_rule: str = "max"

    def lower(self, t):
        t = np.asarray(t, dtype=float)
        i = np.searchsorted(self.t_points, t, side="right") - 1
        if np.any(i < 0) or np.any(t > self.t_points[-1]):
            raise InvalidInput("t outside the band interval")
        return self.lower_steps[np.clip(i, 0, self.t_points.size - 1)]

    def upper(self, t):
        t = np.asarray(t, dtype=float)
        i = np.searchsorted(self.t_points, t, side="left")
        if np.any(t < self.t_points[0]) or np.any(i >= self.t_points.size):
            raise InvalidInput("t outside the band interval")
        return self.upper_steps[i]

    def covers(self, m, t=None) -> bool:
        """Whether ``lower(t) <= m(t) <= upper(t)`` at the band knots (or at ``t``)."""
        t = self.t_points if t is None else np.asarray(t, dtype=float)
        v = np.asarray(m(t), dtype=float)
        return bool(np.all(self.lower(t) <= v) and np.all(v <= self.upper(t)))

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "level": self.level,
            "lower_rule": self.lower_rule,
            "t": self.t_points.tolist(),
            "lower": self.lower_steps.tolist(),
            "upper": self.upper_steps.tolist(),
            "raw_lower": [None if math.isnan(x) else x for x in self.raw_lower.tolist()],
            "raw_upper": [None if math.isnan(x) else x for x in self.raw_upper.tolist()],
            "pointwise_level": self.pointwise[0].level if self.pointwise else None,
        }


def _monotone(values, rule):
    if rule == "max":
        return np.maximum.accumulate(values)
    if rule == "min":
        return np.minimum.accumulate(values)
    raise InvalidInput(f"unknown monotonization rule {rule!r}")


def band(series, alpha: float = 0.10, interval_ab=(0.1, 0.9), k: int | None = None,
         per_point_method=Method.LN_SRD, table=None, tau2: float | None = None,
         lower_rule: str = "max", **psi_kwargs) -> ConfidenceBand:
    """Conservative ``1 - alpha`` band from ``k`` pointwise intervals.

    Each point ``t_i`` (equispaced in ``[a, b]``) gets an interval at level
    ``(1 - alpha)^{1/k}``.  Upper bounds are monotonized by a running
    maximum.  Lower bounds use a running maximum by default
    (``lower_rule="max"``); ``"min"`` gives the running minimum instead.
    An empty pointwise set (possible with ``PSI``) contributes no bound.

    Raises
    ------
    Unsupported
        For ``LN_LRD``.
    """
    _check_level(alpha)
    method = Method(per_point_method)
    if method is Method.LN_LRD:
        raise Unsupported("confidence bands are offered for short-range methods only")
    series = _as_series(series)
    a, b = (float(x) for x in interval_ab)
    if not 0.0 < a < b < 1.0:
        raise InvalidInput(f"interval [{a}, {b}] must lie inside (0, 1)")
    if k is None:
        k = int(math.floor(series.n ** (1.0 / 3.0) + 1e-9))
    if k < 2:
        raise InvalidInput("k must be at least 2")
    ts = np.linspace(a, b, k)
    level_pp = (1.0 - alpha) ** (1.0 / k)
    alpha_pp = 1.0 - level_pp
    if method is not Method.PSI and tau2 is None:
        tau2 = estimate_tau2(isotonic_residuals(series)).value
    cis = []
    for i, t in enumerate(ts):
        try:
            if method is Method.LN_SRD:
                ci = ci_ln_srd(series, t, alpha_pp, table, tau2)
            elif method is Method.TN_SRD:
                ci = ci_tn_srd(series, t, alpha_pp, table, tau2)
            else:
                ci = ci_psi(series, t, alpha_pp, table, **psi_kwargs)
        except MonotrendError as exc:
            raise type(exc)(f"band point {i} (t={t}): {exc}") from exc
        cis.append(ci)
    raw_lo = np.array([ci.lower for ci in cis])
    raw_hi = np.array([ci.upper for ci in cis])
    lo_fill = np.where(np.isnan(raw_lo), -np.inf if lower_rule == "max" else np.inf, raw_lo)
    hi_fill = np.where(np.isnan(raw_hi), -np.inf, raw_hi)
    return ConfidenceBand(ts, _monotone(lo_fill, lower_rule), _monotone(hi_fill, "max"),
                          1.0 - alpha, method, tuple(cis), raw_lo, raw_hi, lower_rule)
