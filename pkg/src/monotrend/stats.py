"""Discrepancy statistics between unconstrained and constrained isotonic fits.

For a hypothesised value ``theta`` of ``m(t0)``:

* ``l_raw`` is the increase in residual sum of squares caused by the
  constraint,
* ``t_raw`` is the squared L2 distance between the two fits,
* ``r = l_raw / t_raw`` (``0/0`` read as 1) and ``psi = -log(r - 1)``.

Values are unscaled; the dependence-specific normalisation lives in
:mod:`monotrend.inference`.

Profiles in ``theta`` use the block form of the split fit.  Writing ``a`` for
a split level with block size ``w``, ``u`` for the unconstrained value on the
block and ``c`` for the constrained one,
``t_raw = sum w (u - c)^2`` and ``l_raw - t_raw = 2 sum w (c - theta)(u - c)``,
where every term of the second sum is non-negative.  The ratio is therefore
computed as ``1 + excess / t_raw`` without cancellation, and is exactly 1
whenever no block contributes to the excess.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .isotonic import (SplitFit, _as_series, evaluate_fit,
                       fit_constrained, fit_isotonic, split_fit)

__all__ = [
    "PSI_FLOOR",
    "StatValue",
    "StatProfile",
    "ProfileFunction",
    "discrepancy",
    "profile",
    "profile_function",
    "ratio_and_psi",
]

#: ``r - 1`` at or below this is reported as ``psi = +inf``.
PSI_FLOOR = 1e-15


@dataclass(frozen=True)
class StatValue:
    l_raw: float
    t_raw: float
    r: float
    psi: float
    psi_infinite: bool

    def to_dict(self) -> dict:
        return {
            "l_raw": self.l_raw,
            "t_raw": self.t_raw,
            "r": self.r,
            "psi": None if self.psi_infinite else self.psi,
            "psi_infinite": self.psi_infinite,
        }


def ratio_and_psi(l_raw, t_raw, excess=None):
    """Ratio ``l/t`` (0/0 -> 1) and ``psi``, elementwise.

    ``excess`` is ``l - t`` when it is known more accurately than the
    difference of the two arguments.
    """
    l_raw = np.asarray(l_raw, dtype=float)
    t_raw = np.asarray(t_raw, dtype=float)
    if excess is None:
        excess = l_raw - t_raw
    excess = np.asarray(excess, dtype=float)
    pos = t_raw > 0
    safe_t = np.where(pos, t_raw, 1.0)
    r_minus_1 = np.where(pos, excess / safe_t, 0.0)
    r = 1.0 + r_minus_1
    infinite = r_minus_1 <= PSI_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = np.where(infinite, np.inf, -np.log(np.where(infinite, 1.0, r_minus_1)))
    return r, psi, infinite


def _stat_value(l_raw, t_raw, excess=None) -> StatValue:
    r, psi, inf = ratio_and_psi(l_raw, t_raw, excess)
    return StatValue(float(l_raw), float(t_raw), float(r), float(psi), bool(inf))


def discrepancy(series, t0: float, theta: float) -> StatValue:
    """Statistics at one ``theta``, evaluated from the defining sums.

    Examples
    --------
    >>> v = discrepancy([1.0, 0.0], 0.6, 0.0)
    >>> v.l_raw, v.t_raw, v.r, v.psi_infinite
    (0.5, 0.5, 1.0, True)
    """
    series = _as_series(series)
    ys = series.ys
    m_hat = fit_isotonic(series).fitted
    m_0 = fit_constrained(series, t0, theta).fitted
    l_raw = np.sum((ys - m_0) ** 2) - np.sum((ys - m_hat) ** 2)
    t_raw = np.sum((m_hat - m_0) ** 2)
    return _stat_value(l_raw, t_raw)


class ProfileFunction:
    """The statistics as functions of ``theta`` for a fixed series and ``t0``.

    The isotonic fits are computed once at construction; each evaluation is
    O(number of split blocks) per ``theta``.
    """

    def __init__(self, series, t0: float):
        series = _as_series(series)
        self.series = series
        self.t0 = float(t0)
        self.fit = fit_isotonic(series)
        self.split: SplitFit = split_fit(series, t0)
        self.theta_hat = float(evaluate_fit(self.fit, t0))
        s = self.split
        self._a_left = s.left_levels
        self._w_left = s.left_sizes.astype(float)
        self._a_right = s.right_levels
        self._w_right = s.right_sizes.astype(float)
        self._u_left = np.minimum(s.left_levels, self.theta_hat)
        self._u_right = np.maximum(s.right_levels, self.theta_hat)

    @property
    def is_jump_point(self) -> bool:
        """True when the unconstrained fit jumps between observations l and l+1."""
        f = self.fit.fitted
        l = self.split.l
        return bool(f[l] > f[l - 1])

    def components(self, thetas):
        """``(t_raw, excess)`` arrays with ``l_raw = t_raw + excess``."""
        th = np.atleast_1d(np.asarray(thetas, dtype=float))[:, None]
        c_left = np.minimum(self._a_left[None, :], th)
        c_right = np.maximum(self._a_right[None, :], th)
        d_left = self._u_left[None, :] - c_left
        d_right = self._u_right[None, :] - c_right
        t_raw = (d_left ** 2) @ self._w_left + (d_right ** 2) @ self._w_right
        excess = 2.0 * (((c_left - th) * d_left) @ self._w_left
                        + ((c_right - th) * d_right) @ self._w_right)
        return t_raw, excess

    def l_raw(self, thetas):
        t_raw, excess = self.components(thetas)
        return t_raw + excess

    def t_raw(self, thetas):
        return self.components(thetas)[0]

    def psi(self, thetas):
        t_raw, excess = self.components(thetas)
        return ratio_and_psi(t_raw + excess, t_raw, excess)[1]

    def evaluate(self, thetas):
        """``(l_raw, t_raw, r, psi, psi_infinite)`` arrays over ``thetas``."""
        t_raw, excess = self.components(thetas)
        l_raw = t_raw + excess
        r, psi, inf = ratio_and_psi(l_raw, t_raw, excess)
        return l_raw, t_raw, r, psi, inf


def profile_function(series, t0: float) -> ProfileFunction:
    return ProfileFunction(series, t0)


@dataclass(frozen=True)
class StatProfile:
    thetas: np.ndarray
    l_raw: np.ndarray
    t_raw: np.ndarray
    r: np.ndarray
    psi: np.ndarray
    psi_infinite: np.ndarray
    theta_hat: float

    @property
    def values(self) -> list:
        return [StatValue(float(a), float(b), float(c), float(d), bool(e))
                for a, b, c, d, e in zip(self.l_raw, self.t_raw, self.r,
                                         self.psi, self.psi_infinite)]


def profile(series, t0: float, theta_grid) -> StatProfile:
    """Statistics over an increasing grid of hypothesised values."""
    grid = np.asarray(theta_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidInput("theta grid must be a non-empty 1-d sequence")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise InvalidInput("theta grid must be increasing")
    if not np.all(np.isfinite(grid)):
        raise InvalidInput("theta grid must be finite")
    pf = ProfileFunction(series, t0)
    return StatProfile(grid, *pf.evaluate(grid), theta_hat=pf.theta_hat)
