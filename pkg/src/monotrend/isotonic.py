"""Isotonic least-squares fits on the uniform design ``t_i = i/n``.

Fits are read off the greatest convex minorant of the cumulative-sum diagram
``(i, Y_1 + ... + Y_i)``: the left slope at abscissa ``i`` is the fitted value
at observation ``i``.  Indexing is 0-based in code; the constraint index ``l``
is the count of observations at or left of ``t0`` (``l = floor(n t0)``), so the
left segment holds indices ``0 .. l-1`` and the right segment ``l .. n-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateConstraint, InvalidInput, OutOfRange
from .gcm import chord_slopes, hull_indices

__all__ = [
    "Series",
    "Block",
    "IsotonicFit",
    "ConstrainedFit",
    "SplitFit",
    "fit_isotonic",
    "fit_constrained",
    "split_fit",
    "constraint_index",
    "evaluate_fit",
]

# guards floor(n * t0) against representation error, e.g. 100 * 0.29
_INDEX_EPS = 1e-9


@dataclass(frozen=True)
class Series:
    """Observations ``y_1, ..., y_n`` on the design ``t_i = i/n``."""

    ys: np.ndarray

    def __post_init__(self):
        ys = np.asarray(self.ys, dtype=float)
        if ys.ndim != 1:
            raise InvalidInput("series must be one-dimensional")
        if ys.size < 2:
            raise InvalidInput("series needs at least two observations")
        if not np.all(np.isfinite(ys)):
            raise InvalidInput("series contains non-finite values")
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.ys.size

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / self.n

    def __len__(self):
        return self.n


def _as_series(series) -> Series:
    return series if isinstance(series, Series) else Series(series)


class Block(NamedTuple):
    start: int
    end: int  # inclusive
    level: float


@dataclass(frozen=True)
class IsotonicFit:
    """Unconstrained isotonic fit.

    ``blocks`` are maximal level sets; ``jump_indices`` are the indices ``i``
    with ``fitted[i] > fitted[i-1]``, i.e. the start of every block but the
    first.
    """

    fitted: np.ndarray
    blocks: tuple

    @property
    def n(self) -> int:
        return self.fitted.size

    @property
    def jump_indices(self) -> np.ndarray:
        return np.array([b.start for b in self.blocks[1:]], dtype=int)

    @property
    def jump_sizes(self) -> np.ndarray:
        levels = np.array([b.level for b in self.blocks])
        return np.diff(levels)


@dataclass(frozen=True)
class ConstrainedFit:
    """Isotonic fit forced through ``theta`` between observations l and l+1.

    ``fitted[l-1] <= theta <= fitted[l]`` in 0-based indexing, which is the
    1-based ordering ``m_l <= theta <= m_{l+1}``.
    """

    fitted: np.ndarray
    theta: float
    l: int
    t0: float

    @property
    def n(self) -> int:
        return self.fitted.size


def _cumsum_diagram(ys):
    cum = np.empty(ys.size + 1)
    cum[0] = 0.0
    np.cumsum(ys, out=cum[1:])
    return np.arange(ys.size + 1, dtype=float), cum


def _levels(xs, cum, lo, hi):
    """Level sets of the isotonic fit of observations ``lo .. hi-1``."""
    knots = hull_indices(xs, cum, lo, hi, keep_collinear=False)
    return knots, chord_slopes(xs, cum, knots)


def _expand(knots, levels):
    return np.repeat(levels, np.diff(knots))


def _blocks(knots, levels, offset=0):
    return tuple(Block(int(a) - offset, int(b) - 1 - offset, float(v))
                 for a, b, v in zip(knots[:-1], knots[1:], levels))


def fit_isotonic(series) -> IsotonicFit:
    """Least-squares projection of the observations onto non-decreasing vectors.

    Examples
    --------
    >>> fit_isotonic([1.0, 0.0]).fitted.tolist()
    [0.5, 0.5]
    """
    series = _as_series(series)
    xs, cum = _cumsum_diagram(series.ys)
    knots, levels = _levels(xs, cum, 0, series.n)
    return IsotonicFit(_expand(knots, levels), _blocks(knots, levels))


def constraint_index(n: int, t0: float) -> int:
    """``l = floor(n t0)``, validated so both sides of the split are non-empty."""
    if not 0.0 < t0 < 1.0:
        raise InvalidInput(f"t0 must lie in (0, 1), got {t0}")
    l = int(math.floor(n * t0 + _INDEX_EPS))
    if l <= 0 or l >= n:
        raise DegenerateConstraint(
            f"constraint at t0={t0} leaves an empty side (l={l}, n={n})")
    return l


@dataclass(frozen=True)
class SplitFit:
    """Isotonic fits computed separately left and right of ``t0``.

    The constrained fit at any ``theta`` is ``min(split, theta)`` on the left
    and ``max(split, theta)`` on the right, so one split serves a whole
    profile in ``theta``.  Both halves come from the same cumulative-sum array
    as the unconstrained fit, so blocks shared with it have identical levels.
    """

    l: int
    t0: float
    left_levels: np.ndarray
    left_sizes: np.ndarray
    right_levels: np.ndarray
    right_sizes: np.ndarray

    @property
    def fitted(self) -> np.ndarray:
        return np.concatenate([np.repeat(self.left_levels, self.left_sizes),
                               np.repeat(self.right_levels, self.right_sizes)])

    def constrained(self, theta: float) -> ConstrainedFit:
        left = np.minimum(np.repeat(self.left_levels, self.left_sizes), theta)
        right = np.maximum(np.repeat(self.right_levels, self.right_sizes), theta)
        return ConstrainedFit(np.concatenate([left, right]), float(theta),
                              self.l, self.t0)


def split_fit(series, t0: float) -> SplitFit:
    series = _as_series(series)
    l = constraint_index(series.n, t0)
    xs, cum = _cumsum_diagram(series.ys)
    lk, lv = _levels(xs, cum, 0, l)
    rk, rv = _levels(xs, cum, l, series.n)
    return SplitFit(l, float(t0), lv, np.diff(lk), rv, np.diff(rk))


def fit_constrained(series, t0: float, theta: float) -> ConstrainedFit:
    """Minimizer of the residual sum of squares subject to
    ``m_1 <= ... <= m_l <= theta <= m_{l+1} <= ... <= m_n``.

    Raises
    ------
    InvalidInput
        If ``t0`` is outside (0, 1).
    DegenerateConstraint
        If ``floor(n t0)`` is 0 or n.
    """
    if not np.isfinite(theta):
        raise InvalidInput("theta must be finite")
    return split_fit(series, t0).constrained(theta)


def evaluate_fit(fit, t):
    """Left-continuous step extension: ``fitted[i]`` on ``((i)/n, (i+1)/n]``."""
    fitted = fit.fitted
    n = fitted.size
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0) or np.any(t_arr > 1.0):
        raise OutOfRange("t must lie in (0, 1]")
    idx = np.ceil(n * t_arr - _INDEX_EPS).astype(int) - 1
    idx = np.clip(idx, 0, n - 1)
    out = fitted[idx]
    return float(out) if np.ndim(out) == 0 else out
