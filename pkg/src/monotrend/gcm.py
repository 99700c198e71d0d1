"""Greatest convex minorants of finite point sequences.

The minorant of the linear interpolant through ``(xs[i], ys[i])`` is built by
a single left-to-right stack pass (lower hull), so every routine here is O(n).
Knots are the input indices where the minorant touches the data; points lying
exactly on a hull edge are kept as knots unless ``keep_collinear=False``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .errors import InvalidInput, OutOfRange

__all__ = [
    "PointSequence",
    "ConvexMinorant",
    "gcm",
    "gcm_restricted",
    "left_slopes",
    "hull_indices",
]


@dataclass(frozen=True)
class PointSequence:
    """Abscissae and ordinates of a finite sequence of points.

    Parameters
    ----------
    xs : array_like
        Strictly increasing abscissae.
    ys : array_like
        Ordinates, same length as ``xs``.
    """

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or ys.ndim != 1:
            raise InvalidInput("xs and ys must be one-dimensional")
        if xs.size == 0:
            raise InvalidInput("point sequence is empty")
        if xs.size != ys.size:
            raise InvalidInput(f"length mismatch: {xs.size} xs vs {ys.size} ys")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidInput("points must be finite")
        if xs.size > 1 and np.any(np.diff(xs) <= 0):
            raise InvalidInput("xs must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self):
        return self.xs.size


@dataclass(frozen=True)
class ConvexMinorant:
    """Greatest convex minorant of a point sequence (or of a slice of one).

    Attributes
    ----------
    xs, ys : ndarray
        The points the minorant was computed from (the restricted slice when
        built by :func:`gcm_restricted`).
    knot_indices : ndarray of int
        Indices into ``xs`` of the hull vertices, increasing, always including
        both endpoints.
    knot_values : ndarray
        ``ys[knot_indices]``.
    """

    xs: np.ndarray
    ys: np.ndarray
    knot_indices: np.ndarray
    knot_values: np.ndarray

    @property
    def knot_xs(self) -> np.ndarray:
        return self.xs[self.knot_indices]

    @property
    def segment_slopes(self) -> np.ndarray:
        """Slopes of the hull edges, non-decreasing, length ``len(knots) - 1``."""
        return chord_slopes(self.xs, self.ys, self.knot_indices)

    @property
    def values(self) -> np.ndarray:
        """Minorant evaluated at every abscissa in ``xs``."""
        return self(self.xs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.xs[0]) or np.any(x > self.xs[-1]):
            raise OutOfRange("evaluation point outside the hull range")
        return np.interp(x, self.knot_xs, self.knot_values)


@njit(cache=True)
def _lower_hull(x, y, lo, hi, keep_collinear):
    stack = np.empty(hi - lo + 1, dtype=np.int64)
    stack[0] = lo
    top = 0
    for i in range(lo + 1, hi + 1):
        xi = x[i]
        yi = y[i]
        while top >= 1:
            a = stack[top - 1]
            b = stack[top]
            # b is dropped when slope(a, b) exceeds slope(b, i)
            lhs = (y[b] - y[a]) * (xi - x[b])
            rhs = (yi - y[b]) * (x[b] - x[a])
            if lhs > rhs or (not keep_collinear and lhs == rhs):
                top -= 1
            else:
                break
        top += 1
        stack[top] = i
    return stack[: top + 1].copy()


def hull_indices(xs, ys, lo=0, hi=None, keep_collinear=True) -> np.ndarray:
    """Indices of the lower-hull vertices of ``(xs, ys)[lo:hi + 1]``.

    Unvalidated fast path for callers that already hold clean float arrays;
    returned indices refer to the full arrays.
    """
    if hi is None:
        hi = len(xs) - 1
    return _lower_hull(xs, ys, int(lo), int(hi), bool(keep_collinear))


def chord_slopes(xs, ys, knots) -> np.ndarray:
    """Slopes of the chords joining consecutive knots."""
    return np.diff(ys[knots]) / np.diff(xs[knots])


def gcm(points: PointSequence, keep_collinear: bool = True) -> ConvexMinorant:
    """Greatest convex minorant of the linear interpolant of ``points``.

    Examples
    --------
    >>> m = gcm(PointSequence([0, 1, 2], [0, 1, 0]))
    >>> m.knot_indices.tolist(), m.values.tolist()
    ([0, 2], [0.0, 0.0, 0.0])
    """
    if not isinstance(points, PointSequence):
        raise InvalidInput("gcm expects a PointSequence")
    knots = hull_indices(points.xs, points.ys, keep_collinear=keep_collinear)
    return ConvexMinorant(points.xs, points.ys, knots, points.ys[knots])


def gcm_restricted(points: PointSequence, lo_index: int, hi_index: int,
                   keep_collinear: bool = True) -> ConvexMinorant:
    """GCM of the sub-sequence ``points[lo_index:hi_index + 1]``.

    The returned minorant lives on the slice; its ``knot_indices`` are
    relative to the slice start.
    """
    n = len(points)
    if not (0 <= lo_index <= hi_index < n):
        raise InvalidInput(
            f"invalid index range [{lo_index}, {hi_index}] for length {n}")
    knots = hull_indices(points.xs, points.ys, lo_index, hi_index,
                         keep_collinear) - lo_index
    xs = points.xs[lo_index:hi_index + 1]
    ys = points.ys[lo_index:hi_index + 1]
    return ConvexMinorant(xs, ys, knots, ys[knots])


def left_slopes(minorant: ConvexMinorant, query_xs) -> np.ndarray:
    """Left derivative of the minorant at each query abscissa.

    At the leftmost abscissa the first edge slope is returned.
    """
    q = np.asarray(query_xs, dtype=float)
    if minorant.knot_indices.size < 2:
        raise InvalidInput("a single-point minorant has no slopes")
    kx = minorant.knot_xs
    if np.any(q < kx[0]) or np.any(q > kx[-1]):
        raise OutOfRange("query outside the hull range")
    seg = np.searchsorted(kx, q, side="left") - 1
    seg = np.clip(seg, 0, kx.size - 2)
    return minorant.segment_slopes[seg]
