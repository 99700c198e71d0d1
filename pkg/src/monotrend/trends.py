"""Monotone trend functions used by the simulation designs."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput

__all__ = ["TRENDS", "m1", "m2", "logistic", "square", "get_trend"]


def m1(t):
    """``e^t``."""
    return np.exp(np.asarray(t, dtype=float))


def m2(t):
    """Piecewise trend with a steep quadratic piece on ``(1/4, 1/4 + 1/200]``.

    Implemented exactly as printed, including the jump at ``1/4 + 1/200``.

    Examples
    --------
    >>> [round(float(v), 12) for v in m2([0.25, 0.255])]
    [0.25, 0.75]
    """
    t = np.asarray(t, dtype=float)
    knot = 0.25 + 1.0 / 200.0
    return np.where(t <= 0.25, t,
                    np.where(t <= knot, 0.25 + 20000.0 * (t - 0.25) ** 2, t + 0.75))


def logistic(t):
    """``1 / (1 + exp(-20 (t - 1/2)))``."""
    t = np.asarray(t, dtype=float)
    return 1.0 / (1.0 + np.exp(-20.0 * (t - 0.5)))


def square(t):
    """``t^2``."""
    return np.asarray(t, dtype=float) ** 2


TRENDS = {"m1": m1, "exp": m1, "m2": m2, "logistic": logistic, "square": square}


def get_trend(name: str):
    try:
        return TRENDS[name]
    except KeyError:
        raise InvalidInput(f"unknown trend {name!r}; choose from {sorted(TRENDS)}") from None
