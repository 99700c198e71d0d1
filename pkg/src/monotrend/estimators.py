"""Nuisance-parameter estimators.

* :func:`estimate_tau2`: long-run variance from residuals with a Bartlett
  window of width ``sqrt(n)``.
* :func:`estimate_hurst`: wavelet log-scale regression (Abry-Veitch type).
* :func:`estimate_sigma2`: marginal variance of the observations.
* :func:`estimate_derivative`: kernel-smoothed increments of the isotonic fit,
  with bandwidths from :func:`cv_bandwidth` or :func:`oversmooth_bandwidth`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import pywt
from scipy.special import digamma
from scipy.stats import norm

from ._random import stream
from .errors import InvalidInput
from .isotonic import IsotonicFit, _as_series, fit_isotonic

__all__ = [
    "Tau2Estimate",
    "HurstEstimate",
    "DerivativeEstimate",
    "ApproximationWarning",
    "estimate_tau2",
    "isotonic_residuals",
    "estimate_hurst",
    "wavelet_details",
    "estimate_sigma2",
    "estimate_derivative",
    "cv_bandwidth",
    "cv_curve",
    "default_bandwidth_grid",
    "oversmooth_bandwidth",
]


class ApproximationWarning(UserWarning):
    """An estimate is used outside the setting it is exact for."""


# ---------------------------------------------------------------- tau^2

@dataclass(frozen=True)
class Tau2Estimate:
    value: float
    max_lag: int
    acvf: np.ndarray
    clamped: bool = False


def estimate_tau2(residuals) -> Tau2Estimate:
    """Long-run variance ``g(0) + 2 sum_{k <= sqrt(n)} (1 - k/sqrt(n)) g(k)``.

    The autocovariances ``g(k) = n^{-1} sum e_i e_{i+k}`` are uncentred.  A
    negative result is replaced by ``g(0)`` and flagged.

    Examples
    --------
    >>> estimate_tau2([1, -1, 1, -1]).value
    0.25
    """
    e = np.asarray(residuals, dtype=float)
    if e.ndim != 1 or e.size < 4:
        raise InvalidInput("estimate_tau2 needs at least 4 residuals")
    if not np.all(np.isfinite(e)):
        raise InvalidInput("residuals must be finite")
    n = e.size
    root = math.sqrt(n)
    max_lag = int(math.isqrt(n))
    acvf = np.array([np.dot(e[: n - k], e[k:]) / n for k in range(max_lag + 1)])
    k = np.arange(1, max_lag + 1)
    value = acvf[0] + 2.0 * np.sum((1.0 - k / root) * acvf[1:])
    clamped = bool(value < 0)
    if clamped:
        value = acvf[0]
    return Tau2Estimate(float(value), max_lag, acvf, clamped)


def isotonic_residuals(series, fit: IsotonicFit | None = None) -> np.ndarray:
    """``Y_i - m_hat(t_i)``."""
    series = _as_series(series)
    if fit is None:
        fit = fit_isotonic(series)
    return series.ys - fit.fitted


# ---------------------------------------------------------------- Hurst

@dataclass(frozen=True)
class HurstEstimate:
    """Result of the wavelet regression.

    ``octaves``, ``log2_variances`` and ``weights`` are the regression inputs,
    so the fit can be recomputed independently.
    """

    value: float
    scales_used: tuple
    regression_slope: float
    octaves: np.ndarray
    log2_variances: np.ndarray
    weights: np.ndarray
    clipped: bool = False


def wavelet_details(x, vanishing_moments: int = 4, levels: int | None = None):
    """Detail coefficients of a boundary-free Daubechies pyramid.

    Each level convolves the current approximation with the decomposition
    filters in ``valid`` mode and keeps every second output, so no value
    depends on an extension of the data.  Polynomials of degree below
    ``vanishing_moments`` give zero details at every level.

    Returns a list whose entry ``j - 1`` holds the octave ``j`` details.
    """
    w = pywt.Wavelet(f"db{int(vanishing_moments)}")
    lo = np.asarray(w.dec_lo)
    hi = np.asarray(w.dec_hi)
    a = np.asarray(x, dtype=float)
    out = []
    while a.size >= hi.size and (levels is None or len(out) < levels):
        out.append(np.convolve(a, hi, mode="valid")[::2])
        a = np.convolve(a, lo, mode="valid")[::2]
    return out


def _log2_chi2_bias(n_j):
    # E log2(chi2_n / n) for n = n_j
    return digamma(n_j / 2.0) / math.log(2.0) - np.log2(n_j / 2.0)


def estimate_hurst(x, vanishing_moments: int = 4, octaves: tuple | None = None,
                   bias_correct: bool = True) -> HurstEstimate:
    """Hurst index from the scaling of wavelet detail variances.

    Parameters
    ----------
    x : array_like
        Observations; polynomial trends of degree below
        ``vanishing_moments`` do not affect the estimate.
    vanishing_moments : int
        Number of vanishing moments of the Daubechies wavelet (>= 2).
    octaves : (int, int), optional
        Inclusive octave range, default ``(3, floor(log2 n) - 4)``.
    bias_correct : bool
        Subtract ``E log2(chi2_{n_j}/n_j)`` from each log-variance.

    Notes
    -----
    The weighted least-squares slope of ``log2 mean(d_j^2)`` on ``j`` (weights
    ``n_j``) estimates ``2H - 1``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise InvalidInput("x must be a finite 1-d sequence")
    if int(vanishing_moments) < 2:
        raise InvalidInput("vanishing_moments must be at least 2")
    n = x.size
    if n < 64:
        raise InvalidInput(f"estimate_hurst needs at least 64 values, got {n}")
    if octaves is None:
        octaves = (3, int(math.floor(math.log2(n))) - 4)
    j1, j2 = int(octaves[0]), int(octaves[1])
    if j1 < 1 or j2 <= j1:
        raise InvalidInput(f"invalid octave range {octaves}")
    details = wavelet_details(x, vanishing_moments, levels=j2)
    if len(details) < j2 or details[j2 - 1].size < 2:
        raise InvalidInput(f"series of length {n} too short for octaves {octaves}")
    js = np.arange(j1, j2 + 1)
    n_j = np.array([details[j - 1].size for j in js], dtype=float)
    mu = np.array([np.mean(details[j - 1] ** 2) for j in js])
    if np.any(mu <= 0):
        raise InvalidInput("zero wavelet energy at some octave (constant input?)")
    y = np.log2(mu)
    if bias_correct:
        y = y - _log2_chi2_bias(n_j)
    slope = _wls_slope(js.astype(float), y, n_j)
    h = 0.5 * (slope + 1.0)
    clipped = not 0.0 < h < 1.0
    if clipped:
        h = float(np.clip(h, 1e-6, 1 - 1e-6))
    return HurstEstimate(float(h), (j1, j2), float(slope), js, y, n_j, clipped)


def _wls_slope(x, y, w) -> float:
    xm = np.sum(w * x) / np.sum(w)
    ym = np.sum(w * y) / np.sum(w)
    return float(np.sum(w * (x - xm) * (y - ym)) / np.sum(w * (x - xm) ** 2))


# ---------------------------------------------------------------- sigma^2

def estimate_sigma2(series, spec_kind=None) -> float:
    """Empirical variance of the observations with divisor ``n - 1``.

    Exact in intent for FGN errors; for FARIMA errors it stands in for a
    likelihood-based estimate and an :class:`ApproximationWarning` is issued.

    Examples
    --------
    >>> estimate_sigma2([0.0, 1.0])
    0.5
    """
    ys = np.asarray(getattr(series, "ys", series), dtype=float)
    if ys.ndim != 1 or ys.size < 2:
        raise InvalidInput("estimate_sigma2 needs at least 2 values")
    kind = getattr(spec_kind, "value", spec_kind)
    if kind == "FARIMA":
        warnings.warn("empirical variance used in place of a FARIMA likelihood "
                      "estimate", ApproximationWarning, stacklevel=2)
    return float(np.var(ys, ddof=1))


# ---------------------------------------------------------------- m'(t0)

@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    bandwidth: float
    method: str
    degenerate: bool = False


def _jumps(fit: IsotonicFit):
    """Jump locations ``i/n`` and sizes of the left-continuous step fit."""
    idx = fit.jump_indices
    return idx / fit.n, fit.jump_sizes


def estimate_derivative(fit: IsotonicFit, t0: float, bandwidth: float,
                        method: str = "FIXED") -> DerivativeEstimate:
    """``(1/h) sum_j D_j K((t0 - s_j) / h)`` over the jumps of the fit.

    ``K`` is the standard Gaussian density.  ``method`` only labels how the
    bandwidth was chosen (``CV``, ``OVERSMOOTH`` or ``FIXED``).
    """
    if not 0.0 < t0 < 1.0:
        raise InvalidInput(f"t0 must lie in (0, 1), got {t0}")
    if not bandwidth > 0:
        raise InvalidInput("bandwidth must be positive")
    s, d = _jumps(fit)
    if s.size == 0:
        return DerivativeEstimate(0.0, float(bandwidth), method, True)
    value = float(np.sum(d * norm.pdf((t0 - s) / bandwidth)) / bandwidth)
    return DerivativeEstimate(value, float(bandwidth), method, False)


def oversmooth_bandwidth(n: int) -> float:
    """``n^{-1/7}``.

    Examples
    --------
    >>> oversmooth_bandwidth(128)
    0.5
    """
    if n < 2:
        raise InvalidInput("oversmooth_bandwidth needs n >= 2")
    return float(n ** (-1.0 / 7.0))


def default_bandwidth_grid(n: int, size: int = 10) -> np.ndarray:
    """Geometric grid on ``[n^{-1/3}, n^{-1/10}]``."""
    return np.geomspace(n ** (-1.0 / 3.0), n ** (-0.1), size)


def _smoothed_fit(t_sub, y_sub, h):
    """Integrated kernel derivative of the isotonic fit of one subset.

    Returns a callable ``t -> C + sum_j D_j Phi((t - s_j) / h)``; the jump
    locations ``s_j`` are the design points after which the fit steps up, and
    ``C`` is the least-squares level on the subset itself.
    """
    fitted = fit_isotonic(y_sub).fitted
    steps = np.flatnonzero(np.diff(fitted) > 0)
    s = t_sub[steps]
    d = np.diff(fitted)[steps]

    def shape(t):
        t = np.asarray(t, dtype=float)
        if s.size == 0:
            return np.zeros_like(t)
        return norm.cdf((t[:, None] - s[None, :]) / h) @ d

    c = float(np.mean(y_sub - shape(t_sub)))
    return lambda t: c + shape(t)


def _split(n, rng, attempts=10):
    for _ in range(attempts):
        mask = rng.random(n) < 0.5
        if 2 <= mask.sum() <= n - 2:
            return mask
    raise InvalidInput(f"could not split {n} points into two halves of size >= 2")


def cv_curve(series, candidate_hs, seed: int = 0):
    """Cross-validation criterion at each candidate bandwidth.

    Indices are split by independent fair coin flips; each half's smoothed
    fit predicts the other half.
    """
    series = _as_series(series)
    hs = np.asarray(candidate_hs, dtype=float)
    if hs.ndim != 1 or hs.size == 0 or np.any(hs <= 0):
        raise InvalidInput("candidate bandwidths must be positive")
    t = series.t
    y = series.ys
    mask = _split(series.n, stream(seed))
    t1, y1, t2, y2 = t[mask], y[mask], t[~mask], y[~mask]
    cv = np.empty(hs.size)
    for i, h in enumerate(hs):
        f1 = _smoothed_fit(t1, y1, h)
        f2 = _smoothed_fit(t2, y2, h)
        cv[i] = np.sum((y1 - f2(t1)) ** 2) + np.sum((y2 - f1(t2)) ** 2)
    return cv


def cv_bandwidth(series, t0: float | None = None, candidate_hs=None,
                 seed: int = 0) -> float:
    """Bandwidth minimising the split-sample criterion; ties go to the smaller h.

    ``t0`` is accepted for interface symmetry; the criterion is global.
    """
    series = _as_series(series)
    if candidate_hs is None:
        candidate_hs = default_bandwidth_grid(series.n)
    hs = np.asarray(candidate_hs, dtype=float)
    if hs.size == 1:
        return float(hs[0])
    cv = cv_curve(series, hs, seed)
    best = np.flatnonzero(cv == cv.min())
    return float(hs[best].min())
