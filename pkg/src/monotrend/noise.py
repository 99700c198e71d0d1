"""Stationary Gaussian error processes.

Four models are supported: white noise, causal invertible ARMA, fractional
Gaussian noise, and FARIMA(p, d, q).  Every sample is rescaled so that its
theoretical marginal variance equals ``marginal_var``.

ARMA coefficients follow the sign convention
``y_t = ar[0] y_{t-1} + ... + e_t + ma[0] e_{t-1} + ...``.
"""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy import signal
from scipy.special import gammaln

from ._jit import njit
from ._random import stream
from .errors import InvalidInput, NumericalFailure

__all__ = [
    "NoiseKind",
    "DependenceSpec",
    "NoiseSample",
    "fgn_autocov",
    "farima_autocorr",
    "farima_variance",
    "arma_psi_weights",
    "generate",
    "sample",
    "burn_in",
]


class NoiseKind(str, enum.Enum):
    IID = "IID"
    ARMA = "ARMA"
    FGN = "FGN"
    FARIMA = "FARIMA"


def _roots_outside_unit_circle(poly_coeffs) -> bool:
    # poly_coeffs in increasing powers of z, constant term first
    c = np.trim_zeros(np.asarray(poly_coeffs, dtype=float), "b")
    if c.size <= 1:
        return True
    roots = np.roots(c[::-1])
    return bool(np.all(np.abs(roots) > 1.0 + 1e-10))


@dataclass(frozen=True)
class DependenceSpec:
    """Descriptor of an error model.

    Parameters
    ----------
    kind : NoiseKind or str
        ``IID``, ``ARMA``, ``FGN`` or ``FARIMA``.
    ar, ma : sequence of float
        ARMA coefficients (used by ``ARMA`` and ``FARIMA``).
    hurst : float, optional
        Hurst index in [0.5, 1) for ``FGN``.
    frac_d : float, optional
        Fractional integration order in (0, 0.5) for ``FARIMA``.
    marginal_var : float
        Target marginal variance.
    """

    kind: NoiseKind
    ar: tuple = field(default_factory=tuple)
    ma: tuple = field(default_factory=tuple)
    hurst: float | None = None
    frac_d: float | None = None
    marginal_var: float = 1.0

    def __post_init__(self):
        try:
            kind = NoiseKind(self.kind)
        except ValueError:
            raise InvalidInput(f"unknown noise kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "ar", tuple(float(a) for a in self.ar))
        object.__setattr__(self, "ma", tuple(float(b) for b in self.ma))
        if not (np.isfinite(self.marginal_var) and self.marginal_var > 0):
            raise InvalidInput("marginal_var must be positive")
        object.__setattr__(self, "marginal_var", float(self.marginal_var))
        if kind is NoiseKind.FGN:
            if self.hurst is None or not 0.5 <= self.hurst < 1.0:
                raise InvalidInput(f"FGN needs 0.5 <= hurst < 1, got {self.hurst}")
            object.__setattr__(self, "hurst", float(self.hurst))
        if kind is NoiseKind.FARIMA:
            if self.frac_d is None or not 0.0 < self.frac_d < 0.5:
                raise InvalidInput(f"FARIMA needs 0 < frac_d < 0.5, got {self.frac_d}")
            object.__setattr__(self, "frac_d", float(self.frac_d))
        if kind in (NoiseKind.IID, NoiseKind.FGN) and (self.ar or self.ma):
            raise InvalidInput(f"{kind.value} takes no ARMA coefficients")
        if not _roots_outside_unit_circle((1.0,) + tuple(-a for a in self.ar)):
            raise InvalidInput(f"AR coefficients {self.ar} are not causal")
        if not _roots_outside_unit_circle((1.0,) + self.ma):
            raise InvalidInput(f"MA coefficients {self.ma} are not invertible")

    @property
    def hurst_index(self) -> float:
        """Hurst index of the model (0.5 for short-range models)."""
        if self.kind is NoiseKind.FGN:
            return self.hurst
        if self.kind is NoiseKind.FARIMA:
            return self.frac_d + 0.5
        return 0.5

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "ar": list(self.ar),
            "ma": list(self.ma),
            "hurst": self.hurst,
            "frac_d": self.frac_d,
            "marginal_var": self.marginal_var,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DependenceSpec":
        unknown = set(d) - {"kind", "ar", "ma", "hurst", "frac_d", "marginal_var"}
        if unknown:
            raise InvalidInput(f"unknown DependenceSpec fields: {sorted(unknown)}")
        if "kind" not in d:
            raise InvalidInput("DependenceSpec needs a 'kind'")
        return cls(kind=d["kind"], ar=tuple(d.get("ar") or ()),
                   ma=tuple(d.get("ma") or ()), hurst=d.get("hurst"),
                   frac_d=d.get("frac_d"),
                   marginal_var=d.get("marginal_var", 1.0))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DependenceSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"invalid DependenceSpec JSON: {exc}") from None
        if not isinstance(d, dict):
            raise InvalidInput("DependenceSpec JSON must be an object")
        return cls.from_dict(d)


@dataclass(frozen=True)
class NoiseSample:
    values: np.ndarray
    spec: DependenceSpec
    seed: int | None

    def __len__(self):
        return self.values.size


def fgn_autocov(k, hurst: float, marginal_var: float = 1.0):
    """Autocovariance of fractional Gaussian noise at lag ``k``.

    ``gamma(k) = (s2/2) (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})``.

    Examples
    --------
    >>> round(fgn_autocov(1, 0.8), 4)
    0.5157
    """
    if not 0.5 <= hurst < 1.0:
        raise InvalidInput(f"hurst must lie in [0.5, 1), got {hurst}")
    k = np.abs(np.asarray(k, dtype=float))
    h2 = 2.0 * hurst
    g = 0.5 * marginal_var * (np.abs(k + 1) ** h2 - 2 * k ** h2 + np.abs(k - 1) ** h2)
    return float(g) if g.ndim == 0 else g


def farima_autocorr(d: float, nlags: int) -> np.ndarray:
    """Autocorrelations ``rho(0..nlags-1)`` of FARIMA(0, d, 0)."""
    k = np.arange(1, nlags)
    rho = np.empty(nlags)
    rho[0] = 1.0
    rho[1:] = np.cumprod((k - 1 + d) / (k - d))
    return rho


def farima_variance(d: float, innovation_var: float = 1.0) -> float:
    """``gamma(0) = s2 Gamma(1 - 2d) / Gamma(1 - d)^2``."""
    return innovation_var * math.exp(gammaln(1 - 2 * d) - 2 * gammaln(1 - d))


def burn_in(spec: DependenceSpec) -> int:
    return 10 * (len(spec.ar) + len(spec.ma)) + 100


def arma_psi_weights(ar, ma, tol: float = 1e-17, max_len: int = 1 << 20) -> np.ndarray:
    """Causal MA(infinity) weights, truncated once the squared tail is below ``tol``."""
    b = np.r_[1.0, np.asarray(ma, dtype=float)]
    a = np.r_[1.0, -np.asarray(ar, dtype=float)]
    length = 256
    while True:
        impulse = np.zeros(length)
        impulse[0] = 1.0
        psi = signal.lfilter(b, a, impulse)
        tail = np.sum(psi[length // 2:] ** 2)
        if tail <= tol * np.sum(psi ** 2) or length >= max_len:
            return psi
        length *= 2


@functools.lru_cache(maxsize=32)
def _fgn_embedding(n: int, hurst: float) -> np.ndarray:
    gam = fgn_autocov(np.arange(n), hurst)
    row = np.concatenate([gam, gam[-2:0:-1]])
    lam = sfft.fft(row).real
    m = row.size
    if lam.min() < -1e-9 * lam.max():
        raise NumericalFailure(
            f"circulant embedding has a negative eigenvalue for H={hurst}, n={n}")
    root = np.sqrt(np.clip(lam, 0.0, None) / m)
    root.setflags(write=False)
    return root


def _fgn_unit(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    if n == 1 or hurst == 0.5:
        return rng.standard_normal(n)
    root = _fgn_embedding(n, hurst)
    m = root.size
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    w = sfft.fft(root * z)
    return w.real[:n].copy()


@njit(cache=True)
def _durbin_levinson_farima(d, z):
    # exact FARIMA(0, d, 0) with unit marginal variance; phi_kk = d / (k - d)
    n = z.size
    x = np.empty(n)
    phi = np.zeros(n)
    prev = np.zeros(n)
    v = 1.0
    x[0] = z[0]
    for t in range(1, n):
        pkk = d / (t - d)
        for j in range(1, t):
            phi[j] = prev[j] - pkk * prev[t - j]
        phi[t] = pkk
        v *= 1.0 - pkk * pkk
        mean = 0.0
        for j in range(1, t + 1):
            mean += phi[j] * x[t - j]
        x[t] = mean + math.sqrt(v) * z[t]
        for j in range(1, t + 1):
            prev[j] = phi[j]
    return x


def _arma_unit_variance(spec: DependenceSpec, core_acf=None) -> float:
    psi = arma_psi_weights(spec.ar, spec.ma)
    if core_acf is None:
        return float(np.sum(psi ** 2))
    # Var(sum psi_i x_{t-i}) = sum_k rho(|k|) sum_i psi_i psi_{i+k}
    r = signal.correlate(psi, psi, mode="full", method="fft")[psi.size - 1:]
    rho = core_acf(psi.size)
    return float(rho[0] * r[0] + 2.0 * np.dot(rho[1:], r[1:]))


def sample(spec: DependenceSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` values of the error process from ``rng``."""
    n = int(n)
    if n < 1:
        raise InvalidInput("n must be at least 1")
    s2 = spec.marginal_var
    kind = spec.kind
    if kind is NoiseKind.IID:
        return math.sqrt(s2) * rng.standard_normal(n)
    if kind is NoiseKind.FGN:
        return math.sqrt(s2) * _fgn_unit(n, spec.hurst, rng)
    b = np.r_[1.0, spec.ma]
    a = np.r_[1.0, -np.asarray(spec.ar)]
    burn = burn_in(spec)
    if kind is NoiseKind.ARMA:
        e = rng.standard_normal(n + burn)
        y = signal.lfilter(b, a, e)[burn:]
        return y * math.sqrt(s2 / _arma_unit_variance(spec))
    d = spec.frac_d
    core = _durbin_levinson_farima(d, rng.standard_normal(n + burn))
    if not (spec.ar or spec.ma):
        return math.sqrt(s2) * core[burn:]
    y = signal.lfilter(b, a, core)[burn:]
    var = _arma_unit_variance(spec, lambda m: farima_autocorr(d, m))
    return y * math.sqrt(s2 / var)


def generate(spec: DependenceSpec, n: int, seed: int) -> NoiseSample:
    """Reproducible error sample: identical ``(spec, n, seed)`` give identical values.

    Examples
    --------
    >>> s = generate(DependenceSpec("FGN", hurst=0.8), 4, seed=1)
    >>> bool(np.array_equal(s.values, generate(s.spec, 4, seed=1).values))
    True
    """
    if not isinstance(spec, DependenceSpec):
        raise InvalidInput("spec must be a DependenceSpec")
    values = sample(spec, n, stream(seed))
    return NoiseSample(values, spec, int(seed))
