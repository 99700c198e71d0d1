"""Monte Carlo limit distributions of the L, T and Psi statistics.

Two simulation routes are provided:

* :func:`simulate_m1` computes the finite-sample statistics for the model
  ``y_i = i/n + eps_i`` at ``t0 = theta = 1/2`` and rescales them.
* :func:`simulate_m2` discretises the limit process ``W(z) + z^2`` on
  ``[-c, c]`` and evaluates the slope functionals directly.

Quantile tables carry a provenance tag and are looked up by statistic,
Hurst index (0.5 denotes short-range dependence) and probability.
"""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ._random import stream
from .errors import InvalidInput, OutOfRange, Unsupported
from .noise import DependenceSpec, sample
from .stats import ProfileFunction, ratio_and_psi

__all__ = [
    "Statistic",
    "Provenance",
    "HurstMode",
    "QuantileRow",
    "QuantileTable",
    "TableSet",
    "LimitSample",
    "QuantileLookup",
    "DEFAULT_PROBS",
    "SRD",
    "simulate_m1",
    "simulate_m2",
    "empirical_quantile",
    "quantile_se",
    "lookup",
    "resolve",
    "load_default_tables",
    "table_dir",
]

#: Hurst key used for short-range dependence.
SRD = 0.5
DEFAULT_PROBS = tuple(round(0.10 + 0.05 * i, 2) for i in range(18))
TABLE_DIR_ENV = "MONOTREND_TABLE_DIR"


class Statistic(str, enum.Enum):
    L = "L"
    T = "T"
    PSI = "PSI"


class Provenance(str, enum.Enum):
    EMBEDDED_PAPER = "EMBEDDED_PAPER"
    SIMULATED_M1 = "SIMULATED_M1"
    SIMULATED_M2 = "SIMULATED_M2"


class HurstMode(str, enum.Enum):
    EXACT_H = "EXACT_H"
    NEAREST_H = "NEAREST_H"
    CONSERVATIVE = "CONSERVATIVE"


CONSERVATIVE_H = 0.95
CONSERVATIVE_PROBS = (0.90, 0.95)


# ---------------------------------------------------------------- tables

def _enc(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _dec(x):
    if x is None:
        return None
    if isinstance(x, str):
        if x in ("inf", "-inf"):
            return float(x)
        raise InvalidInput(f"unexpected string {x!r} in table")
    return float(x)


@dataclass(frozen=True)
class QuantileRow:
    p: float
    q: float
    se: float | None = None


@dataclass(frozen=True)
class QuantileTable:
    """Quantiles of one statistic, keyed by Hurst index.

    ``entries`` maps a Hurst index to a tuple of :class:`QuantileRow` with
    strictly increasing ``p`` and non-decreasing ``q``.
    """

    statistic: Statistic
    entries: dict
    provenance: Provenance
    sim_params: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "statistic", Statistic(self.statistic))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        clean = {}
        for h in sorted(self.entries):
            rows = tuple(r if isinstance(r, QuantileRow) else QuantileRow(*r)
                         for r in self.entries[h])
            ps = np.array([r.p for r in rows])
            qs = np.array([r.q for r in rows])
            if ps.size == 0:
                raise InvalidInput(f"empty entry for H={h}")
            if np.any((ps <= 0) | (ps >= 1)) or np.any(np.diff(ps) <= 0):
                raise InvalidInput(f"probabilities for H={h} must increase within (0, 1)")
            if np.any(qs[1:] < qs[:-1]):
                raise InvalidInput(f"quantiles for H={h} are not monotone")
            clean[float(h)] = rows
        object.__setattr__(self, "entries", clean)

    @property
    def hursts(self) -> tuple:
        return tuple(self.entries)

    def rows(self, hurst: float) -> tuple:
        return self.entries[float(hurst)]

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic.value,
            "provenance": self.provenance.value,
            "sim_params": self.sim_params,
            "entries": [
                {"hurst": h,
                 "rows": [{"p": r.p, "q": _enc(r.q), "se": _enc(r.se)} for r in rows]}
                for h, rows in self.entries.items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "QuantileTable":
        try:
            entries = {
                float(e["hurst"]): tuple(
                    QuantileRow(float(r["p"]), _dec(r["q"]), _dec(r.get("se")))
                    for r in e["rows"])
                for e in d["entries"]
            }
            return cls(d["statistic"], entries, d["provenance"], d.get("sim_params"))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed quantile table: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "QuantileTable":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"invalid table JSON: {exc}") from None

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "QuantileTable":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class QuantileLookup:
    value: float
    statistic: Statistic
    hurst: float
    p: float
    provenance: Provenance
    source: str = ""

    def to_dict(self) -> dict:
        return {"value": _enc(self.value), "statistic": self.statistic.value,
                "hurst": self.hurst, "p": self.p,
                "provenance": self.provenance.value, "source": self.source}


@dataclass(frozen=True)
class TableSet:
    """Ordered collection of tables; earlier tables take precedence."""

    tables: tuple
    names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(self.tables))
        names = tuple(self.names) or tuple(f"table{i}" for i in range(len(self.tables)))
        object.__setattr__(self, "names", names)

    def __iter__(self):
        return iter(zip(self.names, self.tables))

    def for_statistic(self, statistic):
        statistic = Statistic(statistic)
        return [(n, t) for n, t in self if t.statistic is statistic]


def _interp_rows(rows, p):
    """Quantile at ``p`` from rows, linear in ``p`` between bracketing rows."""
    ps = np.array([r.p for r in rows])
    i = int(np.searchsorted(ps, p))
    if i < ps.size and math.isclose(ps[i], p, rel_tol=0, abs_tol=1e-12):
        return rows[i].q
    if i == 0 or i == ps.size:
        return None
    lo, hi = rows[i - 1], rows[i]
    if math.isinf(hi.q) or math.isinf(lo.q):
        return hi.q if not math.isinf(lo.q) or lo.q > 0 else lo.q
    w = (p - lo.p) / (hi.p - lo.p)
    return float(lo.q + w * (hi.q - lo.q))


def _pick_hurst(available, hurst, mode):
    if mode is HurstMode.EXACT_H:
        for h in available:
            if math.isclose(h, hurst, abs_tol=1e-9):
                return h
        return None
    if mode is HurstMode.NEAREST_H:
        # ties go to the larger index, whose quantiles are the bigger ones
        return min(available, key=lambda h: (abs(h - hurst), -h)) if available else None
    for h in available:
        if math.isclose(h, CONSERVATIVE_H, abs_tol=1e-9):
            return h
    return None


def resolve(tables, statistic, hurst: float, p: float,
            mode=HurstMode.EXACT_H) -> QuantileLookup:
    """Look up a quantile and report which table supplied it.

    Parameters
    ----------
    tables : QuantileTable or TableSet
    statistic : Statistic or str
    hurst : float
        0.5 for short-range dependence.
    p : float
        Probability, present in a table or bracketed by two of its rows.
    mode : HurstMode
        ``EXACT_H`` needs the exact key, ``NEAREST_H`` snaps to the closest
        key, ``CONSERVATIVE`` uses the H = 0.95 column for p = 0.90 or 0.95.

    Examples
    --------
    >>> tabs = load_default_tables()
    >>> resolve(tabs, "PSI", 0.7, 0.90, "CONSERVATIVE").value
    27.05
    """
    statistic = Statistic(statistic)
    mode = HurstMode(mode)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidInput(f"p must lie in (0, 1), got {p}")
    if mode is HurstMode.CONSERVATIVE and not any(
            math.isclose(p, c, abs_tol=1e-9) for c in CONSERVATIVE_PROBS):
        raise Unsupported(
            f"the conservative rule covers p in {CONSERVATIVE_PROBS} only, got {p}")
    if isinstance(tables, QuantileTable):
        tables = TableSet((tables,), ("table",))
    candidates = tables.for_statistic(statistic)
    if not candidates:
        raise OutOfRange(f"no table for statistic {statistic.value}")
    for name, table in candidates:
        h = _pick_hurst(table.hursts, float(hurst), mode)
        if h is None:
            continue
        q = _interp_rows(table.rows(h), p)
        if q is not None:
            return QuantileLookup(float(q), statistic, h, p, table.provenance, name)
    raise OutOfRange(
        f"no {statistic.value} quantile for H={hurst}, p={p} ({mode.value})")


def lookup(tables, statistic, hurst: float, p: float, mode=HurstMode.EXACT_H) -> float:
    """Quantile value; see :func:`resolve`."""
    return resolve(tables, statistic, hurst, p, mode).value


def table_dir() -> Path:
    env = os.environ.get(TABLE_DIR_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("monotrend") / "data"))


_PROVENANCE_ORDER = {Provenance.EMBEDDED_PAPER: 0, Provenance.SIMULATED_M1: 1,
                     Provenance.SIMULATED_M2: 2}


def load_default_tables(directory=None) -> TableSet:
    """All ``*.json`` tables in the table directory.

    Published tables come first, then simulated ones; ties are broken by file
    name.  ``MONOTREND_TABLE_DIR`` overrides the packaged directory.
    """
    d = Path(directory) if directory is not None else table_dir()
    if not d.is_dir():
        raise InvalidInput(f"table directory {d} does not exist")
    loaded = [(p.stem, QuantileTable.load(p)) for p in sorted(d.glob("*.json"))]
    loaded.sort(key=lambda nt: (_PROVENANCE_ORDER[nt[1].provenance], nt[0]))
    return TableSet(tuple(t for _, t in loaded), tuple(n for n, _ in loaded))


# ---------------------------------------------------------------- quantiles

def _order_index(m: int, p: float) -> int:
    # left-continuous inverse: smallest x with F_M(x) >= p
    return min(max(int(math.ceil(m * p - 1e-9)) - 1, 0), m - 1)


def empirical_quantile(values, p: float) -> float:
    """``F_M^{-1}(p)`` for the empirical distribution; handles infinite values.

    Examples
    --------
    >>> empirical_quantile([3.0, 1.0, 2.0, float("inf")], 0.5)
    2.0
    """
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise InvalidInput("empty sample")
    return float(x[_order_index(x.size, p)])


def quantile_se(values, p: float) -> float:
    """Asymptotic standard error ``sqrt(p (1 - p) / M) / f(q_p)``.

    The density is a finite difference over ``ceil(sqrt(M))`` order
    statistics either side of the quantile.  An empty or unbounded window
    yields ``inf``.
    """
    if not 0.0 < p < 1.0:
        raise InvalidInput(f"p must lie in (0, 1), got {p}")
    x = np.sort(np.asarray(values, dtype=float))
    m = x.size
    if m < 2:
        return math.inf
    k = _order_index(m, p)
    w = int(math.ceil(math.sqrt(m)))
    lo, hi = max(k - w, 0), min(k + w, m - 1)
    if hi == lo or not (np.isfinite(x[hi]) and np.isfinite(x[lo])):
        return math.inf
    width = x[hi] - x[lo]
    if width == 0:
        return 0.0
    dens = (hi - lo) / m / width
    return float(math.sqrt(p * (1 - p) / m) / dens)


# ---------------------------------------------------------------- samples

@dataclass(frozen=True)
class LimitSample:
    """Realised limit statistics, one per replication, in replication order."""

    l_values: np.ndarray
    t_values: np.ndarray
    psi_values: np.ndarray
    hurst: float
    method: Provenance
    params: dict = field(default_factory=dict)
    redraws: int = 0

    @property
    def m(self) -> int:
        return self.l_values.size

    @property
    def n_psi_infinite(self) -> int:
        return int(np.sum(np.isinf(self.psi_values)))

    def values(self, statistic) -> np.ndarray:
        statistic = Statistic(statistic)
        return {Statistic.L: self.l_values, Statistic.T: self.t_values,
                Statistic.PSI: self.psi_values}[statistic]

    def rows(self, statistic, probs=DEFAULT_PROBS) -> tuple:
        v = self.values(statistic)
        se_ok = v.size >= 2
        return tuple(QuantileRow(float(p), empirical_quantile(v, p),
                                 quantile_se(v, p) if se_ok else math.inf)
                     for p in probs)

    def table(self, statistic, probs=DEFAULT_PROBS) -> QuantileTable:
        return QuantileTable(statistic, {self.hurst: self.rows(statistic, probs)},
                             self.method, dict(self.params, M=self.m,
                                               redraws=self.redraws))


def _check_probs(probs):
    ps = np.asarray(probs, dtype=float)
    if ps.ndim != 1 or ps.size == 0 or np.any((ps <= 0) | (ps >= 1)) \
            or np.any(np.diff(ps) <= 0):
        raise InvalidInput("probs must be increasing values in (0, 1)")
    return tuple(float(p) for p in ps)


def _noise_spec(hurst, marginal_var):
    if not 0.5 <= hurst < 1.0:
        raise InvalidInput(f"hurst must lie in [0.5, 1), got {hurst}")
    if hurst == SRD:
        return DependenceSpec("IID", marginal_var=marginal_var)
    return DependenceSpec("FGN", hurst=hurst, marginal_var=marginal_var)


def _run(task, args_list, workers):
    if workers is None or workers <= 1 or len(args_list) <= 1:
        return [task(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(task, args_list))


def _chunks(m, workers):
    size = max(1, -(-m // max(1, 4 * (workers or 1))))
    return [(lo, min(lo + size, m)) for lo in range(0, m, size)]


def _m1_chunk(args):
    lo, hi, n, hurst, marginal_var, seed = args
    spec = _noise_spec(hurst, marginal_var)
    t = np.arange(1, n + 1) / n
    if hurst == SRD:
        scale = marginal_var
    else:
        a, b = math.sqrt(marginal_var), 0.5
        e = (2 * hurst - 1) / (2 - hurst)
        scale = n ** e * a * a * (a / b) ** e
    out = np.empty((hi - lo, 3))
    for j, r in enumerate(range(lo, hi)):
        y = t + sample(spec, n, stream(seed, r))
        t_raw, excess = ProfileFunction(y, 0.5).components([0.5])
        _, psi, _ = ratio_and_psi(t_raw + excess, t_raw, excess)
        out[j] = ((t_raw[0] + excess[0]) / scale, t_raw[0] / scale, psi[0])
    return out


def simulate_m1(n: int = 10_000, M: int = 2000, hurst: float = SRD,
                marginal_var: float = 0.2, probs=DEFAULT_PROBS, seed: int = 0,
                statistic=Statistic.PSI, workers: int | None = None):
    """Limit quantiles from large-sample statistics.

    Replication ``r`` draws ``y_i = i/n + eps_i`` from stream ``(seed, r)``
    and evaluates L, T and Psi at ``t0 = 1/2``, ``theta = 1/2``.  L and T are
    divided by ``sigma^2`` (short range) or by
    ``n^e a^2 (a/b)^e`` with ``e = (2H - 1)/(2 - H)``, ``a = sigma``,
    ``b = 1/2`` (long range).

    Returns
    -------
    (LimitSample, QuantileTable)
        The table is for ``statistic``; others follow from
        :meth:`LimitSample.table`.
    """
    probs = _check_probs(probs)
    if n < 100 or M < 1:
        raise InvalidInput("simulate_m1 needs n >= 100 and M >= 1")
    _noise_spec(hurst, marginal_var)
    tasks = [(lo, hi, int(n), float(hurst), float(marginal_var), int(seed))
             for lo, hi in _chunks(M, workers)]
    res = np.concatenate(_run(_m1_chunk, tasks, workers))
    samp = LimitSample(res[:, 0], res[:, 1], res[:, 2], float(hurst),
                       Provenance.SIMULATED_M1,
                       {"method": "M1", "n": int(n), "marginal_var": float(marginal_var),
                        "seed": int(seed)})
    return samp, samp.table(statistic, probs)


def _m2_chunk(args):
    lo, hi, step, half_width, hurst, seed, zero_noise = args
    n_side = int(round(half_width / step))
    grid = step * (np.arange(2 * n_side + 1) - n_side)
    drift = np.diff(grid ** 2)
    spec = _noise_spec(hurst, 1.0)
    out = np.empty((hi - lo, 3))
    redraws = 0
    for j, r in enumerate(range(lo, hi)):
        rng = stream(seed, r)
        while True:
            if zero_noise:
                dy = drift
            else:
                dy = drift + step ** hurst * sample(spec, 2 * n_side, rng)
            t_raw, excess = ProfileFunction(dy / step, 0.5).components([0.0])
            l_val = step * (t_raw[0] + excess[0])
            t_val = step * t_raw[0]
            if t_val > 0 or l_val <= 0:
                break
            redraws += 1
        _, psi, _ = ratio_and_psi(t_raw + excess, t_raw, excess)
        out[j] = (l_val, t_val, psi[0])
    return out, redraws


def simulate_m2(step: float = 2e-4, M: int = 2000, hurst: float = SRD,
                probs=DEFAULT_PROBS, seed: int = 0, half_width: float = 2.0,
                statistic=Statistic.PSI, workers: int | None = None,
                zero_noise: bool = False):
    """Limit quantiles from a discretised ``W(z) + z^2`` on ``[-c, c]``.

    ``W`` is a two-sided Brownian motion (``hurst = 0.5``) or fractional
    Brownian motion with ``Var W(z) = |z|^{2H}``, built from one Gaussian or
    fGn increment of variance ``step^{2H}`` per grid cell.  The unconstrained
    slopes come from the GCM over the whole grid, the constrained ones from
    the one-sided GCMs on ``[-c, 0]`` and ``[0, c]`` clipped at 0; then
    ``L = sum(S^2 - S0^2) step`` and ``T = sum((S - S0)^2) step``.

    Realisations with ``T = 0 < L`` are redrawn from the same stream and
    counted in ``LimitSample.redraws``.  ``zero_noise`` drops ``W`` (a test
    hook: the path is convex and ``L = T = 0``).
    """
    probs = _check_probs(probs)
    if not step > 0 or M < 1 or not half_width > step:
        raise InvalidInput("simulate_m2 needs step > 0, M >= 1, half_width > step")
    _noise_spec(hurst, 1.0)
    tasks = [(lo, hi, float(step), float(half_width), float(hurst), int(seed),
              bool(zero_noise)) for lo, hi in _chunks(M, workers)]
    parts = _run(_m2_chunk, tasks, workers)
    res = np.concatenate([p[0] for p in parts])
    redraws = sum(p[1] for p in parts)
    samp = LimitSample(res[:, 0], res[:, 1], res[:, 2], float(hurst),
                       Provenance.SIMULATED_M2,
                       {"method": "M2", "step": float(step),
                        "half_width": float(half_width), "seed": int(seed)},
                       redraws)
    return samp, samp.table(statistic, probs)
