"""Command-line interface.

Subcommands: ``generate``, ``fit``, ``ci``, ``band``, ``quantiles``, ``hurst``.
Data files are comma-separated ``t,y`` (or just ``y``) with an optional
header; ``t`` only orders the rows, the design is taken as ``i/n``.  Results
are JSON on stdout or ``--output``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import MonotrendError, NumericalFailure, Unsupported
from .estimators import estimate_hurst
from .inference import (Method, band, ci_ln_lrd, ci_ln_srd, ci_psi, ci_tn_srd,
                        lrd_nuisance)
from .isotonic import Series, fit_isotonic
from .limits import (DEFAULT_PROBS, SRD, HurstMode, QuantileTable, Statistic,
                     TableSet, load_default_tables, simulate_m1, simulate_m2,
                     table_dir)
from .noise import DependenceSpec, generate
from .trends import TRENDS, get_trend

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

_METHODS = {"ln-srd": Method.LN_SRD, "tn-srd": Method.TN_SRD,
            "ln-lrd": Method.LN_LRD, "psi": Method.PSI}
_MODES = {"exact": HurstMode.EXACT_H, "nearest": HurstMode.NEAREST_H,
          "conservative": HurstMode.CONSERVATIVE}


class DataError(MonotrendError):
    """Unreadable or malformed input file."""


class UsageError(MonotrendError):
    """Inconsistent command-line options."""


# ---------------------------------------------------------------- I/O

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


def dumps(obj) -> str:
    """Deterministic JSON; floats use the shortest round-tripping repr."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_csv(text: str, source: str = "<input>") -> Series:
    """Parse ``t,y`` or ``y`` rows; a non-numeric first row is a header."""
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        if not rows and width is None and not all(_is_number(c) for c in cells):
            width = len(cells)
            if width not in (1, 2):
                raise DataError(f"{source}:{lineno}: header must name 1 or 2 columns")
            continue
        if width is None:
            width = len(cells)
            if width not in (1, 2):
                raise DataError(f"{source}:{lineno}: expected 1 or 2 columns, got {width}")
        if len(cells) != width:
            raise DataError(f"{source}:{lineno}: expected {width} columns, got {len(cells)}")
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise DataError(f"{source}:{lineno}: non-numeric value in {row!r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise DataError(f"{source}:{lineno}: non-finite value")
        rows.append(vals)
    if len(rows) < 2:
        raise DataError(f"{source}: need at least two data rows, found {len(rows)}")
    arr = np.array(rows)
    if width == 2:
        t = arr[:, 0]
        if np.any(np.diff(t) <= 0):
            order = np.argsort(t, kind="stable")
            if np.any(np.diff(t[order]) == 0):
                raise DataError(f"{source}: duplicate t values")
            arr = arr[order]
        return Series(arr[:, 1])
    return Series(arr[:, 0])


def read_series(path) -> Series:
    try:
        text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return parse_csv(text, "<stdin>" if path in (None, "-") else str(path))


def _load_tables(path):
    if path is None:
        return None, str(table_dir())
    p = Path(path)
    try:
        if p.is_dir():
            return load_default_tables(p), str(p)
        return TableSet((QuantileTable.load(p),), (p.stem,)), str(p)
    except OSError as exc:
        raise DataError(f"cannot read table {p}: {exc}") from None


def _spec(arg):
    if arg is None:
        return None
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise DataError(f"cannot read spec {arg}: {exc}") from None
    return DependenceSpec.from_json(text)


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> dict:
    trend = get_trend(args.trend)
    n = args.n
    if n < 2:
        raise UsageError("--n must be at least 2")
    t = np.arange(1, n + 1) / n
    spec = _spec(args.spec)
    y = trend(t)
    if spec is not None:
        y = y + generate(spec, n, args.seed).values
    buf = io.StringIO()
    buf.write("t,y\n")
    for ti, yi in zip(t.tolist(), y.tolist()):
        buf.write(f"{ti!r},{yi!r}\n")
    meta = {"command": "generate", "trend": args.trend, "n": n, "seed": args.seed,
            "spec": None if spec is None else spec.to_dict(), "version": __version__}
    if args.output in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(args.output).write_text(buf.getvalue())
        Path(str(args.output) + ".json").write_text(dumps(meta))
    return meta


def cmd_fit(args) -> dict:
    series = read_series(args.input)
    fit = fit_isotonic(series)
    return {
        "command": "fit",
        "n": series.n,
        "t": series.t,
        "fitted": fit.fitted,
        "blocks": [{"start": b.start, "end": b.end, "level": b.level} for b in fit.blocks],
        "jumps": {"indices": fit.jump_indices, "sizes": fit.jump_sizes},
    }


def _ci(series, args, method, tables, alpha, t0):
    mode = _MODES[args.hurst_mode]
    if method is Method.LN_SRD:
        return ci_ln_srd(series, t0, alpha, tables, tau2=args.tau2)
    if method is Method.TN_SRD:
        return ci_tn_srd(series, t0, alpha, tables, tau2=args.tau2)
    if method is Method.PSI:
        hurst = SRD if args.hurst is None else args.hurst
        return ci_psi(series, t0, alpha, tables, hurst=hurst, hurst_mode=mode)
    est = lrd_nuisance(series, t0, bandwidth=args.bandwidth)
    hurst = est["hurst"] if args.hurst is None else args.hurst
    a_hat = est["a_hat"] if args.a_hat is None else args.a_hat
    b_hat = est["b_hat"] if args.b_hat is None else args.b_hat
    if args.hurst_mode == "exact" and args.hurst is None:
        mode = HurstMode.NEAREST_H
    ci = ci_ln_lrd(series, t0, alpha, tables, hurst=hurst, a_hat=a_hat,
                   b_hat=b_hat, hurst_mode=mode)
    return ci, est


def cmd_ci(args) -> dict:
    series = read_series(args.input)
    tables, table_src = _load_tables(args.table)
    method = _METHODS[args.method]
    res = _ci(series, args, method, tables, args.alpha, args.t0)
    extra = {}
    if isinstance(res, tuple):
        res, est = res
        extra = {"derivative_bandwidth": est["bandwidth"]}
    out = {"command": "ci", "t0": args.t0, "alpha": args.alpha, "n": series.n,
           "table_source": table_src, **res.to_dict()}
    out["nuisance"].update(extra)
    return out


def cmd_band(args) -> dict:
    series = read_series(args.input)
    tables, table_src = _load_tables(args.table)
    method = _METHODS[args.method]
    kwargs = {}
    if method is Method.PSI:
        kwargs = {"hurst": SRD if args.hurst is None else args.hurst,
                  "hurst_mode": _MODES[args.hurst_mode]}
    b = band(series, args.alpha, (args.a, args.b), args.k, method, tables,
             tau2=args.tau2, lower_rule=args.lower_rule, **kwargs)
    nuisance = b.pointwise[0].nuisance if b.pointwise else {}
    return {"command": "band", "n": series.n, "alpha": args.alpha,
            "table_source": table_src, "nuisance": nuisance,
            "quantile_provenance": b.pointwise[0].to_dict()["quantile"],
            **b.to_dict()}


def cmd_quantiles(args) -> dict:
    hurst = SRD if args.hurst is None else args.hurst
    probs = DEFAULT_PROBS if args.probs is None else tuple(args.probs)
    if args.design == "m1":
        samp, _ = simulate_m1(args.n, args.M, hurst, args.marginal_var, probs,
                              args.seed, workers=args.threads)
    else:
        samp, _ = simulate_m2(args.step, args.M, hurst, probs, args.seed,
                              workers=args.threads)
    tables = {s.value: samp.table(s, probs).to_dict() for s in Statistic}
    if args.output_dir is not None:
        d = Path(args.output_dir)
        d.mkdir(parents=True, exist_ok=True)
        for s in Statistic:
            samp.table(s, probs).save(d / f"{args.design}_{s.value.lower()}.json")
    return {"command": "quantiles", "design": args.design, "hurst": hurst,
            "M": samp.m, "n_psi_infinite": samp.n_psi_infinite,
            "redraws": samp.redraws, "params": samp.params, "tables": tables}


def cmd_hurst(args) -> dict:
    series = read_series(args.input)
    est = estimate_hurst(series.ys, args.vanishing_moments)
    return {"command": "hurst", "n": series.n, "hurst": est.value,
            "clipped": est.clipped, "regression_slope": est.regression_slope,
            "octaves": list(est.octaves), "log2_variances": est.log2_variances,
            "weights": est.weights, "vanishing_moments": args.vanishing_moments}


# ---------------------------------------------------------------- parser

def _probability(s):
    v = float(s)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"{s} is not in (0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monotrend",
                                description="Inference for monotone trends.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data=True):
        if data:
            sp.add_argument("--input", "-i", default="-", help="CSV file (default stdin)")
        sp.add_argument("--output", "-o", default="-", help="output file (default stdout)")

    g = sub.add_parser("generate", help="synthetic trend plus noise as CSV")
    common(g, data=False)
    g.add_argument("--trend", choices=sorted(TRENDS), default="m1")
    g.add_argument("--n", type=int, default=500)
    g.add_argument("--spec", help="DependenceSpec JSON or a path to one; omit for no noise")
    g.add_argument("--seed", type=int, default=0)

    f = sub.add_parser("fit", help="isotonic fit")
    common(f)

    def inference_opts(sp, methods):
        sp.add_argument("--alpha", type=_probability, default=0.05)
        sp.add_argument("--method", choices=methods, default=methods[0])
        sp.add_argument("--hurst", type=float)
        sp.add_argument("--hurst-mode", choices=sorted(_MODES), default="exact")
        sp.add_argument("--table", help="table JSON file or directory")
        sp.add_argument("--tau2", type=float, help="long-run variance (estimated if omitted)")

    c = sub.add_parser("ci", help="confidence interval for m(t0)")
    common(c)
    c.add_argument("--t0", type=_probability, required=True)
    inference_opts(c, ["ln-srd", "tn-srd", "ln-lrd", "psi"])
    c.add_argument("--a-hat", type=float)
    c.add_argument("--b-hat", type=float)
    c.add_argument("--bandwidth", type=float, help="derivative bandwidth for ln-lrd")

    b = sub.add_parser("band", help="simultaneous confidence band")
    common(b)
    inference_opts(b, ["ln-srd", "tn-srd", "psi"])
    b.add_argument("--a", type=_probability, default=0.1)
    b.add_argument("--b", type=_probability, default=0.9)
    b.add_argument("--k", type=int)
    b.add_argument("--lower-rule", choices=["max", "min"], default="max")

    q = sub.add_parser("quantiles", help="simulate limit quantile tables")
    common(q, data=False)
    q.add_argument("--design", choices=["m1", "m2"], default="m1")
    q.add_argument("--hurst", type=float, help="Hurst index; omit for short range")
    q.add_argument("--n", type=int, default=10_000)
    q.add_argument("--M", type=int, default=2000)
    q.add_argument("--step", type=float, default=2e-4)
    q.add_argument("--marginal-var", type=float, default=0.2)
    q.add_argument("--probs", type=_probability, nargs="+")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--threads", type=int, default=1, help="worker processes")
    q.add_argument("--output-dir", help="also save one table file per statistic")

    h = sub.add_parser("hurst", help="wavelet Hurst index estimate")
    common(h)
    h.add_argument("--vanishing-moments", type=int, default=4)
    return p


_COMMANDS = {"generate": cmd_generate, "fit": cmd_fit, "ci": cmd_ci,
             "band": cmd_band, "quantiles": cmd_quantiles, "hurst": cmd_hurst}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        result = _COMMANDS[args.command](args)
        if args.command != "generate":
            _emit(dumps(result), args.output)
    except (UsageError, Unsupported) as exc:
        print(f"monotrend: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"monotrend: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except MonotrendError as exc:
        print(f"monotrend: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
