"""Command-line entry point: ``infoimb <command> [options]``.

Every command writes its reports into ``--out`` together with a
``manifest.json`` recording the exact argument vector, a hash of the parsed
configuration, SHA-256 digests of the inputs, the seed and the tool version.
Report JSON is written with sorted keys and carries no timestamps, so the same
invocation reproduces it byte for byte.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import DataError, InfoImbError
from .forecast import MODES, ForecastConfig, run_forecast
from .greedy import EPSILON, MAX_K, greedy_plane_points, greedy_select
from .imbalance import imbalance_plane
from .ingest import AlignedPanel, Frequency, IngestOptions, align, as_frequency, load_panel, write_csv
from .resample import AGGREGATE, IMPUTE, resample, resample_panel, roughness
from .scan import candidate_pool, scan
from .synth import REGIMES, SynthSpec, generate_series

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4
FREQUENCIES = [f.value for f in Frequency]


# -- output helpers ---------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.datetime64):
        return str(obj)
    if isinstance(obj, Frequency):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_json(path: Path, obj) -> None:
    path.write_text(dumps(obj), encoding="utf-8")


def _write_rows(path: Path, rows: list[dict], columns: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in _jsonable(row).items()})


def _sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _config(args: argparse.Namespace) -> dict:
    skip = {"func", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def write_manifest(out: Path, args: argparse.Namespace, argv: Sequence[str], outputs: list[str]) -> dict:
    config = _config(args)
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "config": config,
        "config_sha256": hashlib.sha256(dumps(config).encode()).hexdigest(),
        "inputs": {str(p): _sha256(p) for p in (getattr(args, "input", None) or [])},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "outputs": sorted(outputs),
        "created": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    }
    _write_json(out / "manifest.json", manifest)
    return manifest


def _wants(args: argparse.Namespace, kind: str) -> bool:
    return args.format is None or args.format == kind


# -- panel loading -----------------------------------------------------------

def load_aligned(args: argparse.Namespace) -> AlignedPanel:
    """Load ``--input`` files and bring them onto one grid at ``--frequency``
    (default: the coarsest input frequency)."""
    series = load_panel(args.input, IngestOptions())
    names = [s.name for s in series]
    target = args.target or names[0]
    if target not in names:
        raise DataError(f"target {target!r} not found; columns are {', '.join(names)}")
    if args.frequency:
        freq = as_frequency(args.frequency)
    else:
        freq = max((s.frequency for s in series), key=lambda f: f.rank)
    if all(s.frequency is freq for s in series):
        return align(series, freq, target)
    return resample_panel(series, freq, target)


# -- commands ----------------------------------------------------------------

def cmd_plane(args) -> list[str]:
    panel = load_aligned(args)
    pool = candidate_pool(panel)
    if not pool:
        raise DataError("panel has no candidate columns besides the target")
    points = imbalance_plane(panel, [[c] for c in pool], [panel.target_name])
    rows = [{"column": p.x_columns[0], "forward": p.forward, "backward": p.backward} for p in points]
    written = []
    if _wants(args, "json"):
        _write_json(args.out / "plane.json", {"target": panel.target_name, "n": panel.n,
                                              "frequency": panel.frequency, "points": rows})
        written.append("plane.json")
    if _wants(args, "csv"):
        _write_rows(args.out / "plane.csv", rows, ["column", "forward", "backward"])
        written.append("plane.csv")
    return written


def cmd_select(args) -> list[str]:
    panel = load_aligned(args)
    trace = greedy_select(panel, candidate_pool(panel), panel.target_name, args.max_k, args.epsilon)
    written = []
    if _wants(args, "json"):
        _write_json(args.out / "select.json", {**trace.to_dict(), "n": panel.n, "frequency": panel.frequency})
        written.append("select.json")
    if _wants(args, "csv"):
        _write_rows(args.out / "select.csv", greedy_plane_points(trace), ["k", "column", "forward", "backward"])
        written.append("select.csv")
    return written


def cmd_resample(args) -> list[str]:
    if not args.frequency:
        raise DataError("resample needs --frequency")
    freq = as_frequency(args.frequency)
    series = load_panel(args.input, IngestOptions())
    out, summary = [], []
    for s in series:
        r = resample(s, freq, args.mode)
        if args.mode:
            mode = args.mode
        elif r is s:
            mode = "pass"
        else:
            mode = IMPUTE if freq.rank < s.frequency.rank else AGGREGATE
        out.append(r)
        summary.append({"column": s.name, "source_frequency": s.frequency, "mode": mode,
                        "n_in": len(s), "n_out": len(r),
                        "roughness_in": roughness(s.values) if len(s) > 1 else None,
                        "roughness_out": roughness(r.values) if len(r) > 1 else None})
    write_csv(out, args.out / "resampled.csv")
    written = ["resampled.csv"]
    if _wants(args, "json"):
        _write_json(args.out / "resample.json", {"frequency": freq, "series": summary})
        written.append("resample.json")
    return written


def cmd_scan(args) -> list[str]:
    series = load_panel(args.input, IngestOptions())
    target = args.target or series[0].name
    report = scan(series, args.frequencies, args.lags, target, args.max_k, args.epsilon)
    written = []
    if _wants(args, "json"):
        _write_json(args.out / "scan.json", report.to_dict())
        written.append("scan.json")
    if _wants(args, "csv"):
        _write_rows(args.out / "scan.csv", report.curve_rows(),
                    ["frequency", "delta_t", "k", "column", "forward", "backward"])
        written.append("scan.csv")
    return written


def cmd_forecast(args) -> list[str]:
    panel = load_aligned(args)
    config = ForecastConfig(delta_t=args.delta_t, mode=args.mode, k=args.k, replications=args.replications,
                            seed=args.seed, cv_folds=args.cv_folds, sigma_n_sq=args.sigma_n_sq)
    report = run_forecast(panel, config)
    written = []
    if _wants(args, "json"):
        _write_json(args.out / "forecast.json", {**report.to_dict(), "n": panel.n, "frequency": panel.frequency,
                                                 "seed": args.seed, "cv_folds": args.cv_folds})
        written.append("forecast.json")
    if _wants(args, "csv"):
        _write_rows(args.out / "forecast_path.csv", report.path_rows(),
                    ["replication", "fold", "date", "realized", "predicted"])
        written.append("forecast_path.csv")
    return written


def cmd_synth(args) -> list[str]:
    spec = SynthSpec(args.regime, n=args.n, seed=args.seed, sigma=args.sigma, phi=args.phi,
                     d_inf=args.d_inf, d_noise=args.d_noise, n_noise=args.n_noise, amplitude=args.amplitude)
    write_csv(generate_series(spec), args.out / "synth.csv")
    return ["synth.csv"]


# -- parser ------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, inputs: bool = True, target: bool = True) -> None:
    if inputs:
        p.add_argument("--input", action="append", required=True, metavar="CSV",
                       help="input CSV (repeatable)")
    if target:
        p.add_argument("--target", help="target column (default: first column)")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--format", choices=["json", "csv"], default=None,
                   help="restrict reports to one format (default: both)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infoimb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plane", help="imbalance plane of every column against the target")
    _common(p)
    p.add_argument("--frequency", choices=FREQUENCIES)
    p.set_defaults(func=cmd_plane)

    p = sub.add_parser("select", help="greedy forward selection")
    _common(p)
    p.add_argument("--frequency", choices=FREQUENCIES)
    p.add_argument("--max-k", type=int, default=MAX_K)
    p.add_argument("--epsilon", type=float, default=EPSILON)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("resample", help="GP imputation or aggregation to another frequency")
    _common(p, target=False)
    p.add_argument("--frequency", choices=FREQUENCIES, required=True)
    p.add_argument("--mode", choices=[IMPUTE, AGGREGATE])
    p.set_defaults(func=cmd_resample)

    p = sub.add_parser("scan", help="greedy selection across frequencies and lags")
    _common(p)
    p.add_argument("--frequencies", nargs="+", choices=FREQUENCIES, default=["daily", "weekly", "monthly"])
    p.add_argument("--lags", nargs="+", type=int, default=[0, 1])
    p.add_argument("--max-k", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=EPSILON)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("forecast", help="cross-validated GP nowcast / one-step forecast")
    _common(p)
    p.add_argument("--frequency", choices=FREQUENCIES)
    p.add_argument("--delta-t", type=int, choices=[0, 1], default=0)
    p.add_argument("--mode", choices=MODES, default="selected")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--replications", type=int, default=10)
    p.add_argument("--cv-folds", type=int, default=5)
    p.add_argument("--sigma-n-sq", type=float, default=1e-3, help="GP noise in standardized units")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("synth", help="write a seeded synthetic panel as CSV")
    _common(p, inputs=False, target=False)
    p.add_argument("--regime", choices=REGIMES, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float)
    p.add_argument("--phi", type=float, default=0.95)
    p.add_argument("--d-inf", type=int, default=3)
    p.add_argument("--d-noise", type=int, default=27)
    p.add_argument("--n-noise", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        written = args.func(args)
        write_manifest(args.out, args, argv, written)
    except InfoImbError as exc:
        print(f"infoimb {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"infoimb {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
