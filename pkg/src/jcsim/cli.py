"""Command-line driver: ``jcsim <scenario> [flags]`` or ``jcsim run --config FILE``.

Exit codes: 0 success, 2 configuration error, 3 numerical or regime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import SCENARIOS, ScenarioConfig, build_config, read_values
from .errors import ConfigError, JCSimError
from .runner import ScenarioResult, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

# (flag, config key, type)
OVERRIDES = [
    ("--n-max", "n_max", int),
    ("--t-max", "t_max", float),
    ("--samples", "samples", int),
    ("--alpha", "alpha", float),
    ("--mean-n", "mean_n", float),
    ("--out", "out", str),
    ("--n", "n", int),
    ("--g", "g", float),
    ("--omega", "omega", float),
    ("--delta", "delta", float),
    ("--field", "field", str),
    ("--atom", "atom", str),
    ("--atom-theta", "atom_theta", float),
    ("--atom-phi", "atom_phi", float),
    ("--tail-tol", "tail_tol", float),
    ("--threshold", "threshold", float),
    ("--convention", "convention", str),
    ("--preset", "preset", str),
    ("--format", "format", str),
]


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("overrides (take precedence over the config file)")
    for flag, key, typ in OVERRIDES:
        group.add_argument(flag, dest=key, type=typ, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jcsim", description="Jaynes-Cummings scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the scenario named in a config file")
    run.add_argument("--config", required=True, help="TOML scenario file")
    _add_overrides(run)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", help="optional TOML file; its scenario key is replaced")
        _add_overrides(p)
    return parser


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    values = read_values(args.config) if args.config else {}
    if args.command != "run":
        values["scenario"] = args.command
    for _, key, _ in OVERRIDES:
        value = getattr(args, key)
        if value is not None:
            values[key] = value
    return build_config(values)


def _table_text(columns: dict) -> str:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    if not np.all(np.isfinite(data)):
        raise JCSimError("non-finite value in output table")
    lines = [",".join(names)]
    lines += [",".join("%.17g" % v for v in row) for row in data]
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_outputs(result: ScenarioResult, out: str, fmt: str = "csv") -> list[Path]:
    """Write series, spectrum and summary files into directory ``out``."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for name, table in (("series", result.series), ("spectrum", result.spectrum)):
        if table is None:
            continue
        if fmt == "csv":
            text = _table_text(table)
        else:
            _table_text(table)   # finiteness check
            text = _json_text(_jsonable(table))
        files.append(out_dir / f"{name}.{fmt}")
        files[-1].write_bytes(text.encode("utf-8"))
    summary = out_dir / "summary.json"
    try:
        summary.write_bytes(_json_text(_jsonable(result.summary)).encode("utf-8"))
    except ValueError as exc:
        raise JCSimError(f"summary is not finite: {exc}") from None
    files.append(summary)
    return files


def _fail(kind: str, exc: Exception, code: int) -> int:
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        result = run_scenario(cfg)
        files = write_outputs(result, cfg.out, cfg.format)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except JCSimError as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
