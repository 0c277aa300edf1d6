"""Command line entry point.

Usage:

    horoextreme <experiment> [--r LIST] [--T LIST] [--samples N] [--seed S]
                [--workers W] [--c1 X] [--out PATH] [--format csv|json]
                [--config PATH]

Option precedence, lowest to highest: built-in defaults, the HOROEXTREME_SEED
environment variable, a --config file of flat key=value lines (keys named
like the flags), then explicit flags.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 report contains
failed cells.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import harness
from ._version import __version__

SEED_ENV_VAR = "HOROEXTREME_SEED"

_CONFIG_KEYS = ("r", "T", "samples", "seed", "workers", "c1", "out", "format")


def _parse_float_list(text: str, name: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"--{name} expects comma-separated numbers, got {text!r}")


def _parse_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horoextreme",
        description="Monte Carlo cross-checks of lattice excursion formulas",
    )
    parser.add_argument("experiment", choices=harness.EXPERIMENTS)
    parser.add_argument("--r", help="comma-separated level values")
    parser.add_argument("--T", help="comma-separated window lengths")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--c1", type=float)
    parser.add_argument("--out", help="output path; stdout when omitted")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def _build_config(args: argparse.Namespace) -> harness.ExperimentConfig:
    merged = {
        "r": None,
        "T": None,
        "samples": harness.DEFAULT_SAMPLES,
        "seed": 0,
        "workers": 1,
        "c1": None,
        "out": None,
        "format": "csv",
    }
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            merged["seed"] = int(env_seed)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}")
    if args.config is not None:
        merged.update(_parse_config_file(args.config))
    for key in ("r", "T", "samples", "seed", "workers", "c1", "out", "format"):
        flag = getattr(args, key)
        if flag is not None:
            merged[key] = flag
    kwargs = {"experiment": args.experiment}
    if merged["r"] is not None:
        v = merged["r"]
        kwargs["r_values"] = v if isinstance(v, tuple) else _parse_float_list(v, "r")
    if merged["T"] is not None:
        v = merged["T"]
        kwargs["T_values"] = v if isinstance(v, tuple) else _parse_float_list(v, "T")
    kwargs["samples"] = int(merged["samples"])
    kwargs["seed"] = int(merged["seed"])
    kwargs["workers"] = int(merged["workers"])
    if merged["c1"] is not None:
        kwargs["c1"] = float(merged["c1"])
    kwargs["output_path"] = merged["out"]
    kwargs["fmt"] = str(merged["format"])
    return harness.ExperimentConfig(**kwargs)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _build_config(args)
        config = harness.validate_config(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    report = harness.run(config)
    try:
        harness.emit(report, config.output_path, config.fmt)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 4 if report.failures else 0


if __name__ == "__main__":
    sys.exit(main())
