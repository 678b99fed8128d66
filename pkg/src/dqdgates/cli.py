"""Command-line interface: one subcommand per experiment kind.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import experiments, plots
from .config import (EXPERIMENTS, ConfigError, load_preset, parse_config,
                     preset_names)
from .device import DeviceError
from .dynamics import DynamicsError
from .fidelity import FidelityError
from .noise import NoiseError
from .sequences import SequenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

THREADS_ENV = "DQDGATES_THREADS"

NUMERICAL_ERRORS = (experiments.ExperimentError, DeviceError, DynamicsError,
                    FidelityError, NoiseError, SequenceError,
                    FloatingPointError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqdgates",
        description="Simulate photon-mediated entangling gates between "
                    "double-quantum-dot spin qubits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENTS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path,
                         help="path to a config file")
        src.add_argument("--preset", choices=preset_names(),
                         help="bundled preset name")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", type=Path, default=Path("out"),
                       help="output directory (default: ./out)")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default: ${THREADS_ENV} or 1)")
        p.add_argument("--plot", action="store_true",
                       help="also render PNG figures next to the CSVs")
    return parser


def _load(args) -> "experiments.ExperimentConfig":
    if args.preset is not None:
        cfg = load_preset(args.preset)
    else:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError([f"cannot read {args.config}: {exc}"]) from exc
        cfg = parse_config(text)
    if cfg.kind != args.command:
        raise ConfigError(
            [f"config declares kind = {cfg.kind!r}, but the "
             f"{args.command!r} subcommand was invoked"])
    if args.seed is not None:
        values = dict(cfg.values)
        values["experiment"] = dict(values["experiment"], seed=args.seed)
        cfg = type(cfg)(values=values, text=cfg.text)
    return cfg


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(
                [f"{THREADS_ENV} must be an integer, got {env!r}"]) from None
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        threads = _threads(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = experiments.run(cfg, threads=threads)
        written = experiments.write_outputs(result, cfg, args.out)
        if args.plot:
            written += plots.render(cfg.kind, result, args.out)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
