"""Command-line entry point.

::

    sykmagic run CONFIG [--workers K] [--seed S] [--out DIR]
    sykmagic export ENVELOPE --figure ID [--out DIR]

The worker count falls back to ``$SYKMAGIC_WORKERS`` and then to the config.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError
from .experiments import FIGURES, export_figure_data, load_config, load_envelope, resolve_workers, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sykmagic", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and write envelope.json")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--workers", type=int, default=None, help="parallel worker processes")
    p_run.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_run.add_argument("--out", type=Path, default=None, help="output directory")

    p_exp = sub.add_parser("export", help="write figure CSVs from an envelope")
    p_exp.add_argument("envelope", type=Path)
    p_exp.add_argument("--figure", required=True, choices=FIGURES)
    p_exp.add_argument("--out", type=Path, default=None, help="output directory (default: envelope's)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg.master_seed = args.seed
            workers = resolve_workers(args.workers, cfg.workers)
            if workers < 1:
                raise ConfigError("workers must be >= 1")
            out = args.out if args.out is not None else Path(cfg.output)
            env = run(cfg, workers=workers, out_dir=out)
            for g in env["groups"]:
                print(f"{g['model']} N={g['N']}: {g['achieved']}/{g['requested']} realizations")
            print(out / "envelope.json")
        else:
            env = load_envelope(args.envelope)
            base = args.envelope if args.envelope.is_dir() else args.envelope.parent
            for path in export_figure_data(env, args.figure, args.out or base):
                print(path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
