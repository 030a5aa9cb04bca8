"""Command-line entry point.

Usage::

    hetsec fig3 --out fig3.csv --workers 4
    hetsec sweep --config my_sweep.toml --samples 100000 --seed 7
    hetsec presets

Exit status: 0 on success, 2 for configuration errors, 3 when every point
of the sweep failed numerically.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError
from .config import MIN_MC_SAMPLES, parse_config
from .presets import PRESETS
from .runner import emit_csv, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _add_run_flags(p):
    p.add_argument("--samples", type=int, help="Monte-Carlo draws per point")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="CSV destination (default: stdout)")
    p.add_argument("--workers", type=int, default=1, help="parallel processes")
    p.add_argument("--timing", action="store_true",
                   help="record wall_time_ms (output is then not reproducible)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hetsec",
        description="Secrecy outage sweeps for macro/small-cell spectrum sharing.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in PRESETS:
        _add_run_flags(sub.add_parser(name, help=f"run the {name} preset"))
    sweep = sub.add_parser("sweep", help="run a sweep described by a config file")
    sweep.add_argument("--config", required=True, help="TOML sweep description")
    _add_run_flags(sweep)
    show = sub.add_parser("presets", help="list presets or print one")
    show.add_argument("name", nargs="?", choices=sorted(PRESETS))
    return parser


def _load_spec(args):
    if args.command == "sweep":
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    else:
        text = PRESETS[args.command]
    spec = parse_config(text)
    changes = {}
    if args.samples is not None:
        if args.samples < MIN_MC_SAMPLES and "mc" in spec.methods:
            raise ConfigError(f"--samples must be >= {MIN_MC_SAMPLES}")
        changes["mc_samples"] = args.samples
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must lie in [0, 2**64)")
        changes["seed"] = args.seed
    return spec.with_(**changes) if changes else spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        if args.name:
            sys.stdout.write(PRESETS[args.name].lstrip())
        else:
            print("\n".join(PRESETS))
        return EXIT_OK
    try:
        spec = _load_spec(args)
    except ConfigError as exc:
        print(f"hetsec: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print("hetsec: config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    rows = run_sweep(spec, workers=args.workers, timing=args.timing)
    try:
        emit_csv(rows, args.out if args.out else sys.stdout)
    except OSError as exc:
        print(f"hetsec: cannot write output: {exc}", file=sys.stderr)
        return 1
    failed = [r for r in rows if r.error]
    for r in failed:
        print(f"hetsec: {r.scheme}/{r.method} at {r.axis:g}: {r.error}", file=sys.stderr)
    if failed and len(failed) == len(rows):
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
