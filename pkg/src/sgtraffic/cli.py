"""Command line: ``sgtraffic run|validate|sweep <config>``.

Exit codes: 0 success, 1 solver failure, 2 invalid configuration or usage.
The output directory may also come from ``SGTRAFFIC_OUTPUT_DIR``.
"""
import argparse
import logging
import os
import sys

from . import montecarlo
from .config import SWEEPS, load_config, validate_config
from .errors import ConfigError
from .experiments import run_experiment

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def _snapshots(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad snapshot list {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="sgtraffic", description="Stochastic Galerkin traffic-flow experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "run the configured scenario"),
                       ("validate", "check a configuration and list violations"),
                       ("sweep", "run a steady-state or sigma sweep")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config")
        if name != "validate":
            p.add_argument("--output-dir", help="directory for CSV, figures and summary.json")
            p.add_argument("--snapshots", type=_snapshots, help="comma separated output times")
            p.add_argument("--seed", type=int, default=montecarlo.DEFAULT_SEED,
                           help="seed for pseudo-random Monte Carlo sampling")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command != "validate" and args.snapshots is not None:
        cfg.snapshots = args.snapshots
    problems = validate_config(cfg)
    if args.command == "validate":
        for msg in problems:
            print(msg)
        if not problems:
            print("ok")
        return EXIT_USAGE if problems else EXIT_OK
    if problems:
        for msg in problems:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "sweep" and cfg.scenario not in SWEEPS:
        print(f"error: scenario {cfg.scenario!r} is not a sweep", file=sys.stderr)
        return EXIT_USAGE
    out_dir = args.output_dir or os.environ.get("SGTRAFFIC_OUTPUT_DIR") or cfg.output_dir
    try:
        summary = run_experiment(cfg, out_dir, seed=args.seed)
    except Exception as exc:  # report any solver failure as a nonzero exit
        logging.getLogger("sgtraffic").debug("run failed", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    for path in summary["files"]:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
