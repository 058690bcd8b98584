"""Command line entry points for running experiments.

Subcommands:

- ``run`` executes a config and writes the result table, a detection
  probability summary, and a JSON manifest into the output directory.
- ``spectrum`` writes per-pipeline MUSIC pseudo-spectra for one trial.
- ``trace`` writes a per-sensor fold/unfold trace of one snapshot.

The output directory defaults to ``$MODOA_OUT_DIR`` or the working
directory.  Exit status is 0 on success and 2 on config or I/O errors,
with a diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from dataclasses import replace

from . import harness


def _out_dir(value: str | None) -> str:
    path = value or os.environ.get("MODOA_OUT_DIR") or os.getcwd()
    os.makedirs(path, exist_ok=True)
    return path


def _load(args: argparse.Namespace) -> harness.ExperimentConfig:
    config = harness.load_config(args.config)
    if getattr(args, "trials", None) is not None:
        config = replace(config, trials=args.trials)
    if getattr(args, "seed", None) is not None:
        config = replace(config, base_seed=args.seed)
    return config


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load(args)
    out = _out_dir(args.out)
    rows = harness.run_experiment(config, threads=args.threads)
    results_path = os.path.join(out, f"{config.name}_results.csv")
    harness.export_csv(rows, results_path, config.n_sources)
    harness.export_pd_summary(rows, os.path.join(out, f"{config.name}_pd_summary.csv"))
    harness.write_manifest(
        config, args.config, os.path.join(out, f"{config.name}_manifest.json"),
        rows=rows, threads=args.threads,
    )
    n_fail = sum(not r.detected for r in rows)
    print(f"{results_path}: {len(rows)} rows, {n_fail} without detection")
    return 0


def _cmd_spectrum(args: argparse.Namespace) -> int:
    config = _load(args)
    path = args.out or os.path.join(_out_dir(None), f"{config.name}_spectrum.csv")
    harness.export_spectra(config, path, grid_step=args.grid_step, trial=args.trial)
    print(path)
    return 0


def _cmd_trace(args: argparse.Namespace) -> int:
    config = _load(args)
    path = args.out or os.path.join(_out_dir(None), f"{config.name}_trace.csv")
    harness.export_trace(config, path, snapshot=args.snapshot, trial=args.trial)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modoa", description="modulo sampling DOA experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-trial progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config and write CSV results")
    run.add_argument("config", help="YAML experiment config")
    run.add_argument("--out", help="output directory (default $MODOA_OUT_DIR or cwd)")
    run.add_argument("--trials", type=int, help="override the config trial count")
    run.add_argument("--seed", type=int, help="override the config base seed")
    run.add_argument("--threads", type=int, default=1, help="trial-level worker processes")
    run.set_defaults(handler=_cmd_run)

    spectrum = sub.add_parser("spectrum", help="write MUSIC pseudo-spectra for one trial")
    spectrum.add_argument("config", help="YAML experiment config")
    spectrum.add_argument("--out", help="output CSV path")
    spectrum.add_argument("--seed", type=int, help="override the config base seed")
    spectrum.add_argument("--trial", type=int, default=0, help="trial index to acquire")
    spectrum.add_argument("--grid-step", type=float, default=0.01, dest="grid_step", help="grid step in degrees")
    spectrum.set_defaults(handler=_cmd_spectrum)

    trace = sub.add_parser("trace", help="write a per-sensor fold/unfold trace of one snapshot")
    trace.add_argument("config", help="YAML experiment config")
    trace.add_argument("--out", help="output CSV path")
    trace.add_argument("--seed", type=int, help="override the config base seed")
    trace.add_argument("--trial", type=int, default=0, help="trial index to acquire")
    trace.add_argument("--snapshot", type=int, default=15, help="time index to trace")
    trace.set_defaults(handler=_cmd_trace)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
