"""Command-line interface.

Subcommands: ``run`` executes one experiment and writes learning-curve,
mixing, and steady-state report CSVs plus a manifest; ``sweep`` repeats the
first combination algorithm over a grid of one combiner parameter; ``compare``
runs at least two algorithms on shared streams and emits their dB delta.

Exit codes: 0 success, 2 config validation failure, 3 unwritable output
directory. Environment variables COMBOFILTER_TRIALS, COMBOFILTER_SEED,
COMBOFILTER_JOBS and COMBOFILTER_OUT supply defaults for the matching flags.
All floats are written with 17 significant digits, locale-independent.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from pathlib import Path

from .experiment import emse_db, convergence_time, run_monte_carlo
from .manifest import ConfigError, RunManifest, dump_config, load_config
from .presets import DEFAULT_SEED, DEFAULT_TRIALS, PRESETS
from .scenario import RngSpec

__all__ = ["main", "cmd_run", "cmd_sweep", "cmd_compare"]

# Sweepable combiner parameters: CLI token -> CombinerConfig field.
SWEEP_PARAMS = {"N0": "transfer_window", "rho_a": "mixing_step"}

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_OUTPUT = 3


class OutputDirError(OSError):
    pass


def _fmt(value):
    """Locale-independent float formatting, 17 significant digits."""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _env(name, cast, fallback):
    raw = os.environ.get(f"COMBOFILTER_{name}")
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as err:
        raise ConfigError(f"COMBOFILTER_{name}", str(err)) from err


def _resolve_config(args):
    """Build the experiment config from --preset/--config plus overrides."""
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ConfigError(
                "--preset", f"unknown preset {args.preset!r}, have {sorted(PRESETS)}"
            )
        config = PRESETS[args.preset](trials=DEFAULT_TRIALS, seed=DEFAULT_SEED)
        config_path = None
    else:
        config = load_config(args.config)
        config_path = str(args.config)
    trials = _env("TRIALS", int, None) if args.trials is None else args.trials
    seed = _env("SEED", int, None) if args.seed is None else args.seed
    try:
        if trials is not None:
            config = replace(config, trials=trials)
        if seed is not None:
            config = replace(config, rng=RngSpec(seed))
    except ValueError as err:
        raise ConfigError("trials" if trials is not None else "seed", str(err)) from err
    return config, config_path


def _resolve_out(args):
    out = args.out if args.out is not None else _env("OUT", str, None)
    if out is None:
        raise ConfigError("--out", "output directory is required")
    return Path(out)


def _resolve_jobs(args):
    jobs = args.jobs if args.jobs is not None else _env("JOBS", int, 1)
    if jobs < 1:
        raise ConfigError("--jobs", f"must be >= 1, got {jobs}")
    return jobs


def _prepare_out_dir(out_dir):
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as err:
        raise OutputDirError(f"output directory {out_dir} is not writable: {err}")


def _write_csv(path, header, rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as err:
        raise OutputDirError(f"cannot write {path}: {err}")


def _write_curves(out_dir, result, suffix=""):
    for name, algo in result.algorithms.items():
        curve = algo.curve
        db = curve.db
        rows = (
            (n + 1, _fmt(float(db[n])), _fmt(float(curve.mean_square[n])))
            for n in range(len(curve))
        )
        _write_csv(out_dir / f"curve_{name}{suffix}.csv", ["n", "emse_db", "emse_raw"], rows)
        if algo.mixing_mean is not None:
            rows = (
                (n + 1, _fmt(float(algo.mixing_mean[n])), _fmt(float(algo.aux_mean[n])))
                for n in range(len(curve))
            )
            _write_csv(
                out_dir / f"mixing_{name}{suffix}.csv",
                ["n", "lambda_mean", "a_mean"],
                rows,
            )


def _write_report(out_dir, result):
    rows = []
    for name, algo in result.algorithms.items():
        if algo.report is None:
            continue
        report = algo.report
        rows.append(
            (
                name,
                _fmt(report.fast_emse),
                _fmt(report.slow_emse),
                _fmt(report.cross_emse),
                _fmt(report.combined_emse),
                _fmt(report.reported_emse),
                _fmt(report.mean_mixing),
                _fmt(report.mixing_variance),
                report.verdict,
            )
        )
    if rows:
        _write_csv(
            out_dir / "report.csv",
            [
                "algorithm",
                "fast_emse",
                "slow_emse",
                "cross_emse",
                "combined_emse",
                "reported_emse",
                "mean_mixing",
                "mixing_variance",
                "verdict",
            ],
            rows,
        )


def _write_manifest(out_dir, manifest):
    try:
        dump_config(manifest.config, out_dir / "manifest.yaml")
    except OSError as err:
        raise OutputDirError(f"cannot write manifest: {err}")


def cmd_run(args):
    config, config_path = _resolve_config(args)
    out_dir = _resolve_out(args)
    jobs = _resolve_jobs(args)
    _prepare_out_dir(out_dir)
    result = run_monte_carlo(config, jobs=jobs)
    _write_curves(out_dir, result)
    _write_report(out_dir, result)
    _write_manifest(out_dir, RunManifest(config, str(out_dir), config_path))
    return _EXIT_OK


def _parse_sweep_values(param, raw_values):
    field = SWEEP_PARAMS[param]
    values = []
    for token in raw_values:
        for piece in str(token).split(","):
            piece = piece.strip()
            if not piece:
                continue
            try:
                value = int(piece) if field == "transfer_window" else float(piece)
            except ValueError as err:
                raise ConfigError("--values", f"bad value {piece!r}: {err}") from err
            values.append(value)
    if not values:
        raise ConfigError("--values", "at least one value is required")
    return values


def _value_token(value):
    return str(value).replace(".", "p").replace("-", "m")


def cmd_sweep(args):
    config, config_path = _resolve_config(args)
    out_dir = _resolve_out(args)
    jobs = _resolve_jobs(args)
    values = _parse_sweep_values(args.param, args.values)
    field = SWEEP_PARAMS[args.param]
    targets = [spec for spec in config.algorithms if spec.is_combination]
    if not targets:
        raise ConfigError("algorithms", "sweep requires a combination algorithm")
    target = targets[0]
    _prepare_out_dir(out_dir)
    summary = []
    for value in values:
        try:
            combiner = replace(target.combiner, **{field: value})
            spec = replace(target, combiner=combiner)
            swept = replace(config, algorithms=(spec,))
        except ValueError as err:
            raise ConfigError(f"--values ({args.param}={value})", str(err)) from err
        result = run_monte_carlo(swept, jobs=jobs)
        algo = result[target.name]
        _write_curves(out_dir, result, suffix=f"_{args.param}_{_value_token(value)}")
        steady_db = algo.steady_state_db
        threshold = (
            config.convergence_threshold_db
            if config.convergence_threshold_db is not None
            else steady_db + 3.0
        )
        summary.append(
            (
                _fmt(value),
                _fmt(steady_db),
                convergence_time(algo.curve, threshold),
            )
        )
    _write_csv(
        out_dir / "sweep_summary.csv",
        ["value", "steady_state_db", "convergence_time"],
        summary,
    )
    _write_manifest(out_dir, RunManifest(config, str(out_dir), config_path))
    return _EXIT_OK


def cmd_compare(args):
    config, config_path = _resolve_config(args)
    out_dir = _resolve_out(args)
    jobs = _resolve_jobs(args)
    if len(config.algorithms) < 2:
        raise ConfigError("algorithms", "compare requires at least two algorithms")
    _prepare_out_dir(out_dir)
    result = run_monte_carlo(config, jobs=jobs)
    _write_curves(out_dir, result)
    _write_report(out_dir, result)
    first, second = config.algorithms[0].name, config.algorithms[1].name
    delta = result[first].curve.db - result[second].curve.db
    rows = ((n + 1, _fmt(float(delta[n]))) for n in range(delta.size))
    _write_csv(out_dir / f"delta_{first}_vs_{second}.csv", ["n", "delta_db"], rows)
    _write_manifest(out_dir, RunManifest(config, str(out_dir), config_path))
    return _EXIT_OK


def _add_common(parser):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=sorted(PRESETS), help="canned scenario")
    source.add_argument("--config", type=Path, help="YAML config or manifest file")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--trials", type=int, default=None, help="override trial count")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="combofilter",
        description="Impulsive-noise system identification with combined adaptive filters",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run one experiment")
    _add_common(run_parser)
    run_parser.set_defaults(func=cmd_run)

    sweep_parser = sub.add_parser("sweep", help="sweep one combiner parameter")
    _add_common(sweep_parser)
    sweep_parser.add_argument(
        "--param", choices=sorted(SWEEP_PARAMS), required=True, help="parameter to sweep"
    )
    sweep_parser.add_argument(
        "--values", nargs="+", required=True, help="values, space or comma separated"
    )
    sweep_parser.set_defaults(func=cmd_sweep)

    compare_parser = sub.add_parser("compare", help="compare algorithms on shared streams")
    _add_common(compare_parser)
    compare_parser.set_defaults(func=cmd_compare)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return _EXIT_CONFIG
    except OutputDirError as err:
        print(f"output error: {err}", file=sys.stderr)
        return _EXIT_OUTPUT


if __name__ == "__main__":
    sys.exit(main())
