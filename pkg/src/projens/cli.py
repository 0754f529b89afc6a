"""Command-line front end: run experiments, sweeps, and verification checks.

Subcommands: run, sweep, theorem1, replica, target, distance.  run and
sweep read a TOML config (every field overridable by a flag) and write one
CSV of distance series plus one JSON metadata file.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import tomli

from .harness import (
    ExperimentConfig,
    resolve_targets,
    run_experiment,
    run_scaling_sweep,
    verify_replica,
    verify_theorem1,
    _parse_initial,
)
from .metrics import trace_distance
from .records import (
    read_matrix,
    write_matrix,
    write_meta_json,
    write_run_csv,
    write_sweep_csv,
)

_CONFIG_FIELDS = {
    "n": int,
    "n_a": int,
    "k": int,
    "initial": str,
    "basis": str,
    "t_max": int,
    "realizations": int,
    "mc_samples": int,
    "memory_budget": int,
    "workers": int,
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML config file")
    for name, typ in _CONFIG_FIELDS.items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=typ, default=None)
    parser.add_argument(
        "--target",
        action="append",
        default=None,
        help="target spec (repeatable; first is primary)",
    )
    parser.add_argument(
        "--plateau-window", type=int, nargs=2, metavar=("LO", "HI"), default=None
    )
    parser.add_argument("--seed", type=int, required=True, help="master seed")
    parser.add_argument("--out-dir", type=Path, default=Path("."))
    parser.add_argument("--tag", default=None, help="output file stem")


def _load_config(args) -> ExperimentConfig:
    data: dict = {}
    if args.config is not None:
        with open(args.config, "rb") as fh:
            data.update(tomli.load(fh))
    for name in _CONFIG_FIELDS:
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if args.target:
        data["targets"] = tuple(args.target)
    if args.plateau_window is not None:
        data["plateau_window"] = tuple(args.plateau_window)
    data["seed"] = args.seed
    if "n" not in data:
        raise SystemExit("config error: system size n is required")
    return ExperimentConfig.from_dict(data)


def _cmd_run(args) -> int:
    config = _load_config(args)
    record = run_experiment(config)
    stem = args.tag or f"run_{record.fingerprint}"
    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = args.out_dir / f"{stem}.csv"
    meta_path = args.out_dir / f"{stem}.json"
    write_run_csv(record, csv_path)
    write_meta_json(record, meta_path)
    for target in record.targets:
        mean, spread = record.plateau(target)
        print(f"{target}: plateau {mean:.6g} +- {spread:.2g}")
    print(f"wrote {csv_path} and {meta_path}")
    return 0


def _cmd_sweep(args) -> int:
    n_values = [int(v) for v in args.n_list.split(",")]
    if args.n is None:
        args.n = n_values[0]  # base config size; overridden per sweep point
    config = _load_config(args)
    sweep = run_scaling_sweep(config, n_values, fit_kind=args.fit)
    stem = args.tag or f"sweep_{sweep.fingerprint}"
    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = args.out_dir / f"{stem}.csv"
    meta_path = args.out_dir / f"{stem}.json"
    write_sweep_csv(sweep, csv_path)
    write_meta_json(sweep, meta_path)
    for target, fit in sweep.fits.items():
        if "rate" in fit:
            print(f"{target}: plateau ~ 2^(-{fit['rate']:.3f} N)")
        elif "exponent" in fit:
            print(f"{target}: plateau ~ N^{fit['exponent']:.3f}")
        else:
            print(f"{target}: plateaus {fit['plateaus']} (no fit)")
    print(f"wrote {csv_path} and {meta_path}")
    return 0


def _cmd_theorem1(args) -> int:
    rng = np.random.default_rng(args.seed)
    stats = verify_theorem1(args.n, args.n_a, args.q0, args.k, args.samples, rng)
    for key, value in stats.items():
        print(f"{key}: {value}")
    return 0


def _cmd_replica(args) -> int:
    report = verify_replica(samples=args.samples, seed=args.seed)
    print(f"{'N':>3} {'N_A':>3} {'Q_B':>3} {'n':>2} {'type':>12} "
          f"{'exact':>12} {'mc':>12} {'z':>7}")
    for row in report["rows"]:
        print(
            f"{row['n']:>3} {row['n_a']:>3} {row['q_b']:>3} {row['replica_n']:>2} "
            f"{str(row['t_vec']):>12} {row['exact']:>12.5e} {row['mc']:>12.5e} "
            f"{row['z']:>7.2f}"
        )
    print(f"worst |z| = {report['worst_z']:.2f} -> {'PASS' if report['passed'] else 'FAIL'}")
    return 0 if report["passed"] else 1


def _cmd_target(args) -> int:
    config = _load_config(args)
    _, p, q0 = _parse_initial(config)
    moments = resolve_targets(config, p, q0)
    label = config.targets[0]
    write_matrix(moments[label], args.out)
    print(f"wrote {label} moment ({moments[label].dim}x{moments[label].dim}) to {args.out}")
    return 0


def _cmd_distance(args) -> int:
    a = read_matrix(args.a)
    b = read_matrix(args.b)
    print(f"{trace_distance(a, b):.12e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projens",
        description="projected ensembles of charge-conserving circuits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one experiment")
    _add_config_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="scan over system sizes")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--n-list", required=True, help="comma-separated N values")
    p_sweep.add_argument("--fit", choices=("exponential", "power"), default="exponential")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_thm = sub.add_parser("theorem1", help="random sector states vs direct sum")
    p_thm.add_argument("--n", type=int, required=True)
    p_thm.add_argument("--n-a", type=int, default=2)
    p_thm.add_argument("--q0", type=int, required=True)
    p_thm.add_argument("--k", type=int, default=2)
    p_thm.add_argument("--samples", type=int, default=64)
    p_thm.add_argument("--seed", type=int, required=True)
    p_thm.set_defaults(func=_cmd_theorem1)

    p_rep = sub.add_parser("replica", help="exact vs Monte Carlo type weights")
    p_rep.add_argument("--samples", type=int, default=10**5)
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.set_defaults(func=_cmd_replica)

    p_tgt = sub.add_parser("target", help="dump a target moment matrix")
    _add_config_flags(p_tgt)
    p_tgt.add_argument("--out", type=Path, required=True)
    p_tgt.set_defaults(func=_cmd_target)

    p_dist = sub.add_parser("distance", help="trace distance of two dumped matrices")
    p_dist.add_argument("--a", type=Path, required=True)
    p_dist.add_argument("--b", type=Path, required=True)
    p_dist.set_defaults(func=_cmd_distance)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
