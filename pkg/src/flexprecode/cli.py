"""Command-line front end: solve one scenario, or batch CDF / sweep experiments."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .channel import channel_matrix, sample_paths, trial_seed
from .experiments import (
    error_summary,
    load_config,
    run_method,
    run_monte_carlo,
    sweep,
    write_agg_csv,
    write_cdf_csv,
    write_raw_csv,
)
from .precoding import sinr_per_user, sum_rate


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="flat 'key = value' config file")
    p.add_argument("--trials", type=int, default=None, help="override trial count")
    p.add_argument("--alpha", default=None, help="override alpha list (comma separated)")
    p.add_argument("--methods", default=None, help="override method list (comma separated)")
    p.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    p.add_argument("--trace", action="store_true",
                   help="record per-iteration optimizer trace (solve/cdf)")
    p.add_argument("--timing", action="store_true",
                   help="write measured wall_ms into raw CSVs (breaks byte reproducibility)")


def _load(args) -> "ExperimentConfig":
    config = load_config(args.config)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if args.alpha:
        config = replace(config, alpha_list=tuple(float(a) for a in args.alpha.split(",")))
    if args.methods:
        config = replace(config, methods=tuple(m.strip() for m in args.methods.split(",")))
    return config


def _write_trace(path: Path, records: list) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True) + "\n")


def _cmd_solve(args) -> int:
    config = _load(args)
    seed = args.seed if args.seed is not None else trial_seed(config.master_seed, 0)
    paths = sample_paths(seed, config.num_users, config.num_paths)
    print(f"scenario seed: {seed}")
    for method in config.methods:
        for alpha in config.alpha_list:
            trace = [] if args.trace else None
            positions, F = run_method(config, paths, method, alpha, trace)
            H = channel_matrix(paths, positions, config.wavelength)
            sinr = sinr_per_user(H, F, config.noise_power)
            rate = sum_rate(H, F, config.noise_power)
            print(f"[{method}, alpha={alpha:g}]")
            print("  antenna positions (x, z) in meters:")
            for x, z in positions.coords:
                print(f"    ({x: .6f}, {z: .6f})")
            print("  per-user SINR: " + ", ".join(f"{s:.4f}" for s in sinr))
            print(f"  sum rate: {rate:.4f} bits/s/Hz")
            if trace:
                for record in trace:
                    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return 0


def _collect_traces(results) -> list:
    records = []
    for r in results:
        if r.trace:
            for record in r.trace:
                records.append({"trial": r.trial_index, "method": r.method,
                                "alpha": r.alpha, **record})
    return records


def _cmd_cdf(args) -> int:
    config = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = run_monte_carlo(config, workers=args.workers, collect_trace=args.trace)
    write_raw_csv(out / "cdf_raw.csv", results, config, timing=args.timing)
    write_cdf_csv(out / "cdf_points.csv", results, config)
    if args.trace:
        _write_trace(out / "trace.jsonl", _collect_traces(results))
    summary = error_summary(results)
    if summary:
        print(summary, file=sys.stderr)
    print(f"wrote {out / 'cdf_raw.csv'} and {out / 'cdf_points.csv'} "
          f"({config.trials} trials x {len(config.methods)} methods x {len(config.alpha_list)} alphas)")
    return 0


def _cmd_sweep(args, variable: str) -> int:
    config = _load(args)
    if args.trace:
        print("note: --trace is only recorded by solve/cdf; ignoring", file=sys.stderr)
    values = [int(v) for v in args.values.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = sweep(config, variable, values, workers=args.workers)
    target = out / f"sweep_{variable.lower()}.csv"
    write_agg_csv(target, rows)
    print(f"wrote {target} ({len(values)} values x {len(config.methods)} methods "
          f"x {len(config.alpha_list)} alphas, {config.trials} trials each)")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flexprecode",
        description="Movable-antenna flexible RZF precoding simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one scenario and print positions/SINR/rate")
    _add_common_flags(p_solve)
    p_solve.add_argument("--seed", type=int, default=None,
                         help="scenario seed (default: derived from master_seed, trial 0)")
    p_solve.set_defaults(func=_cmd_solve)

    p_cdf = sub.add_parser("cdf", help="Monte Carlo run emitting raw + CDF CSVs")
    _add_common_flags(p_cdf)
    p_cdf.add_argument("--out", required=True, help="output directory")
    p_cdf.set_defaults(func=_cmd_cdf)

    p_sg = sub.add_parser("sweep-g", help="sum rate versus movable region size G")
    _add_common_flags(p_sg)
    p_sg.add_argument("--values", required=True, help="comma-separated square G values")
    p_sg.add_argument("--out", required=True, help="output directory")
    p_sg.set_defaults(func=lambda a: _cmd_sweep(a, "G"))

    p_sl = sub.add_parser("sweep-l", help="sum rate versus number of channel paths L")
    _add_common_flags(p_sl)
    p_sl.add_argument("--values", required=True, help="comma-separated L values")
    p_sl.add_argument("--out", required=True, help="output directory")
    p_sl.set_defaults(func=lambda a: _cmd_sweep(a, "L"))

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
