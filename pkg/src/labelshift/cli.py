"""Command-line interface: run simulation grids and write result CSVs.

Subcommands:

* ``simulate``: run a named grid preset.
* ``sweep``: run a grid described by a JSON config file.
* ``evaluate``: run a single (method, n_P, n_Q, seed) cell and print it.

Exit codes: 0 on success, 2 on configuration errors, 3 when the grid ran but
at least one cell failed (NaN row in the output).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from .experiments import (
    METHOD_NAMES,
    PRESET_NAMES,
    ExperimentConfig,
    ExperimentRecord,
    config_from_dict,
    evaluate_cell,
    preset_config,
    run_grid,
    summarize,
    write_csv,
)

CONFIG_ERROR = 2
CELL_FAILURE = 3


class _ConfigError(Exception):
    pass


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker processes for grid cells (default 1)")
    parser.add_argument("--master-seed", type=int, default=0, metavar="K",
                        help="root seed for all RNG streams (default 0)")
    parser.add_argument("--no-timing", action="store_true",
                        help="write wallclock_ms as 0 for byte-reproducible CSVs")
    parser.add_argument("--test-n", type=int, default=None, metavar="T",
                        help="test points per risk estimate (default 20000)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labelshift",
        description="Label-shift classifier simulations with an analytic Bayes ground truth.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a named grid preset")
    _add_common(sim)
    sim.add_argument("--preset", required=True, choices=PRESET_NAMES)
    sim.add_argument("--seeds", type=int, default=None, help="replicates per cell (default 20)")
    sim.add_argument("--methods", default=None, metavar="A,B,...",
                     help="comma-separated subset overriding the preset's methods")
    sim.add_argument("--out", default="results.csv", help="output CSV path")

    swp = sub.add_parser("sweep", help="run a grid from a JSON config file")
    _add_common(swp)
    swp.add_argument("--config", required=True, help="JSON file with ExperimentConfig keys")
    swp.add_argument("--out", default="results.csv", help="output CSV path")

    ev = sub.add_parser("evaluate", help="run one (method, n_P, n_Q, seed) cell")
    _add_common(ev)
    ev.add_argument("--method", required=True, choices=METHOD_NAMES + ("bayes",))
    ev.add_argument("--n-p", type=int, required=True, dest="n_p")
    ev.add_argument("--n-q", type=int, required=True, dest="n_q")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out", default=None, help="optional CSV path for the single record")
    return parser


def _apply_common(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    from dataclasses import replace

    updates: dict = {"threads": args.threads, "master_seed": args.master_seed}
    if args.no_timing:
        updates["record_timing"] = False
    if args.test_n is not None:
        updates["test_n"] = args.test_n
    return replace(config, **updates)


def _simulate_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides: dict = {}
    if args.seeds is not None:
        overrides["seeds"] = args.seeds
    if args.methods is not None:
        overrides["methods"] = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    try:
        return _apply_common(preset_config(args.preset, **overrides), args)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc


def _sweep_config(args: argparse.Namespace) -> ExperimentConfig:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        return _apply_common(config_from_dict(raw), args)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc


def _evaluate_config(args: argparse.Namespace) -> ExperimentConfig:
    try:
        cfg = ExperimentConfig(
            n_p_grid=(args.n_p,),
            n_q_grid=(args.n_q,),
            methods=(args.method,),
            seeds=1,
        )
        if args.seed < 0:
            raise ValueError(f"seed must be >= 0, got {args.seed}")
        return _apply_common(cfg, args)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc


def _finish(records: Sequence[ExperimentRecord], out: str | None) -> int:
    if out is not None:
        write_csv(records, out)
        print(f"wrote {len(records)} records to {out}")
    summarize(records)
    failed = sum(1 for r in records if math.isnan(r.excess_risk))
    if failed:
        print(f"{failed} cell(s) failed (NaN rows flagged in the CSV)", file=sys.stderr)
        return CELL_FAILURE
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            config = _simulate_config(args)
        elif args.command == "sweep":
            config = _sweep_config(args)
        else:
            config = _evaluate_config(args)
    except _ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR

    if args.command == "evaluate":
        records = evaluate_cell(config, config.n_p_grid[0], config.n_q_grid[0], args.seed)
    else:
        records = run_grid(config)
    return _finish(records, args.out)


if __name__ == "__main__":
    sys.exit(main())
