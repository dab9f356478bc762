"""Command-line entry points.

Subcommands: backtest, optimize, compare, fetch, report. Exit codes:
0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import date
from pathlib import Path

from ..backtest import read_metrics_csv
from ..errors import DataError, NumericalError, UsageError
from ..market_data import fetch_history
from .config import RunConfig, parse_bounds, parse_config_file
from .runner import compare_profits, execute_optimize, run_backtest

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; we reserve 2 for data errors
        raise UsageError(message)


def _add_common_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--csv", type=Path, help="OHLCV history CSV (Yahoo export layout)")
    parser.add_argument("--symbol", help="asset label (default: CSV file stem)")
    parser.add_argument("--capital", type=float, help="starting balance (default 100)")
    parser.add_argument("--leverage", type=float, help="per-bar return multiplier (default 1)")
    parser.add_argument("--allow-short", action="store_true", default=None,
                        help="hold shorts between sell and buy instead of cash")
    parser.add_argument("--fill", choices=["forward_fill", "drop_row"],
                        help="missing-value policy (default forward_fill)")
    parser.add_argument("--out", type=Path, help="output directory (default ./runs)")
    parser.add_argument("--config", type=Path, help="key = value config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="supertrend-bo",
                     description="Supertrend backtesting and parameter optimization")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("backtest", parents=[], help="backtest fixed parameters over a CSV")
    _add_common_run_flags(p)
    p.add_argument("--period", type=int, help="ATR period (default 15)")
    p.add_argument("--multiplier", type=int, help="ATR multiplier (default 3)")

    p = sub.add_parser("optimize", help="tune (period, multiplier) on the training slice")
    _add_common_run_flags(p)
    p.add_argument("--split", type=float, help="train fraction (default 0.8)")
    p.add_argument("--n-init", type=int, help="initial random evaluations (default 5)")
    p.add_argument("--n-iter", type=int, help="surrogate-guided evaluations (default 50)")
    p.add_argument("--acq", choices=["ei", "ucb"], help="acquisition function (default ei)")
    p.add_argument("--seed", type=int, help="run seed (default 0)")
    p.add_argument("--period-bounds", help="period search interval, e.g. 5,30")
    p.add_argument("--mult-bounds", help="multiplier search interval, e.g. 1,5")

    p = sub.add_parser("compare", help="compare a default metrics file with a best summary")
    p.add_argument("--default", required=True, type=Path, dest="default_metrics",
                   help="Metric,Value CSV from a default-parameter backtest")
    p.add_argument("--optimized", required=True, type=Path,
                   help="best_summary.json from an optimize run")
    p.add_argument("--out", type=Path, help="write the comparison CSV here too")

    p = sub.add_parser("fetch", help="download history to the local CSV cache")
    p.add_argument("--symbol", required=True)
    p.add_argument("--start", required=True, help="ISO date")
    p.add_argument("--end", required=True, help="ISO date")
    p.add_argument("--interval", default="daily", choices=["daily", "weekly", "monthly"])
    p.add_argument("--base-url", help="endpoint override (default $SUPERTREND_DATA_URL)")
    p.add_argument("--cache-dir", type=Path, help="cache override (default $SUPERTREND_CACHE_DIR)")

    p = sub.add_parser("report", help="re-render the charts for an existing run directory")
    p.add_argument("--run-dir", required=True, type=Path)

    return parser


def _build_config(args: argparse.Namespace) -> RunConfig:
    from ..bayes_opt import SearchSpace

    file_values: dict[str, str] = {}
    if args.config is not None:
        file_values = parse_config_file(args.config)

    def pick(flag_value, key: str, caster, fallback):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return caster(file_values[key])
        return fallback

    base = RunConfig()
    csv_path = pick(args.csv, "csv", Path, None)
    if csv_path is None:
        raise UsageError("--csv is required (or csv = ... in the config file)")

    raw_period_bounds = pick(getattr(args, "period_bounds", None), "period_bounds", str, None)
    raw_mult_bounds = pick(getattr(args, "mult_bounds", None), "mult_bounds", str, None)
    space = SearchSpace(
        period_bounds=parse_bounds(raw_period_bounds) if raw_period_bounds else base.space.period_bounds,
        multiplier_bounds=parse_bounds(raw_mult_bounds) if raw_mult_bounds else base.space.multiplier_bounds,
    )

    mode = "long_short" if pick(args.allow_short, "allow_short", lambda v: v.lower() == "true", False) else "long_flat"
    return RunConfig(
        csv_path=csv_path,
        symbol=pick(args.symbol, "symbol", str, None),
        split_ratio=pick(getattr(args, "split", None), "split", float, base.split_ratio),
        capital=pick(args.capital, "capital", float, base.capital),
        leverage=pick(args.leverage, "leverage", float, base.leverage),
        mode=mode,
        default_period=pick(getattr(args, "period", None), "period", int, base.default_period),
        default_multiplier=pick(getattr(args, "multiplier", None), "multiplier", int,
                                base.default_multiplier),
        space=space,
        n_init=pick(getattr(args, "n_init", None), "n_init", int, base.n_init),
        n_iter=pick(getattr(args, "n_iter", None), "n_iter", int, base.n_iter),
        acq=pick(getattr(args, "acq", None), "acq", str, base.acq),
        seed=pick(getattr(args, "seed", None), "seed", int, base.seed),
        out_dir=pick(args.out, "out", Path, base.out_dir),
        fill_policy=pick(args.fill, "fill", str, base.fill_policy),
    )


def _cmd_backtest(args: argparse.Namespace) -> int:
    from .reports import emit_backtest_reports

    config = _build_config(args)
    run = run_backtest(config)
    paths = emit_backtest_reports(run, config.out_dir)
    for name, value in run.metrics.to_rows():
        print(f"{name}: {value}")
    print(f"wrote {len(paths)} files under {config.out_dir / run.symbol}")
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    from .reports import emit_reports

    config = _build_config(args)
    run = execute_optimize(config)
    paths = emit_reports([run], config.out_dir)
    for key, value in run.summary().items():
        print(f"{key}: {value}")
    print(f"wrote {len(paths)} files under {config.out_dir / run.symbol}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    from .reports import write_comparison_csv

    with args.default_metrics.open(newline="", encoding="utf-8") as handle:
        metrics = read_metrics_csv(handle)
    summary = json.loads(args.optimized.read_text(encoding="utf-8"))
    row = compare_profits(
        metrics["Max Profit"],
        str(summary["max_profit"]),
        symbol=str(summary.get("symbol", "SERIES")),
    )
    rendered = row.rendered()
    print(",".join(rendered.keys()))
    print(",".join(rendered.values()))
    if args.out is not None:
        with args.out.open("w", newline="", encoding="utf-8") as handle:
            write_comparison_csv([row], handle)
    return 0


def _cmd_fetch(args: argparse.Namespace) -> int:
    from ..market_data import cache_path

    try:
        start, end = date.fromisoformat(args.start), date.fromisoformat(args.end)
    except ValueError as exc:
        raise UsageError(f"bad date: {exc}") from exc
    series = fetch_history(
        args.symbol, start, end, args.interval,
        base_url=args.base_url, cache_dir=args.cache_dir,
    )
    print(f"{len(series)} bars cached at {cache_path(args.symbol, args.interval, args.cache_dir)}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from .reports import render_run_plots

    paths = render_run_plots(args.run_dir)
    for path in paths:
        print(path)
    return 0


_COMMANDS = {
    "backtest": _cmd_backtest,
    "optimize": _cmd_optimize,
    "compare": _cmd_compare,
    "fetch": _cmd_fetch,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO, stream=sys.stderr)
        return _COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
