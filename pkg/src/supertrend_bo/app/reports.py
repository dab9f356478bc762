"""Artifact emission: CSV data files and static SVG charts per run.

Every optimize run writes, under <out_dir>/<symbol>/:

    iterations.csv          evaluation log (iter,target,atr_multiplier,atr_period)
    metrics_default.csv     default params scored on the held-out test slice
    metrics_optimized.csv   best params scored on the held-out test slice
    comparison.csv          train-slice default profit vs the optimizer's best
    best_summary.json       best params, seed, train/test profits
    equity_default.csv      test-slice balance path, default params
    equity_optimized.csv    test-slice balance path, best params
    equity.svg              both balance paths
    convergence.svg         running best target per iteration
    search_scatter.svg      evaluated points colored by target

Nothing is written until the inputs validate, and all charts are plain
SVG with a fixed hash salt so reruns are reproducible.
"""

from __future__ import annotations

import csv
import json
from datetime import date
from pathlib import Path
from typing import IO, Callable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..backtest import EquityCurve, write_metrics_csv  # noqa: E402
from ..bayes_opt import OptResult, write_history_csv  # noqa: E402
from ..errors import IoFailure  # noqa: E402
from ..market_data import BarSeries  # noqa: E402
from .runner import BacktestRun, ComparisonRow, OptimizeRun  # noqa: E402

plt.rcParams["svg.hashsalt"] = "supertrend-bo"

_SVG_METADATA = {"Date": None}

COMPARISON_HEADER = (
    "symbol",
    "max_profit_default",
    "max_profit_optimized",
    "improvement",
    "improvement_pct",
)


def _safe_name(symbol: str) -> str:
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in symbol)


def _write(path: Path, writer: Callable[[IO[str]], None]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer(handle)
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return path


def write_comparison_csv(rows: Sequence[ComparisonRow], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=COMPARISON_HEADER)
    writer.writeheader()
    for row in rows:
        writer.writerow(row.rendered())


def write_equity_csv(dates: Sequence[date], curve: EquityCurve, stream: IO[str]) -> None:
    writer = csv.writer(stream)
    writer.writerow(["date", "balance"])
    for d, balance in zip(dates, curve.balances):
        writer.writerow([d.isoformat(), repr(float(balance))])


def read_equity_csv(stream: IO[str]) -> tuple[list[date], list[float]]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["date", "balance"]:
        raise ValueError(f"not an equity CSV (header {header})")
    dates, balances = [], []
    for row in reader:
        dates.append(date.fromisoformat(row[0]))
        balances.append(float(row[1]))
    return dates, balances


def read_history_csv(stream: IO[str]) -> list[dict[str, float]]:
    reader = csv.DictReader(stream)
    expected = ["iter", "target", "atr_multiplier", "atr_period"]
    if reader.fieldnames != expected:
        raise ValueError(f"not an iteration log (header {reader.fieldnames})")
    return [
        {
            "iter": int(row["iter"]),
            "target": float(row["target"]),
            "atr_multiplier": float(row["atr_multiplier"]),
            "atr_period": float(row["atr_period"]),
        }
        for row in reader
    ]


def emit_reports(results: Sequence[OptimizeRun], output_dir: str | Path) -> list[Path]:
    """Write the full artifact set for each run; returns the paths written."""
    results = list(results)
    if not results:
        raise ValueError("no results to report")
    output_dir = Path(output_dir)
    written: list[Path] = []
    for run in results:
        run_dir = output_dir / _safe_name(run.symbol)
        test_dates = run.split.test.dates()

        written.append(_write(run_dir / "iterations.csv", lambda s: write_history_csv(run.result, s)))
        written.append(
            _write(run_dir / "metrics_default.csv", lambda s: write_metrics_csv(run.metrics_test_default, s))
        )
        written.append(
            _write(run_dir / "metrics_optimized.csv", lambda s: write_metrics_csv(run.metrics_test_optimized, s))
        )
        written.append(
            _write(run_dir / "comparison.csv", lambda s: write_comparison_csv([run.comparison], s))
        )
        written.append(
            _write(
                run_dir / "best_summary.json",
                lambda s: s.write(json.dumps(run.summary(), indent=2) + "\n"),
            )
        )
        written.append(
            _write(
                run_dir / "equity_default.csv",
                lambda s: write_equity_csv(test_dates, run.curve_test_default, s),
            )
        )
        written.append(
            _write(
                run_dir / "equity_optimized.csv",
                lambda s: write_equity_csv(test_dates, run.curve_test_optimized, s),
            )
        )
        written.extend(render_run_plots(run_dir))
    return written


def emit_backtest_reports(run: BacktestRun, output_dir: str | Path) -> list[Path]:
    """Artifacts for a plain (no optimization) backtest."""
    run_dir = Path(output_dir) / _safe_name(run.symbol)
    dates = run.series.dates()
    written = [
        _write(run_dir / "metrics.csv", lambda s: write_metrics_csv(run.metrics, s)),
        _write(run_dir / "equity.csv", lambda s: write_equity_csv(dates, run.curve, s)),
    ]
    label = f"period {run.params.atr_period}, multiplier {run.params.atr_multiplier}"
    written.append(
        _plot_equity(run_dir / "equity.svg", [(dates, list(run.curve.balances), label)])
    )
    return written


def render_run_plots(run_dir: str | Path) -> list[Path]:
    """Render the three charts from the CSVs already in a run directory."""
    run_dir = Path(run_dir)
    with (run_dir / "iterations.csv").open(newline="", encoding="utf-8") as handle:
        history = read_history_csv(handle)
    series = []
    for name, label in (("equity_default.csv", "default"), ("equity_optimized.csv", "optimized")):
        path = run_dir / name
        if path.exists():
            with path.open(newline="", encoding="utf-8") as handle:
                dates, balances = read_equity_csv(handle)
            series.append((dates, balances, label))
    written = []
    if series:
        written.append(_plot_equity(run_dir / "equity.svg", series))
    written.append(_plot_convergence(run_dir / "convergence.svg", history))
    written.append(_plot_scatter(run_dir / "search_scatter.svg", history))
    return written


def _save(fig, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    finally:
        plt.close(fig)
    return path


def _plot_equity(path: Path, series: list[tuple[list[date], list[float], str]]) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for dates, balances, label in series:
        ax.plot(dates, balances, label=label, linewidth=1.2)
    ax.set_xlabel("date")
    ax.set_ylabel("balance")
    ax.set_title("Cumulative balance")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.autofmt_xdate()
    return _save(fig, path)


def _plot_convergence(path: Path, history: list[dict[str, float]]) -> Path:
    iters = [h["iter"] for h in history]
    best = []
    current = float("-inf")
    for h in history:
        current = max(current, h["target"])
        best.append(current)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.step(iters, best, where="post", label="best so far")
    ax.plot(iters, [h["target"] for h in history], ".", alpha=0.5, label="evaluation")
    ax.set_xlabel("iteration")
    ax.set_ylabel("target (max profit)")
    ax.set_title("Optimization convergence")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def _plot_scatter(path: Path, history: list[dict[str, float]]) -> Path:
    fig, ax = plt.subplots(figsize=(7, 5))
    sc = ax.scatter(
        [h["atr_period"] for h in history],
        [h["atr_multiplier"] for h in history],
        c=[h["target"] for h in history],
        cmap="viridis",
        s=40,
    )
    best = max(history, key=lambda h: h["target"])
    ax.scatter([best["atr_period"]], [best["atr_multiplier"]], marker="*", s=240,
               facecolor="none", edgecolor="red", label="best")
    fig.colorbar(sc, ax=ax, label="target")
    ax.set_xlabel("atr_period")
    ax.set_ylabel("atr_multiplier")
    ax.set_title("Evaluated parameter points")
    ax.legend()
    return _save(fig, path)
