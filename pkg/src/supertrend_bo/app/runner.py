"""End-to-end runs: plain backtests, optimize-then-evaluate, comparison.

An optimization run tunes on the chronological training slice only; the
held-out test slice is touched exactly once, to backtest the chosen and
the default parameters after the search finishes. Comparison arithmetic
runs in Decimal so rendered tables carry no floating-point residue.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from ..backtest import EquityCurve, MetricsReport, compute_metrics, simulate
from ..bayes_opt import OptResult, optimize
from ..errors import SeriesTooShort
from ..indicator import IndicatorParams, SupertrendSeries, supertrend
from ..market_data import BarSeries, SplitPair, clean, load_csv, split_train_test
from ..strategy import PositionSeries, generate_signals
from .config import RunConfig
from .objective import build_objective, run_pipeline

TWO_PLACES = Decimal("0.01")


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    """One default-vs-optimized profit line, exact decimal arithmetic."""

    symbol: str
    max_profit_default: Decimal
    max_profit_optimized: Decimal
    improvement: Decimal
    improvement_pct: Decimal | None  # None renders as the literal N/A

    def rendered(self) -> dict[str, str]:
        def two(d: Decimal) -> str:
            return str(d.quantize(TWO_PLACES, rounding=ROUND_HALF_EVEN))

        return {
            "symbol": self.symbol,
            "max_profit_default": two(self.max_profit_default),
            "max_profit_optimized": two(self.max_profit_optimized),
            "improvement": two(self.improvement),
            "improvement_pct": "N/A" if self.improvement_pct is None else two(self.improvement_pct),
        }


def _as_decimal(value) -> Decimal:
    """Floats convert through their shortest repr, so 8.6 means 8.6."""
    if isinstance(value, Decimal):
        return value
    return Decimal(str(value))


def compare_profits(default_profit, optimized_profit, symbol: str = "SERIES") -> ComparisonRow:
    """Core comparison arithmetic on two max-profit figures."""
    default_dec = _as_decimal(default_profit)
    optimized_dec = _as_decimal(optimized_profit)
    improvement = optimized_dec - default_dec
    pct = None if default_dec == 0 else improvement / default_dec * 100
    return ComparisonRow(
        symbol=symbol,
        max_profit_default=default_dec,
        max_profit_optimized=optimized_dec,
        improvement=improvement,
        improvement_pct=pct,
    )


def compare(default_report: MetricsReport, optimized: OptResult, symbol: str = "SERIES") -> ComparisonRow:
    """Default-parameter backtest vs the optimizer's best target; both
    sides must come from the same asset and data slice."""
    return compare_profits(default_report.max_profit, optimized.best_target, symbol)


@dataclass(frozen=True, slots=True)
class BacktestRun:
    symbol: str
    series: BarSeries
    params: IndicatorParams
    st: SupertrendSeries
    positions: PositionSeries
    curve: EquityCurve
    metrics: MetricsReport


def run_backtest(config: RunConfig, series: BarSeries | None = None) -> BacktestRun:
    """Backtest the configured default parameters over the whole series."""
    if series is None:
        series = _load_series(config)
    params = IndicatorParams(config.default_period, config.default_multiplier)
    st, positions, curve, metrics = run_pipeline(series, params, config)
    return BacktestRun(
        symbol=config.resolved_symbol(),
        series=series,
        params=params,
        st=st,
        positions=positions,
        curve=curve,
        metrics=metrics,
    )


@dataclass(frozen=True, slots=True)
class OptimizeRun:
    """Everything one optimize invocation produced, for reporting."""

    symbol: str
    config: RunConfig
    split: SplitPair
    result: OptResult
    best_params: IndicatorParams
    metrics_train_default: MetricsReport
    metrics_train_optimized: MetricsReport
    metrics_test_default: MetricsReport
    metrics_test_optimized: MetricsReport
    curve_test_default: EquityCurve
    curve_test_optimized: EquityCurve
    comparison: ComparisonRow

    def summary(self) -> dict[str, float | int | str]:
        return {
            "symbol": self.symbol,
            "atr_period": self.result.best_params[0],
            "atr_multiplier": self.result.best_params[1],
            "max_profit": self.result.best_target,
            "seed": self.result.seed,
            "train_profit": self.result.best_target,
            "test_profit": self.metrics_test_optimized.max_profit,
        }


def _load_series(config: RunConfig) -> BarSeries:
    if config.csv_path is None:
        raise ValueError("config has no csv_path")
    raw = load_csv(config.csv_path, symbol=config.resolved_symbol())
    return clean(raw, config.fill_policy)


def _backtest_slice(series: BarSeries, params: IndicatorParams, config: RunConfig):
    if len(series) <= params.atr_period + 1:
        raise SeriesTooShort(
            f"slice of {len(series)} bars cannot support period {params.atr_period}"
        )
    _, _, curve, metrics = run_pipeline(series, params, config)
    return curve, metrics


def run_optimize(
    config: RunConfig, series: BarSeries | None = None, write_artifacts: bool = True
) -> tuple[OptResult, MetricsReport]:
    """Tune on the train slice, then score the winner on the test slice.

    Writes the iteration log and the test-slice metrics into the run
    directory unless write_artifacts is False. Returns the optimization
    result and the held-out MetricsReport.
    """
    run = execute_optimize(config, series)
    if write_artifacts:
        from .reports import emit_reports  # deferred: pulls in matplotlib

        emit_reports([run], config.out_dir)
    return run.result, run.metrics_test_optimized


def execute_optimize(config: RunConfig, series: BarSeries | None = None) -> OptimizeRun:
    if series is None:
        series = _load_series(config)
    split = split_train_test(series, config.split_ratio)

    objective = build_objective(split.train, config)
    result = optimize(
        objective,
        config.space,
        n_init=config.n_init,
        n_iter=config.n_iter,
        acq=config.acq,
        seed=config.seed,
    )
    best = IndicatorParams(*result.best_params)
    default = IndicatorParams(config.default_period, config.default_multiplier)

    _, train_default = _backtest_slice(split.train, default, config)
    _, train_optimized = _backtest_slice(split.train, best, config)
    curve_test_default, test_default = _backtest_slice(split.test, default, config)
    curve_test_optimized, test_optimized = _backtest_slice(split.test, best, config)

    symbol = config.resolved_symbol()
    return OptimizeRun(
        symbol=symbol,
        config=config,
        split=split,
        result=result,
        best_params=best,
        metrics_train_default=train_default,
        metrics_train_optimized=train_optimized,
        metrics_test_default=test_default,
        metrics_test_optimized=test_optimized,
        curve_test_default=curve_test_default,
        curve_test_optimized=curve_test_optimized,
        comparison=compare(train_default, result, symbol),
    )
