"""Supertrend indicator backtesting with Bayesian parameter tuning.

Pipeline: market_data loads and splits OHLCV history, indicator computes
the Supertrend state, strategy turns direction flips into positions,
backtest produces the equity curve and metric set, bayes_opt searches the
(period, multiplier) box with a Gaussian-process surrogate, and app wires
it all behind a CLI.
"""

from .backtest import EquityCurve, MetricsReport, compute_metrics, max_drawdown, simulate
from .indicator import IndicatorParams, SupertrendSeries, atr, supertrend, true_range
from .market_data import (
    Bar,
    BarSeries,
    SplitPair,
    clean,
    fetch_history,
    load_csv,
    normalize_minmax,
    parse_csv,
    save_csv,
    serialize_csv,
    split_train_test,
)
from .strategy import PositionSeries, Signal, generate_signals

__version__ = "0.1.0"

__all__ = [
    "Bar",
    "BarSeries",
    "EquityCurve",
    "IndicatorParams",
    "MetricsReport",
    "PositionSeries",
    "Signal",
    "SplitPair",
    "SupertrendSeries",
    "atr",
    "clean",
    "compute_metrics",
    "fetch_history",
    "generate_signals",
    "load_csv",
    "max_drawdown",
    "normalize_minmax",
    "parse_csv",
    "save_csv",
    "serialize_csv",
    "simulate",
    "split_train_test",
    "supertrend",
    "true_range",
]
