"""The profit objective the optimizer maximizes.

The target is max_profit: the highest point of the cumulative balance
path minus starting capital, computed by running the full indicator ->
signals -> simulation pipeline on the series the objective was built
over (the training slice in an optimization run). Raw parameters are
truncated to integers before evaluation.
"""

from __future__ import annotations

from typing import Callable

from ..backtest import compute_metrics, simulate
from ..errors import SeriesTooShort
from ..indicator import IndicatorParams, supertrend
from ..market_data import BarSeries
from ..strategy import generate_signals
from .config import RunConfig


def run_pipeline(series: BarSeries, params: IndicatorParams, config: RunConfig):
    """supertrend -> signals -> equity curve -> metrics for one series."""
    st = supertrend(series, params)
    positions = generate_signals(st, series.closes(), config.mode)
    curve = simulate(positions, series.closes(), config.capital, config.leverage)
    return st, positions, curve, compute_metrics(curve)


def max_profit_objective(
    series: BarSeries, params_raw: tuple[float, float], config: RunConfig
) -> float:
    """Evaluate one raw (period, multiplier) point on `series`."""
    period, multiplier = int(params_raw[0]), int(params_raw[1])
    if len(series) <= period + 1:
        raise SeriesTooShort(
            f"series of {len(series)} bars cannot support period {period}"
        )
    params = IndicatorParams(atr_period=period, atr_multiplier=multiplier)
    _, _, _, metrics = run_pipeline(series, params, config)
    return metrics.max_profit


def build_objective(series: BarSeries, config: RunConfig) -> Callable[[int, int], float]:
    """Bind the series and config into the (period, multiplier) -> profit
    callable the optimizer consumes. Fails fast if the series cannot
    support the largest period in the search space."""
    worst_period = int(config.space.period_bounds[1])
    if len(series) <= worst_period + 1:
        raise SeriesTooShort(
            f"training slice of {len(series)} bars cannot support periods up to {worst_period}"
        )

    def objective(period: int, multiplier: int) -> float:
        return max_profit_objective(series, (float(period), float(multiplier)), config)

    return objective
