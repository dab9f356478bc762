from .config import RunConfig, parse_config_file
from .objective import build_objective, max_profit_objective
from .runner import (
    BacktestRun,
    ComparisonRow,
    OptimizeRun,
    compare,
    compare_profits,
    execute_optimize,
    run_backtest,
    run_optimize,
)

__all__ = [
    "BacktestRun",
    "ComparisonRow",
    "OptimizeRun",
    "RunConfig",
    "build_objective",
    "compare",
    "compare_profits",
    "execute_optimize",
    "max_profit_objective",
    "parse_config_file",
    "run_backtest",
    "run_optimize",
]
