"""Equity simulation and the performance metric set.

Accounting is compounded with the full balance deployed: while long the
balance multiplies by (1 + leverage * bar_return) each bar, while short
by (1 - leverage * bar_return), and it is untouched while flat. A
position still open at the last bar is booked as closed at the final
close so every metric is a total over closed trades.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .errors import NonPositiveBalance
from .strategy import LONG, SHORT, PositionSeries

TRADING_DAYS_PER_YEAR = 252


@dataclass(frozen=True, slots=True)
class Trade:
    entry_index: int
    exit_index: int
    entry_price: float
    exit_price: float
    direction: int  # LONG or SHORT
    trade_return: float  # balance ratio over the trade, minus 1
    pnl: float  # balance change in currency units


@dataclass(frozen=True, slots=True)
class EquityCurve:
    balances: np.ndarray
    trades: tuple[Trade, ...]
    capital: float
    leverage: float

    def __len__(self) -> int:
        return len(self.balances)


@dataclass(frozen=True, slots=True)
class MetricsReport:
    overall_pl_pct: float
    overall_pl: float
    min_balance: float
    max_balance: float
    max_drawdown: float
    max_drawdown_pct: float
    total_trades: int
    max_profit: float
    profit_factor: float | None  # inf when no losers, None when no trades
    sharpe: float

    def to_rows(self) -> list[tuple[str, str]]:
        """Metric/Value rows in the report's canonical order."""
        def fmt(v: float | None) -> str:
            if v is None:
                return ""
            if math.isinf(v):
                return "inf"
            return repr(float(v))

        return [
            ("Overall P/L %", fmt(self.overall_pl_pct)),
            ("Overall P/L", fmt(self.overall_pl)),
            ("Min Balance", fmt(self.min_balance)),
            ("Max Balance", fmt(self.max_balance)),
            ("Max Drawdown", fmt(self.max_drawdown)),
            ("Max Drawdown %", fmt(self.max_drawdown_pct)),
            ("Total Trades", str(self.total_trades)),
            ("Max Profit", fmt(self.max_profit)),
            ("Profit Factor", fmt(self.profit_factor)),
            ("Sharpe", fmt(self.sharpe)),
        ]

    def to_dict(self) -> dict[str, float | int | None]:
        return {
            "Overall P/L %": self.overall_pl_pct,
            "Overall P/L": self.overall_pl,
            "Min Balance": self.min_balance,
            "Max Balance": self.max_balance,
            "Max Drawdown": self.max_drawdown,
            "Max Drawdown %": self.max_drawdown_pct,
            "Total Trades": self.total_trades,
            "Max Profit": self.max_profit,
            "Profit Factor": self.profit_factor,
            "Sharpe": self.sharpe,
        }


def simulate(
    positions: PositionSeries,
    closes: Sequence[float] | np.ndarray,
    capital: float = 100.0,
    leverage: float = 1.0,
) -> EquityCurve:
    """Run the position series over the close prices into a balance path."""
    closes = np.asarray(closes, dtype=float)
    n = len(closes)
    if n != len(positions):
        raise ValueError(f"closes ({n}) and positions ({len(positions)}) lengths differ")
    if capital <= 0:
        raise ValueError(f"capital must be positive, got {capital}")
    if leverage <= 0:
        raise ValueError(f"leverage must be positive, got {leverage}")

    pos = positions.position
    balances = np.empty(n)
    balances[0] = capital
    for i in range(1, n):
        held = pos[i - 1]
        if held == 0:
            balances[i] = balances[i - 1]
            continue
        bar_return = closes[i] / closes[i - 1] - 1.0
        factor = 1.0 + leverage * bar_return if held == LONG else 1.0 - leverage * bar_return
        balances[i] = balances[i - 1] * factor
        if balances[i] <= 0:
            raise NonPositiveBalance(
                f"balance hit {balances[i]:.6g} at bar {i} (leverage {leverage})"
            )

    trades: list[Trade] = []
    entry: tuple[int, int] | None = None  # (bar index, direction)
    for s in positions.signals:
        if entry is None:
            entry = (s.bar_index, LONG if s.kind == "buy" else SHORT)
            continue
        entry_index, direction = entry
        trades.append(_book_trade(entry_index, s.bar_index, direction, closes, balances))
        # in long_short every signal rolls straight into the opposite position
        entry = (s.bar_index, SHORT if s.kind == "sell" else LONG) if positions.mode == "long_short" else None
    if entry is not None:
        entry_index, direction = entry
        trades.append(_book_trade(entry_index, n - 1, direction, closes, balances))

    return EquityCurve(balances=balances, trades=tuple(trades), capital=capital, leverage=leverage)


def _book_trade(
    entry_index: int, exit_index: int, direction: int, closes: np.ndarray, balances: np.ndarray
) -> Trade:
    return Trade(
        entry_index=entry_index,
        exit_index=exit_index,
        entry_price=float(closes[entry_index]),
        exit_price=float(closes[exit_index]),
        direction=direction,
        trade_return=float(balances[exit_index] / balances[entry_index] - 1.0),
        pnl=float(balances[exit_index] - balances[entry_index]),
    )


def max_drawdown(balances: Sequence[float] | np.ndarray) -> tuple[float, float]:
    """Largest peak-to-later-trough decline, absolute and as % of the peak.

    Both values are <= 0; their minima may land on different bars.
    """
    balances = np.asarray(balances, dtype=float)
    if len(balances) == 0:
        raise ValueError("empty balance path")
    peaks = np.maximum.accumulate(balances)
    gaps = balances - peaks
    return float(gaps.min()), float((gaps / peaks).min() * 100.0)


def compute_metrics(curve: EquityCurve) -> MetricsReport:
    balances = curve.balances
    capital = curve.capital
    final = float(balances[-1])
    overall_pl = final - capital
    # written as pl * (100/capital) so the % equals the raw P/L exactly
    # when capital is 100, the identity the report format leans on
    overall_pl_pct = overall_pl * (100.0 / capital)
    min_balance = float(balances.min())
    max_balance = float(balances.max())
    dd, dd_pct = max_drawdown(balances)

    wins = sum(t.pnl for t in curve.trades if t.pnl > 0)
    losses = sum(-t.pnl for t in curve.trades if t.pnl < 0)
    if not curve.trades:
        profit_factor: float | None = None
    elif losses == 0:
        profit_factor = math.inf
    else:
        profit_factor = wins / losses

    returns = balances[1:] / balances[:-1] - 1.0
    if len(returns) >= 2:
        std = float(returns.std(ddof=1))
        sharpe = 0.0 if std == 0 else float(returns.mean()) / std * math.sqrt(TRADING_DAYS_PER_YEAR)
    else:
        sharpe = 0.0

    return MetricsReport(
        overall_pl_pct=overall_pl_pct,
        overall_pl=overall_pl,
        min_balance=min_balance,
        max_balance=max_balance,
        max_drawdown=dd,
        max_drawdown_pct=dd_pct,
        total_trades=len(curve.trades),
        max_profit=max_balance - capital,
        profit_factor=profit_factor,
        sharpe=sharpe,
    )


def write_metrics_csv(report: MetricsReport, stream: IO[str]) -> None:
    writer = csv.writer(stream)
    writer.writerow(["Metric", "Value"])
    writer.writerows(report.to_rows())


def read_metrics_csv(stream: IO[str]) -> dict[str, str]:
    """Read a Metric,Value file back into a name -> raw string mapping."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["Metric", "Value"]:
        raise ValueError(f"not a metrics CSV (header {header})")
    return {row[0]: row[1] for row in reader if row}
