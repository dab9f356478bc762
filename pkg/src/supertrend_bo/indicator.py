"""True range, Wilder ATR, and the Supertrend band/line/direction series.

Warmup convention: ATR (and the basic/final bands derived from it) start
at index period-1, where the seed is the simple average of the first
`period` true ranges. Direction and line start one bar later, at index
`period`, so a strategy never acts before that bar. Undefined float slots
hold NaN; undefined direction slots hold 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from typing import IO, Sequence

import numpy as np

from .errors import SeriesTooShort
from .market_data import BarSeries

UP = 1
DOWN = -1


@dataclass(frozen=True, slots=True)
class IndicatorParams:
    """ATR lookback (bars) and band width multiplier, both integers."""

    atr_period: int
    atr_multiplier: int

    def __post_init__(self):
        if not isinstance(self.atr_period, int) or self.atr_period < 2:
            raise ValueError(f"atr_period must be an integer >= 2, got {self.atr_period!r}")
        if not isinstance(self.atr_multiplier, int) or self.atr_multiplier < 1:
            raise ValueError(
                f"atr_multiplier must be an integer >= 1, got {self.atr_multiplier!r}"
            )


@dataclass(frozen=True, slots=True)
class SupertrendSeries:
    """Per-bar indicator state; line rides final_lower in an uptrend,
    final_upper in a downtrend."""

    params: IndicatorParams
    tr: np.ndarray
    atr: np.ndarray
    basic_upper: np.ndarray
    basic_lower: np.ndarray
    final_upper: np.ndarray
    final_lower: np.ndarray
    line: np.ndarray
    direction: np.ndarray  # int8: UP, DOWN, or 0 while undefined

    def __len__(self) -> int:
        return len(self.tr)

    @property
    def first_signal_index(self) -> int:
        """First bar with a defined direction."""
        return self.params.atr_period


def true_range(prev_close: float | None, high: float, low: float) -> float:
    """Bar volatility: high-low on the first bar, otherwise the largest of
    high-low, |high-prev_close|, |low-prev_close|."""
    if prev_close is None:
        return high - low
    return max(high - low, abs(high - prev_close), abs(low - prev_close))


def _true_ranges(highs: np.ndarray, lows: np.ndarray, closes: np.ndarray) -> np.ndarray:
    tr = highs - lows
    if len(closes) > 1:
        prev = closes[:-1]
        tr[1:] = np.maximum(tr[1:], np.maximum(np.abs(highs[1:] - prev), np.abs(lows[1:] - prev)))
    return tr


def atr(series: BarSeries, period: int) -> np.ndarray:
    """Wilder-smoothed ATR; NaN before index period-1.

    Seed at period-1 is the mean of the first `period` true ranges, then
    atr_t = (atr_{t-1} * (period-1) + tr_t) / period.
    """
    if period < 2:
        raise ValueError(f"period must be >= 2, got {period}")
    n = len(series)
    if n < period:
        raise SeriesTooShort(f"ATR period {period} needs at least {period} bars, got {n}")
    tr = _true_ranges(series.highs(), series.lows(), series.closes())
    return _wilder_atr(tr, period)


def _wilder_atr(tr: np.ndarray, period: int) -> np.ndarray:
    out = np.full(len(tr), np.nan)
    out[period - 1] = tr[:period].mean()
    for i in range(period, len(tr)):
        out[i] = (out[i - 1] * (period - 1) + tr[i]) / period
    return out


def supertrend(series: BarSeries, params: IndicatorParams) -> SupertrendSeries:
    """Compute the full Supertrend state for one parameter pair.

    Basic bands are hl2 +/- multiplier*atr. Final bands carry forward:
    the upper only ratchets down while closes stay below it, the lower
    only ratchets up while closes stay above it; a close beyond a band
    resets it. Direction flips up when close breaks the previous final
    upper, down when it breaks the previous final lower; the first
    direction (at index atr_period) is down iff close <= basic_upper.
    """
    period, mult = params.atr_period, params.atr_multiplier
    n = len(series)
    if n <= period:
        raise SeriesTooShort(
            f"supertrend with period {period} needs more than {period} bars, got {n}"
        )

    highs, lows, closes = series.highs(), series.lows(), series.closes()
    tr = _true_ranges(highs, lows, closes)
    atr_values = _wilder_atr(tr, period)

    hl2 = (highs + lows) / 2.0
    basic_upper = hl2 + mult * atr_values
    basic_lower = hl2 - mult * atr_values

    final_upper = np.full(n, np.nan)
    final_lower = np.full(n, np.nan)
    line = np.full(n, np.nan)
    direction = np.zeros(n, dtype=np.int8)

    start = period - 1
    final_upper[start] = basic_upper[start]
    final_lower[start] = basic_lower[start]

    for i in range(period, n):
        if basic_upper[i] < final_upper[i - 1] or closes[i - 1] > final_upper[i - 1]:
            final_upper[i] = basic_upper[i]
        else:
            final_upper[i] = final_upper[i - 1]
        if basic_lower[i] > final_lower[i - 1] or closes[i - 1] < final_lower[i - 1]:
            final_lower[i] = basic_lower[i]
        else:
            final_lower[i] = final_lower[i - 1]

        if i == period:
            direction[i] = DOWN if closes[i] <= basic_upper[i] else UP
        elif direction[i - 1] == DOWN and closes[i] > final_upper[i - 1]:
            direction[i] = UP
        elif direction[i - 1] == UP and closes[i] < final_lower[i - 1]:
            direction[i] = DOWN
        else:
            direction[i] = direction[i - 1]

        line[i] = final_lower[i] if direction[i] == UP else final_upper[i]

    return SupertrendSeries(
        params=params,
        tr=tr,
        atr=atr_values,
        basic_upper=basic_upper,
        basic_lower=basic_lower,
        final_upper=final_upper,
        final_lower=final_lower,
        line=line,
        direction=direction,
    )


_DIRECTION_LABELS = {UP: "up", DOWN: "down", 0: ""}


def write_debug_csv(dates: Sequence[date], st: SupertrendSeries, stream: IO[str]) -> None:
    """Dump the full per-bar state for cross-tool diffing."""
    writer = csv.writer(stream)
    writer.writerow(
        ["date", "tr", "atr", "basic_upper", "basic_lower", "final_upper", "final_lower", "line", "direction"]
    )
    for i, d in enumerate(dates):
        row = [d.isoformat()]
        for arr in (st.tr, st.atr, st.basic_upper, st.basic_lower, st.final_upper, st.final_lower, st.line):
            v = arr[i]
            row.append("" if np.isnan(v) else repr(float(v)))
        row.append(_DIRECTION_LABELS[int(st.direction[i])])
        writer.writerow(row)
