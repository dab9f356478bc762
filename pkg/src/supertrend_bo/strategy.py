"""Turn a Supertrend direction series into positions and signal events.

Signals fire on direction flips: down->up buys, up->down sells. Execution
is at the close of the flip bar, no fees or slippage. long_flat (default)
holds cash between a sell and the next buy; long_short holds a short
position there instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from typing import IO, Literal, Sequence

import numpy as np

from .errors import EmptyAfterWarmup
from .indicator import DOWN, UP, SupertrendSeries

FLAT = 0
LONG = 1
SHORT = -1

PositionMode = Literal["long_flat", "long_short"]


@dataclass(frozen=True, slots=True)
class Signal:
    bar_index: int
    kind: Literal["buy", "sell"]
    price: float


@dataclass(frozen=True, slots=True)
class PositionSeries:
    """Per-bar position held after that bar's close, plus the signals
    that changed it."""

    position: np.ndarray  # int8: FLAT, LONG, SHORT
    signals: tuple[Signal, ...]
    mode: PositionMode

    def __len__(self) -> int:
        return len(self.position)


def generate_signals(
    st: SupertrendSeries,
    closes: Sequence[float] | np.ndarray,
    mode: PositionMode = "long_flat",
) -> PositionSeries:
    """Replay the direction series into a position series.

    A position open at the last bar stays open here; the backtest closes
    it at the final close when it books trades.
    """
    if mode not in ("long_flat", "long_short"):
        raise ValueError(f"unknown position mode {mode!r}")
    closes = np.asarray(closes, dtype=float)
    n = len(closes)
    if n != len(st):
        raise ValueError(f"closes ({n}) and indicator ({len(st)}) lengths differ")
    start = st.first_signal_index
    if n <= start:
        raise EmptyAfterWarmup(f"no bars beyond warmup index {start}")

    position = np.zeros(n, dtype=np.int8)
    signals: list[Signal] = []
    pos = FLAT
    for i in range(start + 1, n):
        if st.direction[i - 1] == DOWN and st.direction[i] == UP:
            if pos != LONG:
                signals.append(Signal(bar_index=i, kind="buy", price=float(closes[i])))
                pos = LONG
        elif st.direction[i - 1] == UP and st.direction[i] == DOWN:
            if pos == LONG or mode == "long_short":
                signals.append(Signal(bar_index=i, kind="sell", price=float(closes[i])))
                pos = SHORT if mode == "long_short" else FLAT
        position[i] = pos

    return PositionSeries(position=position, signals=tuple(signals), mode=mode)


def replay_positions(signals: Sequence[Signal], n: int, mode: PositionMode) -> np.ndarray:
    """Rebuild the per-bar position array from the signal list alone."""
    position = np.zeros(n, dtype=np.int8)
    pos = FLAT
    by_bar = {s.bar_index: s for s in signals}
    for i in range(n):
        s = by_bar.get(i)
        if s is not None:
            pos = LONG if s.kind == "buy" else (SHORT if mode == "long_short" else FLAT)
        position[i] = pos
    return position


def write_signals_csv(dates: Sequence[date], positions: PositionSeries, stream: IO[str]) -> None:
    writer = csv.writer(stream)
    writer.writerow(["date", "kind", "price"])
    for s in positions.signals:
        writer.writerow([dates[s.bar_index].isoformat(), s.kind, repr(s.price)])
