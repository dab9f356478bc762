"""OHLCV history loading, cleaning, normalization, and train/test splitting.

CSV layout follows the Yahoo Finance daily export:
``Date,Open,High,Low,Close,Adj Close,Volume`` with ISO dates, one bar per
row, dates strictly ascending. ``Adj Close`` and ``Volume`` are optional;
backtests always use the raw ``Close`` column.
"""

from __future__ import annotations

import csv
import math
import os
import threading
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path
from typing import IO, Iterable, Literal

import numpy as np
import requests

from .errors import (
    AllRowsDropped,
    DegenerateRange,
    EmptyResponse,
    EmptySeries,
    EndpointUnconfigured,
    HttpFailure,
    MalformedRow,
    MissingColumn,
    NonMonotonicDates,
    SeriesTooShort,
)

REQUIRED_COLUMNS = ("Date", "Open", "High", "Low", "Close")
CSV_HEADER = ("Date", "Open", "High", "Low", "Close", "Adj Close", "Volume")

DATA_URL_ENV = "SUPERTREND_DATA_URL"
CACHE_DIR_ENV = "SUPERTREND_CACHE_DIR"

FillPolicy = Literal["forward_fill", "drop_row"]

# Values Yahoo exports use for absent cells.
_MISSING_TOKENS = {"", "null", "nan", "NaN", "NULL", "None"}

PRICE_FIELDS = ("open", "high", "low", "close")


@dataclass(frozen=True, slots=True)
class Bar:
    """One OHLCV observation. Price fields may be None until cleaned."""

    date: date
    open: float | None
    high: float | None
    low: float | None
    close: float | None
    adj_close: float | None = None
    volume: float | None = None

    def is_complete(self) -> bool:
        return None not in (self.open, self.high, self.low, self.close)


def validate_bar(bar: Bar) -> str | None:
    """Check the OHLC sanity rules on whichever price fields are present.

    Returns a reason string on the first violation, None when the bar is
    acceptable. Positivity applies to every present price; the band checks
    (low <= open/close <= high, low <= high) apply pairwise when both
    sides are present.
    """
    for name in PRICE_FIELDS + ("adj_close",):
        value = getattr(bar, name)
        if value is not None and (not math.isfinite(value) or value <= 0):
            return f"non-positive {name} {value}"
    if bar.volume is not None and (not math.isfinite(bar.volume) or bar.volume < 0):
        return f"negative volume {bar.volume}"
    if bar.low is not None and bar.high is not None and bar.low > bar.high:
        return f"low {bar.low} above high {bar.high}"
    for name in ("open", "close"):
        value = getattr(bar, name)
        if value is None:
            continue
        if bar.low is not None and value < bar.low:
            return f"{name} {value} below low {bar.low}"
        if bar.high is not None and value > bar.high:
            return f"{name} {value} above high {bar.high}"
    return None


@dataclass(frozen=True, slots=True)
class BarSeries:
    """Date-ascending sequence of bars for one symbol."""

    symbol: str
    bars: tuple[Bar, ...]

    def __len__(self) -> int:
        return len(self.bars)

    def dates(self) -> list[date]:
        return [b.date for b in self.bars]

    def opens(self) -> np.ndarray:
        return np.array([b.open for b in self.bars], dtype=float)

    def highs(self) -> np.ndarray:
        return np.array([b.high for b in self.bars], dtype=float)

    def lows(self) -> np.ndarray:
        return np.array([b.low for b in self.bars], dtype=float)

    def closes(self) -> np.ndarray:
        return np.array([b.close for b in self.bars], dtype=float)


@dataclass(frozen=True, slots=True)
class SplitPair:
    """Chronological train/test split; train ends strictly before test."""

    train: BarSeries
    test: BarSeries
    ratio: float


@dataclass(frozen=True, slots=True)
class NormalizationScale:
    """(min, max) retained so a normalized series can be inverted."""

    minimum: float
    maximum: float

    def apply(self, x: float) -> float:
        return (x - self.minimum) / (self.maximum - self.minimum)

    def invert(self, x: float) -> float:
        return x * (self.maximum - self.minimum) + self.minimum


def _parse_price(raw: str | None, column: str, line_number: int) -> float | None:
    if raw is None or raw.strip() in _MISSING_TOKENS:
        return None
    try:
        return float(raw)
    except ValueError:
        raise MalformedRow(line_number, f"unparseable {column} value {raw!r}") from None


def parse_csv(content: IO[str] | Iterable[str], symbol: str = "SERIES") -> BarSeries:
    """Parse a Yahoo-style CSV stream into a validated BarSeries.

    Rows with unparseable dates or numbers, non-positive prices, or OHLC
    ordering violations raise MalformedRow with the 1-based line number.
    Missing price cells are kept as None for clean() to resolve.
    """
    reader = csv.DictReader(content)
    if reader.fieldnames is None:
        raise EmptySeries("no header row")
    for column in REQUIRED_COLUMNS:
        if column not in reader.fieldnames:
            raise MissingColumn(column)

    bars: list[Bar] = []
    for row in reader:
        line_number = reader.line_num
        raw_date = (row.get("Date") or "").strip()
        try:
            bar_date = date.fromisoformat(raw_date)
        except ValueError:
            raise MalformedRow(line_number, f"unparseable date {raw_date!r}") from None
        bar = Bar(
            date=bar_date,
            open=_parse_price(row.get("Open"), "Open", line_number),
            high=_parse_price(row.get("High"), "High", line_number),
            low=_parse_price(row.get("Low"), "Low", line_number),
            close=_parse_price(row.get("Close"), "Close", line_number),
            adj_close=_parse_price(row.get("Adj Close"), "Adj Close", line_number),
            volume=_parse_price(row.get("Volume"), "Volume", line_number),
        )
        reason = validate_bar(bar)
        if reason is not None:
            raise MalformedRow(line_number, reason)
        if bars and bar.date <= bars[-1].date:
            raise NonMonotonicDates(line_number, f"{bar.date} follows {bars[-1].date}")
        bars.append(bar)

    if not bars:
        raise EmptySeries("CSV contained a header but no data rows")
    return BarSeries(symbol=symbol, bars=tuple(bars))


def load_csv(path: str | Path, symbol: str | None = None) -> BarSeries:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        return parse_csv(handle, symbol=symbol or path.stem)


def _format_cell(value: float | None) -> str:
    return "" if value is None else repr(value)


def serialize_csv(series: BarSeries, stream: IO[str]) -> None:
    """Write a BarSeries in the exact layout parse_csv reads back."""
    writer = csv.writer(stream)
    writer.writerow(CSV_HEADER)
    for bar in series.bars:
        writer.writerow(
            [
                bar.date.isoformat(),
                _format_cell(bar.open),
                _format_cell(bar.high),
                _format_cell(bar.low),
                _format_cell(bar.close),
                _format_cell(bar.adj_close),
                _format_cell(bar.volume),
            ]
        )


def save_csv(series: BarSeries, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        serialize_csv(series, handle)


def clean(series: BarSeries, policy: FillPolicy = "forward_fill") -> BarSeries:
    """Resolve missing price fields so every remaining bar is complete.

    forward_fill copies each missing open/high/low/close from the previous
    (already filled) bar; leading bars that cannot be filled are dropped,
    as is any bar whose filled values no longer satisfy the OHLC rules.
    drop_row removes every bar with a missing price field. Optional fields
    (adj_close, volume) are left untouched. Idempotent under both policies.
    """
    if policy not in ("forward_fill", "drop_row"):
        raise ValueError(f"unknown fill policy {policy!r}")
    if not series.bars:
        raise EmptySeries("cannot clean an empty series")

    kept: list[Bar] = []
    for bar in series.bars:
        if bar.is_complete():
            kept.append(bar)
            continue
        if policy == "drop_row":
            continue
        if not kept:
            continue  # leading gap, nothing to fill from
        prev = kept[-1]
        filled = replace(
            bar,
            **{
                name: getattr(prev, name)
                for name in PRICE_FIELDS
                if getattr(bar, name) is None
            },
        )
        if validate_bar(filled) is None:
            kept.append(filled)
        # else: the fill would fabricate an inconsistent bar; drop it

    if not kept:
        raise AllRowsDropped(f"no usable bars remain after clean({policy})")
    return BarSeries(symbol=series.symbol, bars=tuple(kept))


def normalize_minmax(series: BarSeries) -> tuple[BarSeries, NormalizationScale]:
    """Map every price field through (x - min)/(max - min).

    The min/max are global over all price fields (open, high, low, close,
    adj_close where present). Off by default everywhere in the pipeline;
    the global minimum maps to 0.0, so normalized output relaxes the
    strict-positivity rule. Volume is a count and is not touched.
    """
    if len(series) < 2:
        raise SeriesTooShort("normalization needs at least 2 bars")
    values = [
        v
        for bar in series.bars
        for v in (bar.open, bar.high, bar.low, bar.close, bar.adj_close)
        if v is not None
    ]
    lo, hi = min(values), max(values)
    if hi <= lo:
        raise DegenerateRange(f"constant series (min == max == {lo})")
    scale = NormalizationScale(minimum=lo, maximum=hi)

    def conv(v: float | None) -> float | None:
        return None if v is None else scale.apply(v)

    bars = tuple(
        replace(
            bar,
            open=conv(bar.open),
            high=conv(bar.high),
            low=conv(bar.low),
            close=conv(bar.close),
            adj_close=conv(bar.adj_close),
        )
        for bar in series.bars
    )
    return BarSeries(symbol=series.symbol, bars=bars), scale


def denormalize(series: BarSeries, scale: NormalizationScale) -> BarSeries:
    def conv(v: float | None) -> float | None:
        return None if v is None else scale.invert(v)

    bars = tuple(
        replace(
            bar,
            open=conv(bar.open),
            high=conv(bar.high),
            low=conv(bar.low),
            close=conv(bar.close),
            adj_close=conv(bar.adj_close),
        )
        for bar in series.bars
    )
    return BarSeries(symbol=series.symbol, bars=bars)


def split_train_test(series: BarSeries, ratio: float = 0.8) -> SplitPair:
    """Chronological prefix/suffix split with |train| = round(ratio * total)."""
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must be in (0, 1), got {ratio}")
    total = len(series)
    if total < 10:
        raise SeriesTooShort(f"need at least 10 bars to split, got {total}")
    n_train = round(ratio * total)
    if n_train < 1 or n_train >= total:
        raise SeriesTooShort(f"ratio {ratio} leaves an empty side for {total} bars")
    return SplitPair(
        train=BarSeries(symbol=series.symbol, bars=series.bars[:n_train]),
        test=BarSeries(symbol=series.symbol, bars=series.bars[n_train:]),
        ratio=ratio,
    )


# One lock per cache file so concurrent fetches of the same symbol serialize.
_cache_locks: dict[Path, threading.Lock] = {}
_cache_locks_guard = threading.Lock()


def _lock_for(path: Path) -> threading.Lock:
    with _cache_locks_guard:
        return _cache_locks.setdefault(path, threading.Lock())


def _safe_symbol(symbol: str) -> str:
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in symbol)


def cache_path(symbol: str, interval: str, cache_dir: str | Path | None = None) -> Path:
    base = cache_dir or os.environ.get(CACHE_DIR_ENV) or Path.home() / ".cache" / "supertrend_bo"
    return Path(base) / f"{_safe_symbol(symbol)}_{interval}.csv"


def fetch_history(
    symbol: str,
    start: date,
    end: date,
    interval: str = "daily",
    *,
    base_url: str | None = None,
    cache_dir: str | Path | None = None,
    timeout: float = 30.0,
) -> BarSeries:
    """Fetch OHLCV history over HTTP, caching the CSV for offline replay.

    The endpoint comes from ``base_url`` or the SUPERTREND_DATA_URL
    environment variable and is queried with symbol/start/end/interval
    parameters; the response must be a CSV in the layout parse_csv reads.
    A cache hit (same symbol and interval) short-circuits the network.
    """
    if interval not in ("daily", "weekly", "monthly"):
        raise ValueError(f"interval must be daily/weekly/monthly, got {interval!r}")
    if start >= end:
        raise ValueError(f"start {start} must precede end {end}")

    target = cache_path(symbol, interval, cache_dir)
    with _lock_for(target):
        if target.exists():
            return load_csv(target, symbol=symbol)

        url = base_url or os.environ.get(DATA_URL_ENV)
        if not url:
            raise EndpointUnconfigured(
                f"no fetch endpoint: pass base_url or set {DATA_URL_ENV}"
            )
        response = requests.get(
            url,
            params={
                "symbol": symbol,
                "start": start.isoformat(),
                "end": end.isoformat(),
                "interval": interval,
            },
            timeout=timeout,
        )
        if response.status_code != 200:
            raise HttpFailure(response.status_code, response.text[:200])
        text = response.text
        if not text.strip():
            raise EmptyResponse(f"empty body from {url} for {symbol}")
        series = parse_csv(iter(text.splitlines(True)), symbol=symbol)

        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_suffix(".tmp")
        with tmp.open("w", newline="", encoding="utf-8") as handle:
            serialize_csv(series, handle)
        os.replace(tmp, target)
    return series
