"""Search-space box and evaluation bookkeeping for the optimizer."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def truncate(value: float) -> int:
    """Integer truncation toward zero, the raw-to-evaluated parameter map."""
    return int(value)


@dataclass(frozen=True, slots=True)
class SearchSpace:
    """Closed real box over (atr_period, atr_multiplier)."""

    period_bounds: tuple[float, float] = (5.0, 30.0)
    multiplier_bounds: tuple[float, float] = (1.0, 5.0)

    def __post_init__(self):
        for name, (lo, hi) in (
            ("period_bounds", self.period_bounds),
            ("multiplier_bounds", self.multiplier_bounds),
        ):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be a finite interval with lower < upper, got ({lo}, {hi})")

    @property
    def lows(self) -> np.ndarray:
        return np.array([self.period_bounds[0], self.multiplier_bounds[0]])

    @property
    def highs(self) -> np.ndarray:
        return np.array([self.period_bounds[1], self.multiplier_bounds[1]])

    def contains(self, point: tuple[float, float]) -> bool:
        p, m = point
        return (
            self.period_bounds[0] <= p <= self.period_bounds[1]
            and self.multiplier_bounds[0] <= m <= self.multiplier_bounds[1]
        )

    def clip(self, points: np.ndarray) -> np.ndarray:
        return np.clip(points, self.lows, self.highs)

    def to_unit(self, points: np.ndarray) -> np.ndarray:
        """Affine map of box coordinates onto the unit cube."""
        return (np.asarray(points, dtype=float) - self.lows) / (self.highs - self.lows)

    def integer_values(self, axis: int, step: int = 1) -> list[int]:
        """Integers reachable by truncating reals in the box along one axis."""
        lo, hi = (self.period_bounds, self.multiplier_bounds)[axis]
        return list(range(truncate(lo), truncate(hi) + 1, step))

    def integer_lattice(self, period_step: int = 1, multiplier_step: int = 1) -> list[tuple[int, int]]:
        return [
            (p, m)
            for p in self.integer_values(0, period_step)
            for m in self.integer_values(1, multiplier_step)
        ]


@dataclass(frozen=True, slots=True)
class EvalRecord:
    """One optimizer evaluation: raw point, the integer pair actually run,
    and the objective value."""

    iter: int  # 1-based
    params_raw: tuple[float, float]  # (period, multiplier)
    params_int: tuple[int, int]
    target: float


@dataclass(frozen=True, slots=True)
class OptResult:
    history: tuple[EvalRecord, ...]
    best_params: tuple[int, int]
    best_target: float
    seed: int = 0

    def running_best(self) -> np.ndarray:
        return np.maximum.accumulate([r.target for r in self.history])


def best_of(history: list[EvalRecord]) -> tuple[tuple[int, int], float]:
    """Earliest record attaining the maximum target (max keeps the first tie)."""
    best = max(history, key=lambda r: r.target)
    return best.params_int, best.target
