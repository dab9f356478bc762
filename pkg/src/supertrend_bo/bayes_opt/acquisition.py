"""Acquisition functions scoring candidate points for a maximization run."""

from __future__ import annotations

import numpy as np
from scipy.stats import norm

DEFAULT_KAPPA = 2.0


def expected_improvement(mean, std, best):
    """E[max(f - best, 0)] under f ~ N(mean, std^2).

    With z = (mean - best)/std this is (mean - best) Phi(z) + std phi(z);
    at std = 0 it degenerates to max(mean - best, 0). Always >= 0.
    Accepts scalars or aligned arrays.
    """
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    if np.any(std < 0):
        raise ValueError("std must be nonnegative")
    improvement = mean - best
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std > 0, improvement / np.where(std > 0, std, 1.0), 0.0)
    ei = np.where(
        std > 0,
        improvement * norm.cdf(z) + std * norm.pdf(z),
        np.maximum(improvement, 0.0),
    )
    ei = np.maximum(ei, 0.0)  # clamp the tiny negatives float cancellation leaves
    return float(ei) if ei.ndim == 0 else ei


def ucb(mean, std, kappa: float = DEFAULT_KAPPA):
    """Optimism bonus: mean + kappa * std."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if np.any(std < 0):
        raise ValueError("std must be nonnegative")
    out = mean + kappa * std
    return float(out) if out.ndim == 0 else out
