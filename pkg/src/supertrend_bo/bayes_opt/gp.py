"""Gaussian-process surrogate on a Matern-5/2 kernel with ARD length scales.

Inputs are scaled onto the unit cube with the search-space bounds and
targets standardized to mean 0 / variance 1 before fitting; predictions
are mapped back to original units. Hyperparameters (two length scales,
signal variance, noise variance) maximize the log marginal likelihood
via L-BFGS-B from 8 deterministic restarts, with analytic gradients
(GPML ch. 5). A jitter of 1e-6 is always added to the kernel diagonal,
escalated to 1e-4 before giving up with SingularKernel.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from ..errors import SingularKernel
from .space import SearchSpace

logger = logging.getLogger(__name__)

SQRT5 = np.sqrt(5.0)

JITTER = 1e-6
JITTER_ESCALATED = 1e-4
N_RESTARTS = 8

# log-space bounds for (length_scale_0, length_scale_1, signal_var, noise_var)
# on unit-cube inputs and unit-variance targets
_LOG_BOUNDS = np.log(
    np.array([[0.02, 10.0], [0.02, 10.0], [0.01, 100.0], [1e-8, 1.0]])
)
_DEFAULT_THETA = np.log(np.array([0.3, 0.3, 1.0, 1e-4]))

FALLBACK_LENGTH_SCALE = 0.3
FALLBACK_SIGNAL_VAR = 1.0
FALLBACK_NOISE_VAR = 1e-6


@dataclass(frozen=True, slots=True)
class GPHyperparams:
    length_scales: tuple[float, float]
    signal_var: float
    noise_var: float

    def as_theta(self) -> np.ndarray:
        return np.log(np.array([*self.length_scales, self.signal_var, self.noise_var]))


@dataclass(frozen=True, slots=True)
class GPModel:
    space: SearchSpace
    x_unit: np.ndarray  # (n, 2) unit-cube training inputs
    y_raw: np.ndarray  # (n,) original-unit targets
    y_mean: float
    y_std: float
    hypers: GPHyperparams
    chol_lower: np.ndarray  # L with L L^T = K + (noise + jitter) I
    alpha: np.ndarray  # (K + (noise+jitter) I)^{-1} y_standardized
    jitter: float

    @property
    def y_standardized(self) -> np.ndarray:
        return (self.y_raw - self.y_mean) / self.y_std

    @property
    def best_target(self) -> float:
        return float(self.y_raw.max())

    @property
    def signal_variance(self) -> float:
        """Prior signal variance in original target units."""
        return self.hypers.signal_var * self.y_std**2

    @property
    def noise_variance(self) -> float:
        return self.hypers.noise_var * self.y_std**2


def matern52(
    a: np.ndarray, b: np.ndarray, length_scales: np.ndarray, signal_var: float
) -> np.ndarray:
    """k(a_i, b_j) = s2 (1 + sqrt5 r + 5 r^2/3) exp(-sqrt5 r), r the
    length-scale-weighted distance."""
    d = (a[:, None, :] - b[None, :, :]) / length_scales
    r = np.sqrt((d * d).sum(axis=-1))
    return signal_var * (1.0 + SQRT5 * r + (5.0 / 3.0) * r * r) * np.exp(-SQRT5 * r)


def _kernel_with_grads(
    sq_diff: np.ndarray, theta: np.ndarray
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Kernel matrix on training inputs plus dK/dtheta_j for each
    log-hyperparameter (two length scales, signal var, noise var).
    sq_diff holds the raw per-axis squared differences, shape (n, n, 2)."""
    ell2 = np.exp(2.0 * theta[:2])
    signal_var = np.exp(theta[2])
    noise_var = np.exp(theta[3])

    d2 = sq_diff / ell2  # per-axis squared scaled distances
    r = np.sqrt(d2.sum(axis=-1))
    decay = np.exp(-SQRT5 * r)
    k_signal = signal_var * (1.0 + SQRT5 * r + (5.0 / 3.0) * r * r) * decay

    # d k / d log ell_a = s2 (5/3)(1 + sqrt5 r) exp(-sqrt5 r) d2_a
    common = signal_var * (5.0 / 3.0) * (1.0 + SQRT5 * r) * decay
    eye = np.eye(len(r))
    grads = [
        common * d2[:, :, 0],
        common * d2[:, :, 1],
        k_signal,
        noise_var * eye,
    ]
    k = k_signal + noise_var * eye
    return k, grads


def _log_marginal_likelihood_and_grad(
    sq_diff: np.ndarray, y: np.ndarray, theta: np.ndarray, jitter: float
) -> tuple[float, np.ndarray]:
    n = len(y)
    k, grads = _kernel_with_grads(sq_diff, theta)
    k[np.diag_indices_from(k)] += jitter
    try:
        lower = cholesky(k, lower=True)
    except LinAlgError:
        return -np.inf, np.zeros_like(theta)
    alpha = cho_solve((lower, True), y)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.log(np.diag(lower)).sum())
        - 0.5 * n * np.log(2.0 * np.pi)
    )
    # d lml / d theta_j = 0.5 tr((alpha alpha^T - K^{-1}) dK/dtheta_j)
    k_inv = cho_solve((lower, True), np.eye(n))
    inner = np.outer(alpha, alpha) - k_inv
    grad = np.array([0.5 * float((inner * g.T).sum()) for g in grads])
    return lml, grad


def _optimize_hypers(x: np.ndarray, y: np.ndarray, jitter: float, seed: int) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    sq_diff = diff * diff  # fixed across theta evaluations

    def objective(theta: np.ndarray) -> tuple[float, np.ndarray]:
        lml, grad = _log_marginal_likelihood_and_grad(sq_diff, y, theta, jitter)
        return -lml, -grad

    rng = np.random.default_rng(seed)
    starts = [_DEFAULT_THETA]
    for _ in range(N_RESTARTS - 1):
        starts.append(rng.uniform(_LOG_BOUNDS[:, 0], _LOG_BOUNDS[:, 1]))

    best_theta, best_neg = None, np.inf
    for start in starts:
        result = minimize(
            objective,
            start,
            jac=True,
            method="L-BFGS-B",
            bounds=_LOG_BOUNDS,
            options={"maxiter": 60},
        )
        if np.isfinite(result.fun) and result.fun < best_neg:
            best_theta, best_neg = result.x, result.fun
    if best_theta is None:
        logger.warning("hyperparameter search failed on all restarts; using fixed fallback")
        return GPHyperparams(
            (FALLBACK_LENGTH_SCALE, FALLBACK_LENGTH_SCALE),
            FALLBACK_SIGNAL_VAR,
            FALLBACK_NOISE_VAR,
        ).as_theta()
    return best_theta


def gp_fit(
    x: np.ndarray,
    y: np.ndarray,
    space: SearchSpace,
    *,
    hypers: GPHyperparams | None = None,
    seed: int = 0,
) -> GPModel:
    """Fit the surrogate to raw (period, multiplier) points and targets.

    Exact duplicate rows collapse to their first occurrence. Pass `hypers`
    to pin the kernel instead of maximizing marginal likelihood.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    y = np.asarray(y, dtype=float).ravel()
    if len(x) != len(y):
        raise ValueError(f"got {len(x)} inputs but {len(y)} targets")
    if len(x) < 2:
        raise ValueError(f"need at least 2 observations to fit, got {len(x)}")

    _, first_index = np.unique(x, axis=0, return_index=True)
    keep = np.sort(first_index)
    x, y = x[keep], y[keep]

    x_unit = space.to_unit(x)
    y_mean = float(y.mean())
    y_spread = float(y.std())
    y_std = y_spread if y_spread > 0 else 1.0
    y_scaled = (y - y_mean) / y_std

    if hypers is None:
        theta = _optimize_hypers(x_unit, y_scaled, JITTER, seed)
        ell0, ell1, signal_var, noise_var = np.exp(theta)
        hypers = GPHyperparams((float(ell0), float(ell1)), float(signal_var), float(noise_var))

    k = matern52(x_unit, x_unit, np.asarray(hypers.length_scales), hypers.signal_var)
    k[np.diag_indices_from(k)] += hypers.noise_var

    lower = None
    jitter_used = JITTER
    for jitter in (JITTER, JITTER_ESCALATED):
        try:
            lower = cholesky(k + jitter * np.eye(len(k)), lower=True)
            jitter_used = jitter
            break
        except LinAlgError:
            continue
    if lower is None:
        raise SingularKernel(
            f"kernel matrix not positive definite even with jitter {JITTER_ESCALATED}"
        )

    alpha = cho_solve((lower, True), y_scaled)
    return GPModel(
        space=space,
        x_unit=x_unit,
        y_raw=y,
        y_mean=y_mean,
        y_std=y_std,
        hypers=hypers,
        chol_lower=lower,
        alpha=alpha,
        jitter=jitter_used,
    )


def predict_batch(model: GPModel, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and standard deviation, original units, at raw points
    of shape (k, 2)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    q_unit = model.space.to_unit(points)
    ell = np.asarray(model.hypers.length_scales)
    k_star = matern52(q_unit, model.x_unit, ell, model.hypers.signal_var)

    mean_scaled = k_star @ model.alpha
    v = solve_triangular(model.chol_lower, k_star.T, lower=True)
    var_scaled = model.hypers.signal_var - (v * v).sum(axis=0)
    var_scaled = np.maximum(var_scaled, 0.0)

    mean = mean_scaled * model.y_std + model.y_mean
    std = np.sqrt(var_scaled) * model.y_std
    return mean, std


def gp_predict(model: GPModel, x: tuple[float, float]) -> tuple[float, float]:
    """Posterior (mean, std) at one raw (period, multiplier) point."""
    mean, std = predict_batch(model, np.asarray(x, dtype=float).reshape(1, 2))
    return float(mean[0]), float(std[0])
