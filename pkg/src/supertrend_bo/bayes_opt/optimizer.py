"""Sequential model-based optimization over the (period, multiplier) box,
plus grid-search and random-search baselines.

Raw proposals are real pairs; the objective is always called on their
truncated integer pair, and no integer pair is evaluated twice within one
run. Everything is deterministic for a given seed: the initial design
stream, the per-iteration surrogate fits, and the candidate sets.
"""

from __future__ import annotations

import csv
import logging
from typing import IO, Callable

import numpy as np
from scipy.stats import qmc

from ..errors import SpaceExhausted
from .acquisition import DEFAULT_KAPPA, expected_improvement, ucb
from .gp import GPModel, gp_fit, predict_batch
from .space import EvalRecord, OptResult, SearchSpace, best_of, truncate

logger = logging.getLogger(__name__)

Objective = Callable[[int, int], float]

N_CANDIDATES = 2048
PERTURBATIONS_PER_POINT = 8
PERTURBATION_STD = 0.75  # raw units; integer cells are unit-sized


def initial_design(space: SearchSpace, n: int, seed: int) -> list[tuple[float, float]]:
    """n uniform points in the box, drawn coordinate-by-coordinate so the
    stream extends deterministically."""
    if n < 1:
        raise ValueError(f"need at least one design point, got {n}")
    rng = np.random.default_rng(seed)
    return [_draw_point(rng, space) for _ in range(n)]


def _draw_point(rng: np.random.Generator, space: SearchSpace) -> tuple[float, float]:
    p = rng.uniform(*space.period_bounds)
    m = rng.uniform(*space.multiplier_bounds)
    return (float(p), float(m))


def _truncate_pair(point: tuple[float, float]) -> tuple[int, int]:
    return (truncate(point[0]), truncate(point[1]))


def propose_next(
    model: GPModel,
    space: SearchSpace,
    acq: str,
    evaluated: set[tuple[int, int]],
    seed: int,
    kappa: float = DEFAULT_KAPPA,
) -> tuple[float, float]:
    """Pick the acquisition-maximizing candidate whose integer pair is new.

    Candidates are 2048 scrambled-Sobol points over the box plus clipped
    Gaussian perturbations around every evaluated cell. If none of those
    lands in an unevaluated cell (only boundary cells left), the remaining
    lattice points themselves are scored as a last resort. Ties break on
    the lowest candidate index.
    """
    if acq not in ("ei", "ucb"):
        raise ValueError(f"unknown acquisition {acq!r}")
    lattice = set(space.integer_lattice())
    if lattice <= set(evaluated):
        raise SpaceExhausted(f"all {len(lattice)} integer pairs already evaluated")

    sobol = qmc.Sobol(d=2, scramble=True, seed=seed)
    candidates = [qmc.scale(sobol.random(N_CANDIDATES), space.lows, space.highs)]
    if evaluated:
        rng = np.random.default_rng(seed)
        centers = np.array(sorted(evaluated), dtype=float) + 0.5
        jitter = rng.normal(0.0, PERTURBATION_STD, size=(len(centers), PERTURBATIONS_PER_POINT, 2))
        around = space.clip((centers[:, None, :] + jitter).reshape(-1, 2))
        candidates.append(around)
    points = np.vstack(candidates)

    choice = _argmax_feasible(model, points, acq, evaluated, kappa)
    if choice is None:
        remaining = np.array(sorted(lattice - set(evaluated)), dtype=float)
        choice = _argmax_feasible(model, remaining, acq, evaluated, kappa)
    if choice is None:
        raise SpaceExhausted("no candidate truncates to an unevaluated integer pair")
    return choice


_ENCODE = 1_000_000  # collision-free pair encoding for the parameter magnitudes in play


def _argmax_feasible(
    model: GPModel,
    points: np.ndarray,
    acq: str,
    evaluated: set[tuple[int, int]],
    kappa: float,
) -> tuple[float, float] | None:
    pairs = points.astype(np.int64)  # astype truncates toward zero, same as truncate()
    encoded = pairs[:, 0] * _ENCODE + pairs[:, 1]
    taken = np.array([p * _ENCODE + m for p, m in evaluated], dtype=np.int64)
    feasible = ~np.isin(encoded, taken)
    if not feasible.any():
        return None
    mean, std = predict_batch(model, points)
    scores = (
        expected_improvement(mean, std, model.best_target)
        if acq == "ei"
        else ucb(mean, std, kappa)
    )
    scores = np.where(feasible, scores, -np.inf)
    index = int(np.argmax(scores))  # argmax keeps the lowest index on ties
    return (float(points[index, 0]), float(points[index, 1]))


def acquisition_scores(
    model: GPModel, points: np.ndarray, acq: str, kappa: float = DEFAULT_KAPPA
) -> np.ndarray:
    """Acquisition values at raw points; exposed for verification."""
    mean, std = predict_batch(model, points)
    if acq == "ei":
        return expected_improvement(mean, std, model.best_target)
    return ucb(mean, std, kappa)


def _evaluate(
    objective: Objective, point: tuple[float, float], iteration: int
) -> EvalRecord:
    pair = _truncate_pair(point)
    try:
        target = float(objective(*pair))
    except Exception as exc:
        exc.args = exc.args + (f"at params period={pair[0]} multiplier={pair[1]}",)
        raise
    return EvalRecord(iter=iteration, params_raw=point, params_int=pair, target=target)


def optimize(
    objective: Objective,
    space: SearchSpace,
    n_init: int = 5,
    n_iter: int = 50,
    acq: str = "ei",
    seed: int = 0,
    kappa: float = DEFAULT_KAPPA,
) -> OptResult:
    """Run n_init design evaluations then n_iter surrogate-guided ones.

    The design stream skips points whose integer pair was already drawn,
    so the history always holds exactly n_init + n_iter distinct cells.
    """
    if n_init < 2:
        raise ValueError(f"n_init must be at least 2, got {n_init}")
    if n_iter < 0:
        raise ValueError(f"n_iter must be nonnegative, got {n_iter}")
    lattice_size = len(space.integer_lattice())
    if n_init + n_iter > lattice_size:
        raise SpaceExhausted(
            f"budget {n_init}+{n_iter} exceeds the {lattice_size} integer pairs in the box"
        )

    history: list[EvalRecord] = []
    evaluated: set[tuple[int, int]] = set()

    design_rng = np.random.default_rng(seed)
    while len(history) < n_init:
        point = _draw_point(design_rng, space)
        if _truncate_pair(point) in evaluated:
            continue
        record = _evaluate(objective, point, len(history) + 1)
        history.append(record)
        evaluated.add(record.params_int)

    fit_seeds = np.random.SeedSequence([seed, 1]).generate_state(max(n_iter, 1))
    prop_seeds = np.random.SeedSequence([seed, 2]).generate_state(max(n_iter, 1))
    for step in range(n_iter):
        x = np.array([r.params_raw for r in history])
        y = np.array([r.target for r in history])
        model = gp_fit(x, y, space, seed=int(fit_seeds[step]))
        point = propose_next(model, space, acq, evaluated, int(prop_seeds[step]), kappa)
        record = _evaluate(objective, point, len(history) + 1)
        history.append(record)
        evaluated.add(record.params_int)

    best_params, best_target = best_of(history)
    return OptResult(
        history=tuple(history), best_params=best_params, best_target=best_target, seed=seed
    )


def grid_search(
    objective: Objective, space: SearchSpace, step: int | tuple[int, int] = 1
) -> OptResult:
    """Exhaustive sweep of the strided integer lattice (period-major order)."""
    period_step, mult_step = (step, step) if isinstance(step, int) else step
    if period_step < 1 or mult_step < 1:
        raise ValueError(f"strides must be >= 1, got {step}")
    history = []
    for i, pair in enumerate(space.integer_lattice(period_step, mult_step), start=1):
        history.append(_evaluate(objective, (float(pair[0]), float(pair[1])), i))
    best_params, best_target = best_of(history)
    return OptResult(
        history=tuple(history), best_params=best_params, best_target=best_target, seed=0
    )


def random_search(objective: Objective, space: SearchSpace, n: int, seed: int = 0) -> OptResult:
    """n uniform draws, truncated; repeated integer pairs reuse the cached
    value instead of re-running the objective."""
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    rng = np.random.default_rng(seed)
    cache: dict[tuple[int, int], float] = {}
    history = []
    for i in range(1, n + 1):
        point = _draw_point(rng, space)
        pair = _truncate_pair(point)
        if pair not in cache:
            cache[pair] = _evaluate(objective, point, i).target
        history.append(EvalRecord(iter=i, params_raw=point, params_int=pair, target=cache[pair]))
    best_params, best_target = best_of(history)
    return OptResult(
        history=tuple(history), best_params=best_params, best_target=best_target, seed=seed
    )


ITERATION_LOG_HEADER = ("iter", "target", "atr_multiplier", "atr_period")


def write_history_csv(result: OptResult, stream: IO[str]) -> None:
    """Iteration log, one row per evaluation, raw coordinates at full
    precision, columns ordered multiplier before period."""
    writer = csv.writer(stream)
    writer.writerow(ITERATION_LOG_HEADER)
    for r in result.history:
        writer.writerow([r.iter, repr(r.target), repr(r.params_raw[1]), repr(r.params_raw[0])])


def best_summary(result: OptResult) -> dict[str, float | int]:
    return {
        "atr_period": result.best_params[0],
        "atr_multiplier": result.best_params[1],
        "max_profit": result.best_target,
        "seed": result.seed,
    }
