from .acquisition import DEFAULT_KAPPA, expected_improvement, ucb
from .gp import GPHyperparams, GPModel, gp_fit, gp_predict, matern52, predict_batch
from .optimizer import (
    ITERATION_LOG_HEADER,
    best_summary,
    grid_search,
    initial_design,
    optimize,
    propose_next,
    random_search,
    write_history_csv,
)
from .space import EvalRecord, OptResult, SearchSpace, truncate

__all__ = [
    "DEFAULT_KAPPA",
    "EvalRecord",
    "GPHyperparams",
    "GPModel",
    "ITERATION_LOG_HEADER",
    "OptResult",
    "SearchSpace",
    "best_summary",
    "expected_improvement",
    "gp_fit",
    "gp_predict",
    "grid_search",
    "initial_design",
    "matern52",
    "optimize",
    "predict_batch",
    "propose_next",
    "random_search",
    "truncate",
    "ucb",
    "write_history_csv",
]
