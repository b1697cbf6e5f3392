"""Penalized regression core: deterministic solver, CV curves, lambda rules."""

from .backend import BACKEND
from .cv import (
    CVCurve,
    Forward,
    KFold,
    LOO,
    cv_curve,
    penalized_cv_curve,
    pick_lambda,
    pick_lambda_index,
    regression_predictor,
)
from .solver import (
    FitResult,
    PathResult,
    PenalizedSpec,
    fit_path,
    fit_penalized,
    kkt_residual,
    make_lambda_grid,
    objective,
)

__all__ = [
    "BACKEND", "CVCurve", "FitResult", "Forward", "KFold", "LOO",
    "PathResult", "PenalizedSpec", "cv_curve", "fit_path", "fit_penalized",
    "kkt_residual", "make_lambda_grid", "objective", "pick_lambda",
    "pick_lambda_index", "penalized_cv_curve", "regression_predictor",
]
