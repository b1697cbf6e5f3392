"""combsearch: auditable experiment-loop harness plus forecast-combination
methods evaluated by rolling-origin backtests."""

__version__ = "0.1.0"

from .combine import (
    Forecast,
    ForecastMethod,
    create_method,
    expost_pelasso,
    method_names,
    pelasso_two_step,
    registry,
    weighted_quantile,
)
from .dmtest import DMResult, default_basis_count, dm_test_ewc
from .errors import (
    BudgetError,
    CombsearchError,
    ConvergenceError,
    EvaluationError,
    HarnessError,
    ImputationError,
    InitError,
    IsolationError,
    LockViolationError,
    LogCorruptionError,
    PanelFormatError,
    PanelParseError,
    SchemeError,
    SolverError,
    TagCollisionError,
    ValidationError,
)
from .evaluate import (
    COVID_QUARTERS,
    EvalConfig,
    OriginRecord,
    default_masks,
    rmse_of,
    rolling_evaluate,
    score_subsets,
)
from .panel import (
    Info,
    Panel,
    build_info,
    impute_panel,
    load_panel,
    mark_split,
    quarter_range,
    save_panel,
    split_panel,
    synthetic_panel,
)
from .report import Report, format_eval_block, make_report, parse_eval_block
from .shrinkage import (
    BACKEND,
    Forward,
    KFold,
    LOO,
    PenalizedSpec,
    cv_curve,
    fit_path,
    fit_penalized,
    make_lambda_grid,
    penalized_cv_curve,
    pick_lambda,
)

__all__ = [
    "BACKEND", "COVID_QUARTERS", "BudgetError", "CombsearchError",
    "ConvergenceError", "DMResult", "EvalConfig", "EvaluationError",
    "Forecast", "ForecastMethod", "Forward", "HarnessError",
    "ImputationError", "Info", "InitError", "IsolationError", "KFold", "LOO",
    "LockViolationError", "LogCorruptionError", "OriginRecord", "Panel",
    "PanelFormatError", "PanelParseError", "PenalizedSpec", "Report",
    "SchemeError", "SolverError", "TagCollisionError", "ValidationError",
    "build_info", "create_method", "cv_curve", "default_basis_count",
    "default_masks", "dm_test_ewc", "expost_pelasso", "fit_path",
    "fit_penalized", "format_eval_block", "impute_panel", "load_panel",
    "make_lambda_grid", "make_report", "mark_split", "method_names",
    "parse_eval_block", "pelasso_two_step", "penalized_cv_curve",
    "pick_lambda", "quarter_range", "registry", "rmse_of",
    "rolling_evaluate", "save_panel", "score_subsets", "split_panel",
    "synthetic_panel", "weighted_quantile", "__version__",
]
