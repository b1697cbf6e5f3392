"""Exception hierarchy shared across the package."""


class CombsearchError(Exception):
    """Base class for all package errors."""


class ValidationError(CombsearchError):
    """Invalid argument, shape, or configuration."""


class PanelParseError(ValidationError):
    """Malformed CSV cell or row; carries the 1-based file location."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class PanelFormatError(ValidationError):
    """CSV does not match the declared panel format."""


class ImputationError(CombsearchError):
    """Missing values cannot be filled under the imputation contract."""


class SolverError(CombsearchError):
    """Penalized regression solve failed."""


class ConvergenceError(SolverError):
    """Coordinate descent hit the sweep budget; carries the count."""

    def __init__(self, message, sweeps):
        super().__init__(f"{message} (after {sweeps} sweeps)")
        self.sweeps = sweeps


class SchemeError(ValidationError):
    """Cross-validation scheme infeasible for the given sample."""


class EvaluationError(CombsearchError):
    """A method raised during rolling evaluation; carries the origin."""

    def __init__(self, message, origin=None):
        if origin is not None:
            message = f"{message} (origin t={origin})"
        super().__init__(message)
        self.origin = origin


class HarnessError(CombsearchError):
    """Audit-loop harness failure."""


class TagCollisionError(HarnessError):
    """Workspace already holds a run."""


class LockViolationError(HarnessError):
    """Contract or evaluator file changed after initialization."""


class IsolationError(HarnessError):
    """Holdout material detected inside an agent workspace."""


class LogCorruptionError(HarnessError):
    """results.tsv or the snapshot journal cannot be parsed; names the line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class BudgetError(HarnessError):
    """Hard experiment cap reached."""


class InitError(HarnessError):
    """Run initialization failed (e.g. the baseline candidate did not score)."""
