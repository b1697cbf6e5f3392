"""Auditable propose/evaluate/keep harness with crash recovery."""

from .loop import (
    CANDIDATE_NAME,
    CONTRACT_NAME,
    DEFAULT_EVALUATOR_TEXT,
    EVALUATOR_NAME,
    FAULT_STAGES,
    LOG_NAME,
    META_NAME,
    EvalOutcome,
    LoopResult,
    RecoveryReport,
    RunState,
    init_run,
    load_run,
    recover_session,
    run_loop,
    scan_isolation,
    step,
    verify_locks,
    verify_run,
)
from .runlog import (
    HEADER,
    STATUSES,
    LogEntry,
    append_log,
    best_entry,
    budget_used,
    decision_score,
    format_score,
    read_log,
    replay_decisions,
    write_log,
)
from .searchers import ExternalSearcher, ScriptedSearcher, SearchContext
from .snapshots import (
    JournalEntry,
    SnapshotStore,
    content_id,
    sanitize_text,
    write_atomic,
)

__all__ = [
    "CANDIDATE_NAME", "CONTRACT_NAME", "DEFAULT_EVALUATOR_TEXT",
    "EVALUATOR_NAME", "FAULT_STAGES", "HEADER", "LOG_NAME", "META_NAME",
    "STATUSES",
    "EvalOutcome", "ExternalSearcher", "JournalEntry", "LogEntry",
    "LoopResult", "RecoveryReport", "RunState", "ScriptedSearcher",
    "SearchContext", "SnapshotStore",
    "append_log", "best_entry", "budget_used", "content_id",
    "decision_score", "format_score", "init_run", "load_run", "read_log",
    "recover_session", "replay_decisions", "run_loop", "sanitize_text",
    "scan_isolation", "step", "verify_locks", "verify_run", "write_atomic",
    "write_log",
]
