"""Crash-safe propose/evaluate/keep loop over an editable candidate.

Protocol per step: snapshot the proposal (journal row), check the contract
and evaluator locks, evaluate in a subprocess with a hard timeout, append
one results row (keep only on strict improvement), then settle the
candidate file back to the champion unless the proposal won. The snapshot
journal leads the results log by at most one row, so after a crash at any
point the run resumes byte-identically: the newest journal entry missing
from the log is re-evaluated from its stored bytes, then the candidate is
restored to the champion.

Budgets: a run with budget K refuses to *start* a session once K
evaluations are charged (the baseline is free), and refuses any evaluation
past the hard cap of 2K.
"""

from __future__ import annotations

import json
import math
import os
import shutil
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from ..errors import (
    BudgetError,
    InitError,
    IsolationError,
    LockViolationError,
    LogCorruptionError,
    TagCollisionError,
    ValidationError,
)
from ..report import parse_eval_block
from .runlog import (
    HEADER,
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
from .snapshots import SnapshotStore, content_id, sanitize_text, write_atomic

META_NAME = "run.json"
LOG_NAME = "results.tsv"
CONTRACT_NAME = "contract.md"
EVALUATOR_NAME = "evaluator.py"
CANDIDATE_NAME = "candidate.py"
SNAPSHOT_DIR = "snapshots"

DEFAULT_TIMEOUT_SECONDS = 1800.0
_KILL_GRACE_SECONDS = 5.0

#: crash boundaries exercised by fault-injection tests, in step order
FAULT_STAGES = ("proposed", "snapshot", "evaluated", "logged", "settled")

#: workspace evaluator shim delegating to the packaged reference evaluator
DEFAULT_EVALUATOR_TEXT = """\
from combsearch.harness.evaluator import main

if __name__ == "__main__":
    raise SystemExit(main())
"""


class EvalOutcome(NamedTuple):
    rmse: float | None
    status: str     # "ok" | "timeout" | "exit_N" | "no_score" | "spawn_failed"
    detail: str


class RecoveryReport(NamedTuple):
    evaluated_pending: bool
    restored_candidate: bool
    entry: LogEntry | None


@dataclass(frozen=True)
class LoopResult:
    steps: int
    sessions: int
    stop_reason: str
    best: LogEntry


@dataclass
class RunState:
    workdir: Path
    meta: dict
    store: SnapshotStore

    @property
    def log_path(self):
        return self.workdir / LOG_NAME

    @property
    def candidate_path(self):
        return self.workdir / CANDIDATE_NAME

    @property
    def meta_path(self):
        return self.workdir / META_NAME

    def entries(self):
        return read_log(self.log_path)

    def best(self):
        return best_entry(self.entries())[1]


def scan_isolation(workdir):
    """Existing run artifacts under ``workdir`` (path, reason) pairs.

    Flags the reserved file names and any .tsv whose first line is a
    results header — a results log under a different name still means a
    foreign run lives here and must not be silently entangled.
    """
    workdir = Path(workdir)
    findings = []
    if not workdir.exists():
        return findings
    for name in (META_NAME, LOG_NAME, CONTRACT_NAME, EVALUATOR_NAME,
                 CANDIDATE_NAME):
        if (workdir / name).exists():
            findings.append((workdir / name, "reserved run file"))
    snap = workdir / SNAPSHOT_DIR
    if snap.exists():
        findings.append((snap, "snapshot store"))
    for tsv in workdir.rglob("*.tsv"):
        if snap in tsv.parents or tsv.name == LOG_NAME:
            continue
        try:
            first = tsv.open(encoding="utf-8").readline().rstrip("\n")
        except OSError:
            continue
        if first == HEADER:
            findings.append((tsv, "results log under a different name"))
    return findings


def _lock_digests(workdir):
    return {name: content_id((Path(workdir) / name).read_bytes())
            for name in (CONTRACT_NAME, EVALUATOR_NAME)}


def verify_locks(state):
    """Contract and evaluator must still hash to their locked digests."""
    locks = state.meta["locks"]
    for name, want in locks.items():
        path = state.workdir / name
        if not path.exists():
            raise LockViolationError(f"locked file {name} is missing")
        got = content_id(path.read_bytes())
        if got != want:
            raise LockViolationError(
                f"locked file {name} was modified (hash {got[:12]}… != "
                f"locked {want[:12]}…)")


def load_run(workdir):
    # absolute: the evaluator runs with cwd=workdir and gets paths via env
    workdir = Path(workdir).resolve()
    meta_path = workdir / META_NAME
    if not meta_path.exists():
        raise ValidationError(f"not a run directory (no {META_NAME}): {workdir}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LogCorruptionError(f"unreadable {META_NAME}: {exc}") from exc
    store = SnapshotStore(workdir / SNAPSHOT_DIR)
    return RunState(workdir=workdir, meta=meta, store=store)


def init_run(workdir, *, tag, contract_text, evaluator_text=None,
             candidate_text, budget=3, session_size=2,
             timeout_seconds=DEFAULT_TIMEOUT_SECONDS, evaluator_cmd=None,
             baseline_description="baseline"):
    """Create a run workspace and evaluate the baseline candidate.

    Refuses directories already holding a run (tag collision) or stray run
    artifacts (isolation). On any failure every path this call created is
    removed, so a corrected retry starts clean.
    """
    workdir = Path(workdir).resolve()
    if budget < 1:
        raise ValidationError(f"budget must be >= 1, got {budget}")
    if session_size < 1:
        raise ValidationError(f"session_size must be >= 1, got {session_size}")
    if (workdir / META_NAME).exists():
        raise TagCollisionError(f"run already initialized in {workdir}")
    findings = scan_isolation(workdir)
    if findings:
        listing = "; ".join(f"{p} ({why})" for p, why in findings)
        raise IsolationError(f"workspace is not clean: {listing}")

    if evaluator_text is None:
        evaluator_text = DEFAULT_EVALUATOR_TEXT
    created = []

    def track_write(path, text):
        write_atomic(path, text.encode("utf-8"))
        created.append(path)

    workdir.mkdir(parents=True, exist_ok=True)
    try:
        track_write(workdir / CONTRACT_NAME, contract_text)
        track_write(workdir / EVALUATOR_NAME, evaluator_text)
        track_write(workdir / CANDIDATE_NAME, candidate_text)
        store = SnapshotStore(workdir / SNAPSHOT_DIR, create=True)
        created.append(workdir / SNAPSHOT_DIR)
        meta = {
            "tag": str(tag),
            "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "budget": int(budget),
            "session_size": int(session_size),
            "timeout_seconds": float(timeout_seconds),
            "evaluator_cmd": list(evaluator_cmd) if evaluator_cmd
                             else ["python3", EVALUATOR_NAME],
            "locks": _lock_digests(workdir),
        }
        track_write(workdir / META_NAME, json.dumps(meta, indent=2) + "\n")
        state = RunState(workdir=workdir, meta=meta, store=store)

        jentry = store.save(candidate_text, baseline_description)
        outcome = _evaluate(state)
        if outcome.status != "ok":
            raise InitError(
                f"baseline evaluation failed ({outcome.status}): "
                f"{outcome.detail}".strip())
        entry = LogEntry(jentry.commit, decision_score(outcome.rmse),
                         "keep", sanitize_text(baseline_description))
        write_log(workdir / LOG_NAME, [entry])
        created.append(workdir / LOG_NAME)
        return state
    except BaseException:
        for path in reversed(created):
            if path.is_dir():
                shutil.rmtree(path, ignore_errors=True)
            else:
                path.unlink(missing_ok=True)
        raise


def _evaluate(state):
    """Run the evaluator subprocess; never raises for candidate failures."""
    cmd = state.meta["evaluator_cmd"]
    timeout = float(state.meta.get("timeout_seconds", DEFAULT_TIMEOUT_SECONDS))
    env = dict(os.environ)
    env["COMBSEARCH_WORKSPACE"] = str(state.workdir)
    env["COMBSEARCH_CANDIDATE"] = str(state.candidate_path)
    try:
        proc = subprocess.Popen(
            cmd, cwd=state.workdir, env=env, text=True,
            stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    except OSError as exc:
        return EvalOutcome(None, "spawn_failed", str(exc))
    try:
        out, err = proc.communicate(timeout=timeout)
    except subprocess.TimeoutExpired:
        proc.terminate()
        try:
            proc.communicate(timeout=_KILL_GRACE_SECONDS)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
        return EvalOutcome(None, "timeout",
                           f"no result within {timeout:g}s")
    if proc.returncode != 0:
        tail = (err or out or "").strip().splitlines()[-5:]
        return EvalOutcome(None, f"exit_{proc.returncode}", "\n".join(tail))
    try:
        block = parse_eval_block(out)
    except ValidationError:
        return EvalOutcome(None, "no_score", out.strip()[-400:])
    rmse = block["rmse"]
    if not math.isfinite(rmse) or rmse < 0:
        return EvalOutcome(None, "no_score", f"unusable rmse {rmse!r}")
    return EvalOutcome(float(rmse), "ok", out)


def _restore_candidate(state, commit):
    write_atomic(state.candidate_path, state.store.load(commit))


def _no_fault(stage):
    return None


def _settle_and_log(state, jentry, outcome, entries, fault_hook):
    """Decision + results row + candidate settling (shared by step/recover)."""
    _, best = best_entry(entries)
    if outcome.status != "ok":
        entry = LogEntry(jentry.commit, math.inf, "crash", jentry.description)
    else:
        score = decision_score(outcome.rmse)
        status = "keep" if score < best.rmse else "discard"
        entry = LogEntry(jentry.commit, score, status, jentry.description)
    append_log(state.log_path, entry)
    fault_hook("logged")
    if entry.status != "keep":
        _restore_candidate(state, best.commit)
    fault_hook("settled")
    return entry


def step(state, description, fault_hook=None):
    """One full cycle for the proposal currently in the candidate file."""
    fault_hook = fault_hook or _no_fault
    entries = state.entries()
    if budget_used(entries) >= 2 * state.meta["budget"]:
        raise BudgetError(
            f"hard evaluation cap reached ({budget_used(entries)} of "
            f"{2 * state.meta['budget']})")
    fault_hook("proposed")
    content = state.candidate_path.read_bytes()
    jentry = state.store.save(content, description)
    fault_hook("snapshot")
    verify_locks(state)
    outcome = _evaluate(state)
    fault_hook("evaluated")
    entry = _settle_and_log(state, jentry, outcome, entries, fault_hook)
    return entry, outcome


def recover_session(state, fault_hook=None):
    """Bring the workspace back to a settled state after any interruption.

    Invariant: the journal leads the results log by at most one row. A
    single pending journal row is re-evaluated from its snapshot bytes and
    logged; anything else out of line is tamper/corruption. Finally the
    candidate file is restored to the champion bytes if it differs.
    """
    fault_hook = fault_hook or _no_fault
    entries = read_log(state.log_path)
    journal = state.store.entries()
    replay_decisions(entries)
    if len(journal) < len(entries):
        raise LogCorruptionError(
            f"results log has {len(entries)} rows but only {len(journal)} "
            f"snapshots exist")
    for e, j in zip(entries, journal):
        if e.commit != j.commit:
            raise LogCorruptionError(
                f"results row {j.seq} commit {e.commit[:12]}… does not match "
                f"journal {j.commit[:12]}…")
    pending = journal[len(entries):]
    if len(pending) > 1:
        raise LogCorruptionError(
            f"{len(pending)} snapshots pending evaluation; the protocol "
            f"allows at most one")

    evaluated = False
    entry = None
    if pending:
        jentry = pending[0]
        _restore_candidate(state, jentry.commit)
        verify_locks(state)
        outcome = _evaluate(state)
        fault_hook("evaluated")
        entry = _settle_and_log(state, jentry, outcome, entries, fault_hook)
        entries = read_log(state.log_path)
        evaluated = True

    _, best = best_entry(entries)
    best_bytes = state.store.load(best.commit)
    restored = False
    if state.candidate_path.read_bytes() != best_bytes:
        write_atomic(state.candidate_path, best_bytes)
        restored = True
    return RecoveryReport(evaluated, restored, entry)


def run_loop(state, searcher, max_sessions=None, fault_hook=None):
    """Sessions of proposals until the searcher stops or budget refuses.

    Searcher exceptions end the loop cleanly (the step that was in flight
    has already settled); the exception text is preserved in the result.
    """
    from .searchers import SearchContext

    steps = 0
    sessions = 0
    stop = "session_limit"
    while max_sessions is None or sessions < max_sessions:
        recover_session(state)
        entries = state.entries()
        K = state.meta["budget"]
        if budget_used(entries) >= K:
            stop = "budget"
            break
        sessions += 1
        ended = None
        for _ in range(state.meta["session_size"]):
            entries = state.entries()
            if budget_used(entries) >= 2 * K:
                ended = "hard_cap"
                break
            ctx = SearchContext.from_state(state, entries)
            try:
                proposal = searcher.propose(ctx)
            except Exception as exc:   # noqa: BLE001 - searcher is untrusted
                ended = f"searcher_error: {exc}"
                break
            if proposal is None:
                ended = "searcher_done"
                break
            text, description = proposal
            write_atomic(state.candidate_path, text.encode("utf-8"))
            step(state, description, fault_hook)
            steps += 1
        if ended:
            stop = ended
            break
    else:
        stop = "session_limit"
    return LoopResult(steps=steps, sessions=sessions, stop_reason=stop,
                      best=state.best())


def verify_run(state):
    """Full integrity audit; raises on violations, returns notes otherwise.

    Checks in order: locks, results log replay, journal agreement, blob
    existence + content hashes. Unsettled-but-recoverable conditions (one
    pending snapshot, candidate differing from the champion) are reported
    as notes, not errors — ``recover`` fixes them.
    """
    verify_locks(state)
    entries = read_log(state.log_path)
    replay_decisions(entries)
    journal = state.store.entries()
    if len(journal) < len(entries):
        raise LogCorruptionError("journal is shorter than the results log")
    for e, j in zip(entries, journal):
        if e.commit != j.commit:
            raise LogCorruptionError(
                f"results/journal commit mismatch at seq {j.seq}")
    pending = journal[len(entries):]
    if len(pending) > 1:
        raise LogCorruptionError(f"{len(pending)} pending snapshots")
    for j in journal:
        state.store.load(j.commit)   # raises on missing/corrupt blob
    notes = []
    if pending:
        notes.append(f"1 snapshot pending evaluation (seq {pending[0].seq}); "
                     f"run recover")
    _, best = best_entry(entries)
    if state.candidate_path.read_bytes() != state.store.load(best.commit):
        notes.append("candidate file differs from champion; run recover")
    notes.append(f"{len(entries)} results rows, budget used "
                 f"{budget_used(entries)} of {state.meta['budget']}, "
                 f"champion {format_score(best.rmse)}")
    return notes
