"""Append-only results log: one row per evaluated candidate.

Schema: ``commit<TAB>rmse<TAB>status<TAB>description``. Scores are written
at exactly 4 decimals and the 4-decimal value IS the decision value, so the
file alone replays every keep/discard decision bit-for-bit. Crashed
evaluations are logged with score 0.0000 and status ``crash``; they carry
+inf internally and can never become the champion. A candidate is kept only
on strict improvement — ties are discarded.
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import NamedTuple

from ..errors import LogCorruptionError
from .snapshots import sanitize_text, write_atomic

HEADER = "commit\trmse\tstatus\tdescription"
STATUSES = ("keep", "discard", "crash")

_SCORE_RE = re.compile(r"^\d+\.\d{4}$")
_COMMIT_RE = re.compile(r"^[0-9a-f]{64}$")


class LogEntry(NamedTuple):
    commit: str
    rmse: float        # +inf for crash rows
    status: str
    description: str


def decision_score(raw_rmse):
    """The 4-decimal value used both in the file and in keep decisions."""
    if not math.isfinite(raw_rmse) or raw_rmse < 0:
        raise LogCorruptionError(f"invalid score {raw_rmse!r}")
    return float(f"{raw_rmse:.4f}")


def format_score(rmse):
    return "0.0000" if math.isinf(rmse) else f"{rmse:.4f}"


def format_entry(entry):
    return (f"{entry.commit}\t{format_score(entry.rmse)}\t{entry.status}\t"
            f"{sanitize_text(entry.description)}")


def read_log(path):
    """Strict parse; any malformed byte is a hard error with its line."""
    path = Path(path)
    if not path.exists():
        raise LogCorruptionError(f"results log missing: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != HEADER:
        raise LogCorruptionError(f"bad results header in {path}", line=1)
    entries = []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split("\t")
        if len(parts) != 4:
            raise LogCorruptionError(
                f"results row needs 4 fields, got {len(parts)}", line=i)
        commit, score, status, description = parts
        if not _COMMIT_RE.match(commit):
            raise LogCorruptionError(f"malformed commit {commit!r}", line=i)
        if not _SCORE_RE.match(score):
            raise LogCorruptionError(f"malformed score {score!r}", line=i)
        if status not in STATUSES:
            raise LogCorruptionError(f"unknown status {status!r}", line=i)
        if status == "crash":
            if score != "0.0000":
                raise LogCorruptionError(
                    f"crash rows must score 0.0000, got {score}", line=i)
            rmse = math.inf
        else:
            rmse = float(score)
        entries.append(LogEntry(commit, rmse, status, description))
    return entries


def write_log(path, entries):
    body = [HEADER] + [format_entry(e) for e in entries]
    write_atomic(path, ("\n".join(body) + "\n").encode())


def append_log(path, entry):
    entries = read_log(path)
    write_log(path, entries + [entry])


def budget_used(entries):
    """Evaluations charged against the budget; the baseline row is free."""
    return max(0, len(entries) - 1)


def best_entry(entries):
    """Champion = the last keep row. Returns (index, entry)."""
    for i in range(len(entries) - 1, -1, -1):
        if entries[i].status == "keep":
            return i, entries[i]
    raise LogCorruptionError("results log has no keep row")


def replay_decisions(entries):
    """Re-derive every status from the logged scores; mismatch = tamper.

    The first row must be the kept baseline; afterwards keep requires a
    strict improvement on the champion score, anything else is a discard,
    and crash rows never change the champion.
    """
    if not entries:
        raise LogCorruptionError("results log is empty", line=2)
    if entries[0].status != "keep":
        raise LogCorruptionError(
            f"first row must be the kept baseline, got {entries[0].status}",
            line=2)
    if math.isinf(entries[0].rmse):
        raise LogCorruptionError("baseline row cannot be a crash", line=2)
    best = entries[0].rmse
    for i, e in enumerate(entries[1:], start=3):
        if e.status == "crash":
            continue
        expected = "keep" if e.rmse < best else "discard"
        if e.status != expected:
            raise LogCorruptionError(
                f"row decision mismatch: score {format_score(e.rmse)} vs "
                f"champion {format_score(best)} should be {expected}, "
                f"log says {e.status}", line=i)
        if e.status == "keep":
            best = e.rmse
