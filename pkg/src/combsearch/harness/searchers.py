"""Proposal sources for the loop: scripted lists and external programs.

A searcher exposes ``propose(ctx) -> (candidate_text, description) | None``
where None means it is finished. Searchers must be restartable: the
scripted searcher derives its position from the results log length alone,
so a run interrupted at any fault boundary re-proposes exactly the
candidate whose evaluation never completed, and skips those already logged.
"""

from __future__ import annotations

import os
import subprocess
from pathlib import Path
from typing import NamedTuple

from ..errors import ValidationError
from .runlog import best_entry, budget_used, format_score


class SearchContext(NamedTuple):
    """Read-only view a searcher gets before each proposal."""

    workdir: Path
    candidate_path: Path
    entries: tuple
    best: object
    budget: int
    used: int
    remaining: int
    store: object

    @classmethod
    def from_state(cls, state, entries=None):
        entries = list(entries) if entries is not None else state.entries()
        _, best = best_entry(entries)
        used = budget_used(entries)
        budget = int(state.meta["budget"])
        return cls(workdir=state.workdir,
                   candidate_path=state.candidate_path,
                   entries=tuple(entries), best=best, budget=budget,
                   used=used, remaining=max(0, budget - used),
                   store=state.store)


class ScriptedSearcher:
    """Fixed proposal list, indexed by how many evaluations are logged.

    Position = results rows minus the baseline. A proposal that crashed
    mid-step gets logged by recovery first, so the script never repeats or
    skips an entry regardless of where a fault hit.
    """

    def __init__(self, script):
        script = list(script)
        for item in script:
            if len(item) != 2:
                raise ValidationError(
                    "script items must be (candidate_text, description)")
        self.script = script

    def propose(self, ctx):
        i = ctx.used
        if i >= len(self.script):
            return None
        text, description = self.script[i]
        return str(text), str(description)


class ExternalSearcher:
    """Drives an external program that edits the candidate file in place.

    Contract: the program runs in the workspace with COMBSEARCH_WORKSPACE,
    COMBSEARCH_CANDIDATE, COMBSEARCH_REMAINING and COMBSEARCH_BEST_SCORE
    set. Exit 0 plus a changed candidate = a proposal (description read
    from ``.description`` if present); exit 0 without changing the
    candidate, or any nonzero exit, means the searcher is done.
    """

    def __init__(self, cmd, timeout_seconds=600.0,
                 description_file=".description"):
        self.cmd = list(cmd)
        self.timeout_seconds = float(timeout_seconds)
        self.description_file = description_file

    def propose(self, ctx):
        env = dict(os.environ)
        env["COMBSEARCH_WORKSPACE"] = str(ctx.workdir)
        env["COMBSEARCH_CANDIDATE"] = str(ctx.candidate_path)
        env["COMBSEARCH_REMAINING"] = str(ctx.remaining)
        env["COMBSEARCH_BEST_SCORE"] = format_score(ctx.best.rmse)
        proc = subprocess.run(
            self.cmd, cwd=ctx.workdir, env=env, capture_output=True,
            text=True, timeout=self.timeout_seconds)
        if proc.returncode != 0:
            return None
        text = ctx.candidate_path.read_text(encoding="utf-8")
        last = ctx.store.last()
        if last is not None and text.encode("utf-8") == ctx.store.load(last.commit):
            return None
        desc_path = ctx.workdir / self.description_file
        if desc_path.exists():
            description = desc_path.read_text(encoding="utf-8").strip()
        else:
            description = f"external proposal {ctx.used + 1}"
        return text, description or f"external proposal {ctx.used + 1}"
