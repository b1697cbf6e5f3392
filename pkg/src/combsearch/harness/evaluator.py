"""Reference evaluator subprocess: scores the workspace candidate.

The candidate file is a tiny Python module declaring which combination
method to run::

    METHOD = "run2"
    PARAMS = {"temporal_decay": 4.0}   # optional

It is executed (candidates are code under this protocol — crashes and
hangs are the harness's job to contain), the named method is evaluated by
rolling origins over a panel, and the scores are printed as the stdout
block the loop scrapes. The panel comes from --panel / COMBSEARCH_PANEL,
or a deterministic synthetic one so the harness works data-free.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ..combine import create_method
from ..evaluate import EvalConfig, rolling_evaluate, rmse_of
from ..panel import impute_panel, load_panel, synthetic_panel
from ..report import format_eval_block


def read_candidate(path):
    source = Path(path).read_text(encoding="utf-8")
    ns = {}
    exec(compile(source, str(path), "exec"), ns)  # noqa: S102 - by contract
    if "METHOD" not in ns:
        raise ValueError(f"candidate {path} defines no METHOD")
    return str(ns["METHOD"]), dict(ns.get("PARAMS") or {})


def resolve_panel(args):
    path = args.panel or os.environ.get("COMBSEARCH_PANEL")
    if path:
        fmt = args.format or os.environ.get("COMBSEARCH_PANEL_FORMAT", "generic")
        return impute_panel(load_panel(path, fmt))
    return synthetic_panel()


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="score the workspace candidate by rolling evaluation")
    ap.add_argument("--candidate", default=None)
    ap.add_argument("--panel", default=None)
    ap.add_argument("--format", default=None)
    ap.add_argument("--window", type=int, default=20)
    ap.add_argument("--first-call", type=int, default=5)
    ap.add_argument("--score-from", type=int, default=6)
    ap.add_argument("--benchmark", default="simple_average")
    args = ap.parse_args(argv)

    candidate = (args.candidate or os.environ.get("COMBSEARCH_CANDIDATE")
                 or "candidate.py")
    method_name, params = read_candidate(candidate)
    panel = resolve_panel(args)
    cfg = EvalConfig(window=args.window, first_call_t=args.first_call,
                     score_from_t=args.score_from)

    records = rolling_evaluate(panel, create_method(method_name, params), cfg)
    bench = rolling_evaluate(panel, create_method(args.benchmark), cfg)
    scored = [r for r in records if r.scored]
    bench_scored = [r for r in bench if r.scored]
    sys.stdout.write(format_eval_block(
        method_name, rmse_of(scored), rmse_of(bench_scored)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
