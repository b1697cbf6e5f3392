"""Command-line front end.

Verbs:
  evaluate  score methods on a panel; prints one stdout block per method
  report    pivot table / TSV across methods and subsamples
  loop      initialize and/or drive a budgeted search run
  recover   settle an interrupted run (journal replay + candidate restore)
  verify    integrity audit of a run directory (locks, log replay, blobs)

Exit codes: 0 ok; 2 bad inputs; 3 integrity/lock/budget violation;
4 evaluation failure.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from .combine import create_method, method_names
from .errors import (
    BudgetError,
    CombsearchError,
    ConvergenceError,
    EvaluationError,
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
from .evaluate import COVID_QUARTERS, EvalConfig, rolling_evaluate, rmse_of
from .panel import FORMATS, impute_panel, load_panel, synthetic_panel
from .report import format_eval_block, make_report

_USAGE_ERRORS = (ValidationError, PanelParseError, PanelFormatError,
                 ImputationError, SchemeError)
_INTEGRITY_ERRORS = (LockViolationError, LogCorruptionError,
                     TagCollisionError, IsolationError, BudgetError)
_EVAL_ERRORS = (EvaluationError, InitError, ConvergenceError, SolverError)


def _add_panel_args(ap):
    ap.add_argument("--panel", default=None,
                    help="CSV panel path (default: built-in synthetic data)")
    ap.add_argument("--format", default="generic", choices=sorted(FORMATS),
                    help="panel format check to apply")


def _add_eval_args(ap):
    _add_panel_args(ap)
    ap.add_argument("--methods", default="simple_average",
                    help="comma-separated method names")
    ap.add_argument("--benchmark", default="simple_average")
    ap.add_argument("--window", type=int, default=20)
    ap.add_argument("--first-call", type=int, default=5)
    ap.add_argument("--score-from", type=int, default=6)
    ap.add_argument("--config", default=None,
                    help="JSON file: {method: {param: value}} overrides")
    ap.add_argument("--mask", default="all,ex_covid",
                    help="comma-separated subsamples from {all, ex_covid}")


def _load_params(args):
    if not args.config:
        return {}
    return json.loads(Path(args.config).read_text(encoding="utf-8"))


def _load_panel(args):
    if args.panel:
        return impute_panel(load_panel(args.panel, args.format))
    return synthetic_panel()


def _run_methods(args):
    panel = _load_panel(args)
    cfg = EvalConfig(window=args.window, first_call_t=args.first_call,
                     score_from_t=args.score_from)
    params = _load_params(args)
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.benchmark not in names:
        names = [args.benchmark] + names
    results = {}
    for name in names:
        method = create_method(name, params.get(name))
        results[name] = rolling_evaluate(panel, method, cfg)
    return results, cfg, panel


def _masks_for(args, results):
    requested = [m.strip() for m in args.mask.split(",") if m.strip()]
    bench = results[args.benchmark]
    scored_dates = [r.date for r in bench if r.scored]
    masks = {}
    for name in requested:
        if name == "all":
            masks[name] = None
        elif name == "ex_covid":
            masks[name] = {d for d in scored_dates if d not in COVID_QUARTERS}
        else:
            raise ValidationError(f"unknown mask {name!r} (use all, ex_covid)")
    return masks


def cmd_evaluate(args):
    results, _, _ = _run_methods(args)
    bench_rmse = rmse_of([r for r in results[args.benchmark] if r.scored])
    for name, records in results.items():
        score = rmse_of([r for r in records if r.scored])
        sys.stdout.write(format_eval_block(name, score, bench_rmse))
    return 0


def cmd_report(args):
    results, _, _ = _run_methods(args)
    report = make_report(results, args.benchmark, _masks_for(args, results))
    text = report.to_tsv() if args.report_format == "tsv" else report.to_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _build_searcher(args):
    from .harness import ExternalSearcher, ScriptedSearcher

    if args.script and args.external:
        raise ValidationError("--script and --external are mutually exclusive")
    if args.script:
        items = json.loads(Path(args.script).read_text(encoding="utf-8"))
        script = []
        for i, item in enumerate(items):
            if "file" in item:
                text = Path(item["file"]).read_text(encoding="utf-8")
            elif "text" in item:
                text = item["text"]
            else:
                raise ValidationError(
                    f"script item {i} needs a 'file' or 'text' key")
            script.append((text, item.get("description", f"proposal {i + 1}")))
        return ScriptedSearcher(script)
    if args.external:
        return ExternalSearcher(shlex.split(args.external))
    return None


def cmd_loop(args):
    from .harness import init_run, load_run, recover_session, run_loop

    if args.init == bool(args.resume):
        raise ValidationError("pass exactly one of --init or --resume")
    workdir = Path(args.workdir)
    if args.init:
        if not args.contract or not args.candidate:
            raise ValidationError("--init requires --contract and --candidate")
        evaluator_text = (Path(args.evaluator).read_text(encoding="utf-8")
                          if args.evaluator else None)
        evaluator_cmd = None
        if args.panel:
            evaluator_cmd = ["python3", "evaluator.py",
                             "--panel", str(Path(args.panel).resolve()),
                             "--format", args.format]
        state = init_run(
            workdir, tag=args.tag or workdir.name,
            contract_text=Path(args.contract).read_text(encoding="utf-8"),
            evaluator_text=evaluator_text,
            candidate_text=Path(args.candidate).read_text(encoding="utf-8"),
            budget=args.budget, session_size=args.session_size,
            timeout_seconds=args.timeout, evaluator_cmd=evaluator_cmd)
        print(f"initialized run {state.meta['tag']!r} in {workdir}")
    else:
        state = load_run(workdir)
        report = recover_session(state)
        if report.evaluated_pending:
            print("recovered: pending snapshot evaluated and logged")
        if report.restored_candidate:
            print("recovered: candidate restored to champion")

    searcher = _build_searcher(args)
    if searcher is None:
        best = state.best()
        print(f"champion: {best.rmse:.4f} ({best.description})")
        return 0
    result = run_loop(state, searcher, max_sessions=args.max_sessions)
    print(f"stop: {result.stop_reason}")
    print(f"sessions: {result.sessions}  steps: {result.steps}")
    print(f"champion: {result.best.rmse:.4f} ({result.best.description})")
    return 0


def cmd_recover(args):
    from .harness import load_run, recover_session

    state = load_run(Path(args.workdir))
    report = recover_session(state)
    if report.evaluated_pending:
        e = report.entry
        print(f"evaluated pending snapshot: {e.status} {e.rmse:.4f}"
              if e.status != "crash" else "evaluated pending snapshot: crash")
    if report.restored_candidate:
        print("candidate restored to champion")
    if not (report.evaluated_pending or report.restored_candidate):
        print("nothing to recover; run is settled")
    best = state.best()
    print(f"champion: {best.rmse:.4f} ({best.description})")
    return 0


def cmd_verify(args):
    from .harness import load_run, verify_run

    state = load_run(Path(args.workdir))
    for note in verify_run(state):
        print(note)
    print("verify: ok")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="combsearch",
        description="forecast-combination evaluation and budgeted search "
                    "harness")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("evaluate", help="score methods on a panel")
    _add_eval_args(p)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("report", help="method x subsample result table")
    _add_eval_args(p)
    p.add_argument("--report-format", default="text",
                   choices=("text", "tsv"))
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("loop", help="run a budgeted candidate search")
    p.add_argument("--workdir", required=True)
    p.add_argument("--init", action="store_true")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--contract", default=None)
    p.add_argument("--candidate", default=None)
    p.add_argument("--evaluator", default=None,
                   help="evaluator program text to install (default: "
                        "packaged reference evaluator)")
    _add_panel_args(p)
    p.add_argument("--tag", default=None)
    p.add_argument("--budget", type=int, default=3)
    p.add_argument("--session-size", type=int, default=2)
    p.add_argument("--timeout", type=float, default=1800.0)
    p.add_argument("--script", default=None,
                   help="JSON proposal list for the scripted searcher")
    p.add_argument("--external", default=None,
                   help="external searcher command line")
    p.add_argument("--max-sessions", type=int, default=None)
    p.set_defaults(fn=cmd_loop)

    p = sub.add_parser("recover", help="settle an interrupted run")
    p.add_argument("--workdir", required=True)
    p.set_defaults(fn=cmd_recover)

    p = sub.add_parser("verify", help="audit a run directory")
    p.add_argument("--workdir", required=True)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


def entry(argv=None):
    try:
        return main(argv if argv is not None else sys.argv[1:])
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _INTEGRITY_ERRORS as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 3
    except _EVAL_ERRORS as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return 4
    except CombsearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(entry())
