"""Rendering of rolling-evaluation results: text pivot, TSV, stdout block.

The TSV is the machine-readable artifact (full-precision floats, one row
per method x sample); the text table is for humans. The stdout block is the
wire format the loop harness scrapes from its evaluator subprocess — fixed
10-decimal lines so ``grep '^rmse:'`` always finds the score.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import NamedTuple

from .dmtest import dm_test_ewc
from .errors import ValidationError
from .evaluate import aligned_errors, rmse_of, _select

TSV_COLUMNS = ("method", "sample", "n_scored", "rmse", "relative",
               "p_value", "label_notes")


class ReportRow(NamedTuple):
    method: str
    sample: str
    n_scored: int
    rmse: float
    relative: float
    p_value: float
    label_notes: str


@dataclass(frozen=True)
class Report:
    benchmark: str
    samples: tuple
    rows: tuple

    def to_tsv(self):
        buf = io.StringIO()
        buf.write("\t".join(TSV_COLUMNS) + "\n")
        for r in self.rows:
            buf.write("\t".join([
                r.method, r.sample, str(r.n_scored),
                _num(r.rmse), _num(r.relative), _num(r.p_value),
                r.label_notes]) + "\n")
        return buf.getvalue()

    def to_text(self):
        return _render_text(self)


def _num(x):
    return "" if math.isnan(x) else repr(float(x))


def _parse_num(s):
    return float("nan") if s == "" else float(s)


def _label_notes(records, method):
    counts = {}
    for r in records:
        if r.label != method:
            counts[r.label] = counts.get(r.label, 0) + 1
    return ",".join(f"{lab}:{n}" for lab, n in sorted(counts.items()))


def make_report(results, benchmark, masks=None):
    """Score every method against the benchmark across named subsamples.

    ``results`` maps method name -> rolling records; ``masks`` maps sample
    name -> inclusion date set (None = every scored origin). One-sided
    equal-accuracy p-values compare each method to the benchmark on the
    common scored origins of the sample.
    """
    if benchmark not in results:
        raise ValidationError(f"benchmark {benchmark!r} not among results")
    masks = masks if masks is not None else {"all": None}
    bench_records = results[benchmark]
    rows = []
    for sample, dates in masks.items():
        bench_sel = _select(bench_records, dates)
        bench_rmse = rmse_of(bench_sel)
        for method, records in results.items():
            sel = _select(records, dates)
            score = rmse_of(sel)
            if method == benchmark:
                rel, p = 1.0, float("nan")
            else:
                rel = score / bench_rmse if bench_rmse > 0 else float("nan")
                eb, em = aligned_errors(bench_records, records, dates)
                p = dm_test_ewc(eb, em).p_value if eb.size >= 3 else float("nan")
            rows.append(ReportRow(
                method=method, sample=sample, n_scored=len(sel), rmse=score,
                relative=rel, p_value=p,
                label_notes=_label_notes(sel, method)))
    return Report(benchmark=benchmark, samples=tuple(masks), rows=tuple(rows))


def _render_text(report):
    methods = []
    for r in report.rows:
        if r.method not in methods:
            methods.append(r.method)
    by = {(r.method, r.sample): r for r in report.rows}
    out = [f"rolling evaluation (benchmark: {report.benchmark})", ""]
    header = f"{'method':<20}"
    for s in report.samples:
        header += f"{s + ' rmse':>14}{'rel':>8}{'p':>8}{'n':>5}"
    out.append(header)
    out.append("-" * len(header))
    for m in methods:
        line = f"{m:<20}"
        for s in report.samples:
            r = by[(m, s)]
            p = "     -" if math.isnan(r.p_value) else f"{r.p_value:6.3f}"
            line += f"{r.rmse:14.4f}{r.relative:8.3f}{p:>8}{r.n_scored:>5}"
        out.append(line)
    notes = [(r.method, r.sample, r.label_notes)
             for r in report.rows if r.label_notes]
    if notes:
        out.append("")
        out.append("notes:")
        for m, s, txt in notes:
            out.append(f"  {m} [{s}]: {txt}")
    return "\n".join(out) + "\n"


def read_tsv(text):
    """Parse a report TSV back into rows (inverse of Report.to_tsv)."""
    lines = text.splitlines()
    if not lines or tuple(lines[0].split("\t")) != TSV_COLUMNS:
        raise ValidationError("not a report TSV: bad header")
    rows = []
    for ln in lines[1:]:
        if not ln:
            continue
        parts = ln.split("\t")
        if len(parts) != len(TSV_COLUMNS):
            raise ValidationError(f"bad TSV row: {ln!r}")
        rows.append(ReportRow(
            method=parts[0], sample=parts[1], n_scored=int(parts[2]),
            rmse=_parse_num(parts[3]), relative=_parse_num(parts[4]),
            p_value=_parse_num(parts[5]), label_notes=parts[6]))
    return rows


def format_eval_block(method, rmse, benchmark_rmse):
    """The stdout contract for evaluator subprocesses (10-decimal lines)."""
    rel = rmse / benchmark_rmse if benchmark_rmse > 0 else float("inf")
    return ("---\n"
            f"method: {method}\n"
            f"rmse: {rmse:.10f}\n"
            f"benchmark_rmse: {benchmark_rmse:.10f}\n"
            f"relative_rmse: {rel:.10f}\n")


def parse_eval_block(text):
    """Extract the LAST stdout block's scores; raises if none is present."""
    rmse = bench = rel = method = None
    for ln in text.splitlines():
        if ln.startswith("method: "):
            method = ln[len("method: "):].strip()
        elif ln.startswith("rmse: "):
            rmse = float(ln[len("rmse: "):])
        elif ln.startswith("benchmark_rmse: "):
            bench = float(ln[len("benchmark_rmse: "):])
        elif ln.startswith("relative_rmse: "):
            rel = float(ln[len("relative_rmse: "):])
    if rmse is None:
        raise ValidationError("no 'rmse:' line in evaluator output")
    return {"method": method, "rmse": rmse,
            "benchmark_rmse": bench, "relative_rmse": rel}
