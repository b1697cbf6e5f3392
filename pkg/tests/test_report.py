"""Report rendering: TSV round trip, pivot text, evaluator stdout blocks."""

import math

import numpy as np
import pytest

from combsearch import (
    EvalConfig,
    ValidationError,
    create_method,
    default_masks,
    format_eval_block,
    make_report,
    parse_eval_block,
    rolling_evaluate,
    synthetic_panel,
)
from combsearch.report import TSV_COLUMNS, read_tsv


def rows_equal(a, b):
    """NamedTuple comparison that treats NaN == NaN (for p-value gaps)."""
    for x, y in zip(a, b):
        if isinstance(x, float) and isinstance(y, float):
            if not (x == y or (math.isnan(x) and math.isnan(y))):
                return False
        elif x != y:
            return False
    return True


@pytest.fixture(scope="module")
def demo_report():
    panel = synthetic_panel(T=41, K=4, seed=101, start="2011Q1")
    cfg = EvalConfig(lambda_grid=np.array([1.0, 0.1]))
    results = {
        name: rolling_evaluate(panel, create_method(name), cfg)
        for name in ("simple_average", "best_individual", "run1b")
    }
    masks = default_masks(results["simple_average"])
    return make_report(results, "simple_average", masks)


def test_report_structure(demo_report):
    rep = demo_report
    assert rep.benchmark == "simple_average"
    assert rep.samples == ("all", "ex_covid")
    assert len(rep.rows) == 6  # 3 methods x 2 samples
    bench_rows = [r for r in rep.rows if r.method == "simple_average"]
    for r in bench_rows:
        assert r.relative == 1.0
        assert math.isnan(r.p_value)
    others = [r for r in rep.rows if r.method != "simple_average"]
    for r in others:
        assert r.relative == pytest.approx(
            r.rmse / next(b.rmse for b in bench_rows if b.sample == r.sample),
            rel=1e-15)
        assert 0.0 <= r.p_value <= 1.0
    all_rows = [r for r in rep.rows if r.sample == "all"]
    assert {r.n_scored for r in all_rows} == {36}


def test_tsv_round_trip_preserves_full_precision(demo_report):
    text = demo_report.to_tsv()
    lines = text.splitlines()
    assert tuple(lines[0].split("\t")) == TSV_COLUMNS
    rows = read_tsv(text)
    assert len(rows) == len(demo_report.rows)
    for got, want in zip(rows, demo_report.rows):
        assert rows_equal(got, want), (got, want)


def test_tsv_rejects_foreign_text():
    with pytest.raises(ValidationError):
        read_tsv("method,sample\nx,y\n")
    header = "\t".join(TSV_COLUMNS)
    with pytest.raises(ValidationError):
        read_tsv(header + "\nonly\ttwo\n")


def test_text_table_mentions_everything(demo_report):
    text = demo_report.to_text()
    assert "benchmark: simple_average" in text
    for name in ("simple_average", "best_individual", "run1b"):
        assert name in text
    for sample in ("all", "ex_covid"):
        assert sample in text


def test_label_notes_capture_fallbacks():
    # a 4-row training window keeps run1b on the small-sample CV branch at
    # every origin, so the variant label shows up in the scored sample
    panel = synthetic_panel(T=7, K=3, seed=102)
    cfg = EvalConfig(window=4, lambda_grid=np.array([1.0, 0.1]))
    results = {
        "simple_average": rolling_evaluate(
            panel, create_method("simple_average"), cfg),
        "run1b": rolling_evaluate(panel, create_method("run1b"), cfg),
    }
    rep = make_report(results, "simple_average")
    notes = next(r.label_notes for r in rep.rows if r.method == "run1b")
    assert "run1b[cv=loo]" in notes
    assert ":" in notes  # label:count pairs
    assert "notes:" in rep.to_text()


def test_make_report_requires_benchmark(demo_report):
    with pytest.raises(ValidationError):
        make_report({"m": []}, "missing")


def test_eval_block_round_trip():
    block = format_eval_block("run2", 0.123456789012345, 0.2)
    lines = block.splitlines()
    assert lines[0] == "---"
    assert lines[1] == "method: run2"
    assert lines[2] == "rmse: 0.1234567890"
    assert lines[3] == "benchmark_rmse: 0.2000000000"
    assert lines[4] == "relative_rmse: 0.6172839451"
    got = parse_eval_block(block)
    assert got["method"] == "run2"
    assert got["rmse"] == 0.123456789
    assert got["benchmark_rmse"] == 0.2


def test_parse_eval_block_takes_last_block_and_ignores_noise():
    text = ("random logging\n" + format_eval_block("a", 1.0, 1.0)
            + "more noise\n" + format_eval_block("b", 0.5, 1.0))
    got = parse_eval_block(text)
    assert got["method"] == "b"
    assert got["rmse"] == 0.5
    with pytest.raises(ValidationError):
        parse_eval_block("no block here\n")
