"""Panel container, CSV round trip, imputation, splits, and origin views."""

import numpy as np
import pytest

from combsearch import (
    ImputationError,
    Panel,
    PanelFormatError,
    PanelParseError,
    ValidationError,
    build_info,
    impute_panel,
    load_panel,
    mark_split,
    quarter_range,
    save_panel,
    split_panel,
    synthetic_panel,
)


def small_panel(T=6, K=3, split=None, y=None):
    X = np.arange(T * K, dtype=float).reshape(T, K)
    yv = np.linspace(0.0, 1.0, T) if y is None else np.asarray(y, dtype=float)
    return Panel(dates=quarter_range("2015Q1", T), X=X, y=yv,
                 missing_mask=np.zeros((T, K), bool),
                 split=T if split is None else split)


def test_quarter_range_frozen():
    assert quarter_range("2019Q3", 6) == (
        "2019Q3", "2019Q4", "2020Q1", "2020Q2", "2020Q3", "2020Q4")
    with pytest.raises(ValidationError):
        quarter_range("2019Q5", 2)


def test_panel_validation_errors():
    X = np.zeros((4, 2))
    dates = quarter_range("2015Q1", 4)
    ok = dict(dates=dates, X=X, y=np.zeros(4),
              missing_mask=np.zeros((4, 2), bool), split=4)
    Panel(**ok)  # baseline is valid
    with pytest.raises(ValidationError):
        Panel(**{**ok, "X": np.zeros((4, 1)),
                 "missing_mask": np.zeros((4, 1), bool)})
    with pytest.raises(ValidationError):
        Panel(**{**ok, "y": np.zeros(3)})
    with pytest.raises(ValidationError):
        Panel(**{**ok, "dates": ("2015Q1", "2015Q2", "2015Q2", "2015Q4")})
    with pytest.raises(ValidationError):
        Panel(**{**ok, "split": 0})
    with pytest.raises(ValidationError):
        Panel(**{**ok, "split": 5})
    with pytest.raises(ValidationError):
        Panel(**{**ok, "missing_mask": np.zeros((4, 3), bool)})
    with pytest.raises(ValidationError):
        Panel(**{**ok, "names": ("a",)})


def test_panel_arrays_are_frozen():
    p = small_panel()
    with pytest.raises(ValueError):
        p.X[0, 0] = 99.0
    with pytest.raises(ValueError):
        p.y[0] = 99.0


def test_holdout_properties():
    p = small_panel(split=4)
    assert p.has_holdout
    assert p.holdout_dates() == p.dates[4:]
    assert not small_panel().has_holdout


def test_csv_round_trip(tmp_path):
    p = synthetic_panel(T=10, K=3, seed=5)
    path = tmp_path / "panel.csv"
    save_panel(p, path)
    q = load_panel(path)
    assert q.dates == p.dates
    np.testing.assert_array_equal(q.X, p.X)
    np.testing.assert_array_equal(q.y, p.y)
    assert q.names == ("f1", "f2", "f3")
    assert q.split == q.T  # generic format: no holdout


def test_load_missing_tokens(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(
        "date,a,b,real\n"
        "2015Q1,1.0,,1.5\n"
        "2015Q2,NA,2.0,1.6\n"
        "2015Q3,n/a,nan,1.7\n",
        encoding="utf-8")
    p = load_panel(path)
    expect_mask = np.array([[False, True], [True, False], [True, True]])
    np.testing.assert_array_equal(p.missing_mask, expect_mask)
    assert np.isnan(p.X[expect_mask]).all()
    assert p.names == ("a", "b")


def test_load_parse_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,a,b,real\n2015Q1,1.0,oops,1.5\n", encoding="utf-8")
    with pytest.raises(PanelParseError) as ei:
        load_panel(bad)
    assert "oops" in str(ei.value)

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("date,a,b,real\n2015Q1,1.0,1.5\n", encoding="utf-8")
    with pytest.raises(PanelParseError):
        load_panel(ragged)

    empty = tmp_path / "empty.csv"
    empty.write_text("date,a,b,real\n", encoding="utf-8")
    with pytest.raises(PanelParseError):
        load_panel(empty)


def test_format_dimension_checks(tmp_path):
    p = synthetic_panel(T=10, K=3)
    path = save_panel(p, tmp_path / "p.csv")
    with pytest.raises(PanelFormatError):
        load_panel(path, fmt="original_70")
    with pytest.raises(ValidationError):
        load_panel(path, fmt="bogus")


def test_extended_format_sets_split(tmp_path):
    p = synthetic_panel(T=106, K=23, seed=1)
    path = save_panel(p, tmp_path / "ext.csv")
    q = load_panel(path, fmt="extended_106")
    assert q.split == 70
    assert len(q.holdout_dates()) == 36


# --- imputation -----------------------------------------------------------
# Hand-built 5x3 case. Column 0: interior gap at row 2 between observed
# rows 1 and 3 -> linear interpolation. Column 1: leading gap at row 0 ->
# cross-sectional mean of the observed forecasters at that date. Column 2:
# fully observed and must come through untouched.

def test_impute_rules_hand_case():
    X = np.array([
        [np.nan, np.nan, 2.0],
        [1.0, 1.0, 3.0],
        [np.nan, 2.0, 4.0],
        [3.0, 3.0, 5.0],
        [4.0, 4.0, 6.0],
    ])
    mask = np.isnan(X)
    p = Panel(dates=quarter_range("2015Q1", 5), X=np.where(mask, 0.0, X),
              y=np.zeros(5), missing_mask=mask, split=5)
    q = impute_panel(p)
    assert not q.missing_mask.any()
    assert q.X[2, 0] == pytest.approx(2.0)          # interp(1->3, 3->3) midpoint
    assert q.X[0, 0] == pytest.approx(2.0)          # row mean of observed {2.0}
    assert q.X[0, 1] == pytest.approx(2.0)
    np.testing.assert_array_equal(q.X[:, 2], X[:, 2])   # observed untouched
    np.testing.assert_array_equal(q.X[1], X[1])

    # idempotent: a second pass changes nothing
    r = impute_panel(q)
    np.testing.assert_array_equal(r.X, q.X)


def test_impute_dead_column_takes_row_means():
    X = np.array([[1.0, np.nan, 3.0], [2.0, np.nan, 4.0]])
    mask = np.isnan(X)
    p = Panel(dates=("2015Q1", "2015Q2"), X=np.where(mask, 0.0, X),
              y=np.zeros(2), missing_mask=mask, split=2)
    q = impute_panel(p)
    assert q.X[0, 1] == pytest.approx(2.0)
    assert q.X[1, 1] == pytest.approx(3.0)


def test_impute_errors():
    p = small_panel(y=[0.0, 1.0, np.nan, 3.0, 4.0, 5.0])
    with pytest.raises(ImputationError):
        impute_panel(p)
    X = np.zeros((2, 2))
    mask = np.array([[True, True], [False, False]])
    p2 = Panel(dates=("2015Q1", "2015Q2"), X=X, y=np.zeros(2),
               missing_mask=mask, split=2)
    with pytest.raises(ImputationError):
        impute_panel(p2)


def test_dead_column_warning_on_load(tmp_path):
    path = tmp_path / "dead.csv"
    path.write_text(
        "date,a,b,real\n2015Q1,1.0,,1.5\n2015Q2,2.0,,1.6\n", encoding="utf-8")
    with pytest.warns(UserWarning, match="no observations"):
        load_panel(path)


# --- splits ----------------------------------------------------------------

def test_split_panel_at_date():
    p = small_panel(T=8)
    search, held = split_panel(p, p.dates[5])
    assert search.T == 5 and held == 3
    assert search.split == 5
    np.testing.assert_array_equal(search.X, p.X[:5])
    marked = mark_split(p, p.dates[5])
    assert marked.T == p.T and marked.split == 5
    # boundary past the end: everything is search sample
    all_search, none = split_panel(p, "2999Q4")
    assert all_search.T == 8 and none == 0
    with pytest.raises(ValidationError):
        split_panel(p, "2015Q0")     # not a panel date
    with pytest.raises(ValidationError):
        split_panel(p, p.dates[0])   # no search rows left


# --- origin views ----------------------------------------------------------

def test_build_info_slices_and_copies(panel48, short_grid):
    t, w = 30, 20
    info = build_info(panel48, t, w, short_grid)
    np.testing.assert_array_equal(info.X_history, panel48.X[: t - 1])
    np.testing.assert_array_equal(info.y_history, panel48.y[: t - 1])
    np.testing.assert_array_equal(info.X_train, panel48.X[t - 1 - w: t - 1])
    np.testing.assert_array_equal(info.x_new, panel48.X[t - 1])
    assert info.n_train == w and info.K == panel48.K
    # grids default-copy and the views are writable private copies
    np.testing.assert_array_equal(info.lambda_grid2, info.lambda_grid)
    info.X_train[0, 0] = 123.0
    assert panel48.X[t - 1 - w, 0] != 123.0


def test_build_info_short_history_clips_window(panel48, short_grid):
    info = build_info(panel48, t=4, w=20, grid=short_grid)
    assert info.n_train == 3
    np.testing.assert_array_equal(info.X_train, info.X_history)


def test_build_info_validation(panel48, short_grid):
    with pytest.raises(ValidationError):
        build_info(panel48, 1, 20, short_grid)
    with pytest.raises(ValidationError):
        build_info(panel48, panel48.T + 1, 20, short_grid)
    with pytest.raises(ValidationError):
        build_info(panel48, 10, 0, short_grid)
    with pytest.raises(ValidationError):
        build_info(panel48, 10, 20, short_grid[::-1])   # ascending grid
    with pytest.raises(ValidationError):
        build_info(panel48, 10, 20, [1.0, -1.0])
    with pytest.raises(ValidationError):
        build_info(panel48, "10", 20, short_grid)


def test_synthetic_panel_deterministic():
    a = synthetic_panel(T=20, K=4, seed=9)
    b = synthetic_panel(T=20, K=4, seed=9)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)
    assert a.dates[0] == "2010Q1" and len(a.dates) == 20
    c = synthetic_panel(T=20, K=4, seed=10)
    assert not np.array_equal(a.X, c.X)
