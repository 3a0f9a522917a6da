import csv
from fractions import Fraction

import pytest

from pseudomix_plots.cli import parse_and_dispatch
from pseudomix_plots.figures import (
    FigureSpec,
    SchemaError,
    extract_series,
    render,
    stair_jump_positions,
)

Q = Fraction(3, 20)


def test_stair_jumps_for_q_015():
    assert stair_jump_positions(Q, list(range(1, 17))) == [7, 14]


def test_stair_jumps_follow_exact_floors():
    # q = 1/6: allowance increments exactly at multiples of 6
    assert stair_jump_positions(Fraction(1, 6), list(range(1, 19))) == [6, 12, 18]


def test_error_vs_k_extraction_matches_csv(experiment_csvs):
    path = experiment_csvs / "aggregate.csv"
    spec = FigureSpec("error-vs-k", (str(path),), str(experiment_csvs / "f1.png"))
    series = render(spec)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert series["k"] == [int(r["k"]) for r in rows]
    assert series["error_rate"] == [float(r["error_rate"]) for r in rows]
    assert series["wilson_hi"] == [float(r["wilson_hi"]) for r in rows]
    empties = [r["bound_noiseless"] == "" for r in rows]
    assert [v is None for v in series["bound_noiseless"]] == empties
    assert (experiment_csvs / "f1.png").stat().st_size > 0


def test_l1_contribution_renders_with_verticals(experiment_csvs):
    path = experiment_csvs / "aggregate.csv"
    spec = FigureSpec("l1-contribution", (str(path),), str(experiment_csvs / "f2.png"))
    series = render(spec, Q)
    assert series["jumps"] == [7, 14]
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert series["l1_rate"] == [
        int(r["errors_from_l1"]) / int(r["reps"]) for r in rows
    ]
    assert (experiment_csvs / "f2.png").stat().st_size > 0


def test_l1_contribution_detects_inconsistent_q(experiment_csvs):
    path = experiment_csvs / "aggregate.csv"
    spec = FigureSpec("l1-contribution", (str(path),), str(experiment_csvs / "f2b.png"))
    with pytest.raises(SchemaError):
        extract_series(spec, Fraction(1, 3))


def test_lmax_sweep_extraction(experiment_csvs):
    path = experiment_csvs / "lmax_sweep.csv"
    spec = FigureSpec("lmax-sweep", (str(path),), str(experiment_csvs / "f3.png"))
    series = render(spec)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert series["lmax"] == [int(r["lmax"]) for r in rows]
    assert series["error_rate"] == [float(r["error_rate"]) for r in rows]
    assert (experiment_csvs / "f3.png").stat().st_size > 0


def test_extraction_is_pure(experiment_csvs):
    spec = FigureSpec(
        "error-vs-k",
        (str(experiment_csvs / "aggregate.csv"),),
        str(experiment_csvs / "unused.png"),
    )
    assert extract_series(spec) == extract_series(spec)


def test_missing_column_is_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("k,error_rate\n1,0.5\n")
    spec = FigureSpec("error-vs-k", (str(bad),), str(tmp_path / "x.png"))
    with pytest.raises(SchemaError) as err:
        extract_series(spec)
    assert "wilson_lo" in str(err.value)


def test_unknown_figure_id_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec("volcano", ("a.csv",), "x.png")


def test_cli_renders_all_figures(experiment_csvs, tmp_path):
    agg = str(experiment_csvs / "aggregate.csv")
    sweep = str(experiment_csvs / "lmax_sweep.csv")
    assert parse_and_dispatch(
        ["error-vs-k", "--in", agg, "--out", str(tmp_path / "a.png")]
    ) == 0
    assert parse_and_dispatch(
        ["l1-contribution", "--q", "0.15", "--in", agg, "--out", str(tmp_path / "b.png")]
    ) == 0
    assert parse_and_dispatch(
        ["lmax-sweep", "--in", sweep, "--out", str(tmp_path / "c.png")]
    ) == 0
    for name in ("a.png", "b.png", "c.png"):
        assert (tmp_path / name).stat().st_size > 0


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("k\n1\n")
    assert parse_and_dispatch(["error-vs-k", "--in", str(bad), "--out", str(tmp_path / "x.png")]) == 2
    assert parse_and_dispatch(["error-vs-k"]) == 1
    assert parse_and_dispatch(["volcano", "--in", str(bad), "--out", "x.png"]) == 1


def test_secondary_acceptance(experiment_csvs, tmp_path):
    """All three figures render from producer CSVs; the verticals land at
    k = 7 and k = 14 for q = 0.15; extraction equals the CSV content."""
    agg = experiment_csvs / "aggregate.csv"
    sweep = experiment_csvs / "lmax_sweep.csv"
    outputs = {}
    outputs["error-vs-k"] = render(
        FigureSpec("error-vs-k", (str(agg),), str(tmp_path / "accept1.png"))
    )
    outputs["l1-contribution"] = render(
        FigureSpec("l1-contribution", (str(agg),), str(tmp_path / "accept2.png")), Q
    )
    outputs["lmax-sweep"] = render(
        FigureSpec("lmax-sweep", (str(sweep),), str(tmp_path / "accept3.png"))
    )
    assert outputs["l1-contribution"]["jumps"] == [7, 14]
    with open(agg, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert outputs["error-vs-k"]["error_rate"] == [float(r["error_rate"]) for r in rows]
    for i in (1, 2, 3):
        assert (tmp_path / f"accept{i}.png").stat().st_size > 0
    print("\n[acceptance] secondary plots: PASS", flush=True)
