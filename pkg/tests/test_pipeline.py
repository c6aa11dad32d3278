import json

import numpy as np
import pytest

from geoward.datasets import toy_path
from geoward.io import read_assignments
from geoward.pipeline import Scenario, ScenarioError, cluster_summary, compare_runs, ingest_for, load_scenarios, run
from geoward.tuner import TuningGrid

INPUTS = {"features": toy_path()}
ARTIFACTS = {
    "report.json", "assignments.csv", "clusters.geojson", "dendrogram.nwk",
    "dendrogram.txt", "inertia_curve.csv", "summary.csv",
}


def _run(tmp_path, **kw):
    scenario = Scenario(name=kw.pop("name", "s"), feature_columns=["aware_low", "hdi"], **kw)
    table, points = ingest_for(scenario, INPUTS)
    return run(scenario, table, points, tmp_path)


def test_scenario_requires_fixed_or_grid():
    with pytest.raises(ValueError):
        Scenario(name="x", feature_columns=["a"])
    with pytest.raises(ValueError):
        Scenario(name="x", feature_columns=["a"], alpha=0.3)
    with pytest.raises(ValueError):
        Scenario(name="x", feature_columns=["a"], alpha=0.3, k=2, grid=TuningGrid())


def test_fixed_run_writes_consistent_artifacts(tmp_path):
    result = _run(tmp_path, alpha=0.4, k=2, summary_variable="tas")
    out = tmp_path / "s"
    assert ARTIFACTS <= {p.name for p in out.iterdir()}
    labels = read_assignments(out / "assignments.csv")
    geo = json.loads((out / "clusters.geojson").read_text())
    assert {f["properties"]["id"]: f["properties"]["cluster"] for f in geo["features"]} == labels
    report = json.loads((out / "report.json").read_text())
    assert report["result"]["k"] == 2 and report["result"]["alpha"] == 0.4
    assert sorted(np.bincount(result["labels"])[1:]) == [10, 10]
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0] == "cluster,count,mean,sd,min,median,max"
    assert len(summary) == 3


def test_tuned_run_is_byte_identical(tmp_path):
    grid = TuningGrid.regular(0.05, 2, 6)
    _run(tmp_path / "a", grid=grid)
    _run(tmp_path / "b", grid=grid)
    for name in ARTIFACTS | {"alpha_curves.csv", "indices.csv"}:
        assert (tmp_path / "a" / "s" / name).read_bytes() == (tmp_path / "b" / "s" / name).read_bytes(), name


def test_tuned_run_selects_two(tmp_path):
    result = _run(tmp_path, grid=TuningGrid.regular(0.05, 2, 8))
    assert result["k"] == 2
    curves = (tmp_path / "s" / "alpha_curves.csv").read_text().splitlines()
    assert curves[0] == "k,alpha,q_d0,q_d1,q_d0_norm,q_d1_norm,q_bar"
    assert len(curves) == 1 + 7 * 21


def test_errors_name_the_scenario(tmp_path):
    scenario = Scenario(name="broken", feature_columns=["aware_low", "hdi"], alpha=0.5, k=50)
    table, points = ingest_for(scenario, INPUTS)
    with pytest.raises(ScenarioError, match="^broken:"):
        run(scenario, table, points, tmp_path)


def test_cluster_summary_statistics():
    s = cluster_summary([1, 1, 1, 2], [1.0, 2.0, 6.0, 5.0], "x")
    rows = {r["cluster"]: r for r in s.rows}
    assert rows[1]["count"] == 3 and rows[1]["mean"] == 3.0 and rows[1]["median"] == 2.0
    assert rows[1]["sd"] == pytest.approx(np.std([1, 2, 6], ddof=1))
    assert rows[2]["sd"] == 0.0


def test_compare_runs_names_from_directories(tmp_path):
    _run(tmp_path, name="geo", alpha=1.0, k=2)
    _run(tmp_path, name="feat", alpha=0.0, k=2)
    _run(tmp_path, name="fine", alpha=0.0, k=4)
    files = [tmp_path / n / "assignments.csv" for n in ("geo", "feat", "fine")]
    names, M = compare_runs(files, out_path=tmp_path / "ari.csv")
    assert names == ["geo", "feat", "fine"]
    assert M[0, 1] == 1.0
    assert M[0, 2] < 1.0
    assert (tmp_path / "ari.csv").read_text().startswith(",geo,feat,fine\n")


def test_load_scenarios(tmp_path):
    ini = tmp_path / "runs.ini"
    ini.write_text(
        f"[DEFAULT]\nfeatures = {toy_path()}\ncolumns = aware_low, hdi\nout_dir = results\n\n"
        "[fixed]\nalpha = 0.3\nk = 3\n\n[tuned]\nk_min = 2\nk_max = 4\nalpha_step = 0.1\nsummary = tas\n"
    )
    loaded = load_scenarios(ini)
    assert [s.name for s, _ in loaded] == ["fixed", "tuned"]
    fixed, inputs = loaded[0]
    assert fixed.alpha == 0.3 and fixed.k == 3 and not fixed.tuned
    assert inputs["out_dir"] == str(tmp_path / "results")
    tuned, _ = loaded[1]
    assert tuned.grid.k_max == 4 and len(tuned.grid.alphas) == 11 and tuned.summary_variable == "tas"


def test_load_scenarios_rejects_unknown_keys(tmp_path):
    ini = tmp_path / "runs.ini"
    ini.write_text("[x]\nfeatures = a.csv\ncolumns = a\nalpah = 0.2\nk = 2\n")
    with pytest.raises(ValueError, match="alpah"):
        load_scenarios(ini)
