"""Scenario orchestration: from input tables to files on disk."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .compare import ari_matrix
from .dissimilarity import (
    FeatureTable,
    feature_dissimilarity,
    mix_dissimilarities,
    normalize_matrix,
    standardize_features,
)
from .geometry import GeoPoint, geodesic_matrix
from .hierarchy import agglomerate, cut, explained_inertia, weighted_explained
from .io import (
    InputError,
    geojson_points,
    ingest,
    read_assignments,
    write_json,
    write_matrix,
    write_table,
)
from .tuner import CRITERIA, TuningGrid, inertia_curve, tune
from .validity import evaluate_indices

__all__ = [
    "ScenarioError",
    "Scenario",
    "ClusterSummary",
    "prepare_matrices",
    "cluster_summary",
    "run",
    "compare_runs",
    "load_scenarios",
]


class ScenarioError(RuntimeError):
    """Failure while running a named scenario."""


@dataclass(frozen=True)
class Scenario:
    """One clustering configuration.

    Either both ``alpha`` and ``k`` are fixed, or ``grid`` drives a tuning
    run. ``summary_variable`` names the column described per cluster; it
    defaults to the first feature column.
    """

    name: str
    feature_columns: tuple
    alpha: float | None = None
    k: int | None = None
    grid: TuningGrid | None = None
    index_matrix: str = "mixed"
    mix: str = "linear"
    summary_variable: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "feature_columns", tuple(self.feature_columns))
        if not self.feature_columns:
            raise ValueError(f"scenario {self.name!r}: no feature columns")
        fixed = self.alpha is not None and self.k is not None
        partial = (self.alpha is None) != (self.k is None)
        if partial or fixed == (self.grid is not None):
            raise ValueError(
                f"scenario {self.name!r}: set either both alpha and k, or a tuning grid"
            )

    @property
    def tuned(self) -> bool:
        return self.grid is not None


@dataclass
class ClusterSummary:
    """Descriptive statistics of one variable within each cluster."""

    variable: str
    rows: list[dict] = field(default_factory=list)

    HEADER = ("cluster", "count", "mean", "sd", "min", "median", "max")

    def table(self) -> list[list]:
        return [[r[h] for h in self.HEADER] for r in self.rows]


def cluster_summary(labels, values, variable: str = "value") -> ClusterSummary:
    """Count, mean, sample sd (0 for singletons), min, median and max per cluster."""
    labels = np.asarray(labels)
    values = np.asarray(values, dtype=float)
    if labels.shape != values.shape:
        raise ValueError("labels and values differ in length")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"missing values in {variable}")
    out = ClusterSummary(variable=variable)
    for k in np.unique(labels):
        v = values[labels == k]
        out.rows.append(
            {
                "cluster": int(k),
                "count": int(v.size),
                "mean": float(v.mean()),
                "sd": float(v.std(ddof=1)) if v.size > 1 else 0.0,
                "min": float(v.min()),
                "median": float(np.median(v)),
                "max": float(v.max()),
            }
        )
    return out


def prepare_matrices(table: FeatureTable, points: Sequence[GeoPoint], standardize: bool = True):
    """Normalized feature and geographic matrices for a table and its locations."""
    if len(points) != table.n:
        raise ValueError(f"{len(points)} locations for {table.n} observations")
    t = standardize_features(table) if standardize else table
    D0n = normalize_matrix(feature_dissimilarity(t))
    D1n = normalize_matrix(geodesic_matrix(points))
    return D0n, D1n


def _outputs(out_dir, name) -> Path:
    path = Path(out_dir) / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def run(
    scenario: Scenario,
    table: FeatureTable,
    points: Sequence[GeoPoint],
    out_dir,
    summary_values=None,
    n_jobs: int = 1,
) -> dict:
    """Cluster (or tune, then cluster) one scenario and write its artifacts.

    Files land in ``out_dir/<scenario name>/``: ``report.json``,
    ``assignments.csv``, ``clusters.geojson``, ``dendrogram.nwk``,
    ``dendrogram.txt``, ``inertia_curve.csv``, ``summary.csv`` and, for tuned
    scenarios, ``alpha_curves.csv``.

    ``summary_values`` supplies the summarized variable when it is not
    among the feature columns.

    Returns the in-memory results (labels, report dictionary, paths).
    """
    try:
        return _run(scenario, table, points, out_dir, summary_values, n_jobs)
    except (ValueError, KeyError, IndexError) as exc:
        raise ScenarioError(f"{scenario.name}: {exc}") from exc


def _run(scenario, table, points, out_dir, summary_values, n_jobs):
    features = table.select(scenario.feature_columns)
    D0n, D1n = prepare_matrices(features, points)
    w = table.weights
    out = _outputs(out_dir, scenario.name)

    report: dict = {"scenario": scenario.name, "features": list(scenario.feature_columns), "n": table.n}
    if scenario.tuned:
        tuning = tune(D0n, D1n, w, scenario.grid, scenario.index_matrix, scenario.mix, n_jobs=n_jobs)
        sel = tuning.selected
        alpha, K = sel["alpha_star"], sel["k_star"]
        report["tuning"] = tuning.to_dict()
        rows = []
        for k in tuning.grid.ks:
            for r in tuning.curves[k].rows():
                rows.append([k] + list(r.values()))
        write_table(
            out / "alpha_curves.csv",
            ["k", "alpha", "q_d0", "q_d1", "q_d0_norm", "q_d1_norm", "q_bar"],
            rows,
        )
        rows = []
        for k in tuning.grid.ks:
            for c in CRITERIA:
                for name, value in tuning.indices[k][c].items():
                    rows.append(
                        [k, c, tuning.alpha_star[k][c], name, value, tuning.baseline[k][name],
                         tuning.gain_loss[k][c][name], tuning.verdicts[k][c][name]]
                    )
        write_table(
            out / "indices.csv",
            ["k", "criterion", "alpha", "index", "value", "baseline", "gain_loss_percent", "verdict"],
            rows,
        )
    else:
        alpha, K = float(scenario.alpha), int(scenario.k)

    D = mix_dissimilarities(D0n, D1n, alpha, mode=scenario.mix)
    tree = agglomerate(D, w, labels=table.ids)
    labels = cut(tree, K)
    index_D = D if scenario.index_matrix == "mixed" else D0n
    report["result"] = {
        "alpha": alpha,
        "k": K,
        "q_d0": explained_inertia(labels, D0n, w),
        "q_d1": explained_inertia(labels, D1n, w),
        "q_bar": weighted_explained(labels, D0n, D1n, w),
        "indices": evaluate_indices(index_D, labels) if 2 <= K < table.n else {},
    }
    write_json(out / "report.json", report)

    write_table(out / "assignments.csv", ["id", "cluster"], zip(table.ids, labels))
    write_json(out / "clusters.geojson", geojson_points(table.ids, points, labels, scenario.name))
    (out / "dendrogram.nwk").write_text(tree.to_newick() + "\n", encoding="utf-8")
    (out / "dendrogram.txt").write_text(tree.to_text(), encoding="utf-8")

    k_top = min(table.n, max(15, K))
    write_table(out / "inertia_curve.csv", ["k", "within_inertia"], inertia_curve(D, w, k_top))

    variable = scenario.summary_variable or scenario.feature_columns[0]
    if summary_values is None:
        if variable not in table.feature_names:
            raise KeyError(f"summary variable {variable!r} not available")
        summary_values = table.column(variable)
    summary = cluster_summary(labels, summary_values, variable)
    write_table(out / "summary.csv", ClusterSummary.HEADER, summary.table())

    return {
        "labels": labels,
        "alpha": alpha,
        "k": K,
        "dendrogram": tree,
        "report": report,
        "summary": summary,
        "dir": out,
    }


def compare_runs(assignment_files: Sequence, out_path=None, names: Sequence[str] | None = None):
    """ARI matrix between assignment CSV files over the same ids.

    Returns ``(names, matrix)``; with ``out_path`` the matrix is also
    written as CSV.
    """
    if not assignment_files:
        raise InputError("no assignment files given")
    maps = [read_assignments(p) for p in assignment_files]
    ids = list(maps[0])
    for path, m in zip(assignment_files, maps):
        if set(m) != set(ids):
            diff = sorted(set(m) ^ set(ids))
            raise InputError(f"{path}: id set differs from {assignment_files[0]}: {', '.join(diff)}")
    if names is None:
        names = [_run_name(p) for p in assignment_files]
    parts = [[m[i] for i in ids] for m in maps]
    _, M = ari_matrix(parts)
    if out_path is not None:
        write_matrix(out_path, names, M)
    return list(names), M


def _run_name(path) -> str:
    p = Path(path)
    # out/<scenario>/assignments.csv -> scenario
    return p.parent.name if p.stem == "assignments" and p.parent.name else p.stem


_SCENARIO_KEYS = {
    "features", "coords", "id_col", "lat_col", "lon_col", "weight_col", "columns", "alpha", "k",
    "k_min", "k_max", "alpha_step", "index_matrix", "mix", "summary", "out_dir",
}


def load_scenarios(path) -> list[tuple[Scenario, dict]]:
    """Read an INI file with one section per scenario.

    Keys: ``features``, ``coords``, ``id_col``, ``lat_col``, ``lon_col``,
    ``weight_col``, ``columns`` (comma separated), ``alpha`` and ``k`` for a
    fixed run, or ``k_min``, ``k_max``, ``alpha_step`` for a tuning run,
    plus ``index_matrix``, ``mix``, ``summary`` and ``out_dir``. Values in
    ``[DEFAULT]`` apply to every section; relative paths are resolved
    against the file's directory.

    Returns ``(scenario, inputs)`` pairs where ``inputs`` holds the file
    locations and column names.
    """
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise InputError(f"cannot read scenario file {path}")
    base = os.path.dirname(os.path.abspath(path))
    out = []
    for name in parser.sections():
        sec = parser[name]
        unknown = set(sec) - _SCENARIO_KEYS
        if unknown:
            raise InputError(f"[{name}]: unknown keys: {', '.join(sorted(unknown))}")
        if "features" not in sec or "columns" not in sec:
            raise InputError(f"[{name}]: 'features' and 'columns' are required")

        def resolve(p):
            return p if os.path.isabs(p) else os.path.join(base, p)

        inputs = {
            "features": resolve(sec["features"]),
            "coords": resolve(sec["coords"]) if sec.get("coords") else None,
            "id_col": sec.get("id_col", "id"),
            "lat_col": sec.get("lat_col", "lat"),
            "lon_col": sec.get("lon_col", "lon"),
            "weight_col": sec.get("weight_col") or None,
            "out_dir": resolve(sec.get("out_dir", "out")),
        }
        columns = [c.strip() for c in sec["columns"].split(",") if c.strip()]
        if "alpha" in sec or "k" in sec:
            kwargs = {"alpha": sec.getfloat("alpha"), "k": sec.getint("k")}
        else:
            kwargs = {
                "grid": TuningGrid.regular(
                    step=sec.getfloat("alpha_step", 0.01),
                    k_min=sec.getint("k_min", 2),
                    k_max=sec.getint("k_max", 15),
                )
            }
        scenario = Scenario(
            name=name,
            feature_columns=columns,
            index_matrix=sec.get("index_matrix", "mixed"),
            mix=sec.get("mix", "linear"),
            summary_variable=sec.get("summary") or None,
            **kwargs,
        )
        out.append((scenario, inputs))
    return out


def ingest_for(scenario: Scenario, inputs: dict) -> tuple[FeatureTable, list[GeoPoint]]:
    """Ingest exactly the columns a scenario needs (features plus summary variable)."""
    cols = list(scenario.feature_columns)
    if scenario.summary_variable and scenario.summary_variable not in cols:
        cols.append(scenario.summary_variable)
    return ingest(
        inputs["features"],
        inputs.get("coords"),
        id_col=inputs.get("id_col", "id"),
        lat_col=inputs.get("lat_col", "lat"),
        lon_col=inputs.get("lon_col", "lon"),
        feature_columns=cols,
        weight_col=inputs.get("weight_col"),
    )
