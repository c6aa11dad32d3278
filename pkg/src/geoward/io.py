"""CSV ingestion and CSV/JSON/GeoJSON/Newick emission.

All numbers are written with 12 significant digits. Non-finite values are
written as the strings ``inf``, ``-inf`` and ``nan`` in JSON documents.
"""

from __future__ import annotations

import csv
import json
import math
import os
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dissimilarity import FeatureTable
from .geometry import GeoPoint

__all__ = [
    "InputError",
    "ingest",
    "read_assignments",
    "write_features",
    "write_table",
    "write_matrix",
    "write_json",
    "to_json",
    "geojson_points",
    "newick_leaf_order",
    "fmt",
]


class InputError(ValueError):
    """Malformed or inconsistent input data."""


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return "" if x is None else str(x)


def _read_csv(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"{path}: empty file")
        header = [h.strip() for h in reader.fieldnames]
        rows = [{k.strip(): (v or "").strip() for k, v in row.items() if k is not None} for row in reader]
    return header, rows


def _require(header, cols, path):
    missing = [c for c in cols if c not in header]
    if missing:
        raise InputError(f"{path}: missing columns: {', '.join(missing)}")


def _index_rows(rows, id_col, path) -> dict[str, dict]:
    out: dict[str, dict] = {}
    dup = []
    for row in rows:
        key = row[id_col]
        if key == "":
            raise InputError(f"{path}: row with empty id")
        if key in out:
            dup.append(key)
        out[key] = row
    if dup:
        raise InputError(f"{path}: duplicate ids: {', '.join(sorted(set(dup)))}")
    return out


def _numeric(value: str):
    if value == "" or value.lower() in ("na", "nan", "null"):
        return None
    return float(value)


def _is_numeric_column(rows, col) -> bool:
    for row in rows:
        v = row[col]
        if v == "" or v.lower() in ("na", "nan", "null"):
            continue
        try:
            float(v)
        except ValueError:
            return False
    return True


def ingest(
    features_path,
    coords_path=None,
    id_col: str = "id",
    lat_col: str = "lat",
    lon_col: str = "lon",
    feature_columns: Sequence[str] | None = None,
    weight_col: str | None = None,
) -> tuple[FeatureTable, list[GeoPoint]]:
    """Read a feature table and per-row coordinates.

    Coordinates come from ``coords_path`` when given (joined on ``id_col``)
    and from the feature file otherwise. When ``feature_columns`` is omitted
    every numeric column except id, coordinates and weight is used. Rows are
    kept in the order of the feature file. Weights, if a column is named,
    are rescaled to sum to one.

    Raises
    ------
    InputError
        On missing columns, duplicate ids, unparseable numbers, rows with
        missing values or id sets that differ between the two files.
    """
    header, rows = _read_csv(features_path)
    _require(header, [id_col], features_path)
    by_id = _index_rows(rows, id_col, features_path)
    ids = list(by_id)

    if coords_path is None:
        _require(header, [lat_col, lon_col], features_path)
        coord_rows = by_id
    else:
        cheader, crows = _read_csv(coords_path)
        _require(cheader, [id_col, lat_col, lon_col], coords_path)
        coord_rows = _index_rows(crows, id_col, coords_path)
        if set(coord_rows) != set(by_id):
            diff = sorted(set(coord_rows) ^ set(by_id))
            raise InputError(f"id sets differ between feature and coordinate files: {', '.join(diff)}")

    reserved = {id_col, weight_col} | ({lat_col, lon_col} if coords_path is None else set())
    if feature_columns is None:
        feature_columns = [c for c in header if c not in reserved and _is_numeric_column(rows, c)]
    feature_columns = list(feature_columns)
    if not feature_columns:
        raise InputError(f"{features_path}: no feature columns selected")
    _require(header, feature_columns + ([weight_col] if weight_col else []), features_path)

    values = np.empty((len(ids), len(feature_columns)))
    incomplete = []
    for r, key in enumerate(ids):
        row = by_id[key]
        for c, col in enumerate(feature_columns):
            try:
                v = _numeric(row[col])
            except ValueError:
                raise InputError(f"{features_path}: row {key}: cannot parse {col}={row[col]!r}") from None
            if v is None:
                incomplete.append(key)
                break
            values[r, c] = v
    if incomplete:
        raise InputError(f"{features_path}: missing values in rows: {', '.join(incomplete)}")

    points = []
    for key in ids:
        row = coord_rows[key]
        try:
            points.append(GeoPoint(float(row[lat_col]), float(row[lon_col])))
        except ValueError as exc:
            raise InputError(f"row {key}: invalid coordinates: {exc}") from None

    weights = None
    if weight_col:
        try:
            raw = np.array([float(by_id[k][weight_col]) for k in ids])
        except ValueError:
            raise InputError(f"{features_path}: unparseable weights in column {weight_col}") from None
        if np.any(raw < 0) or not raw.sum() > 0:
            raise InputError("weights must be nonnegative with a positive total")
        weights = raw / raw.sum()

    table = FeatureTable(ids=ids, feature_names=feature_columns, values=values, weights=weights)
    return table, points


def write_features(path, table: FeatureTable, points: Sequence[GeoPoint] | None = None,
                   id_col: str = "id", lat_col: str = "lat", lon_col: str = "lon") -> None:
    """Inverse of :func:`ingest` for a table with a single coordinate file."""
    header = [id_col] + ([lat_col, lon_col] if points is not None else []) + list(table.feature_names)
    rows = []
    for i, key in enumerate(table.ids):
        coords = [points[i].lat, points[i].lon] if points is not None else []
        rows.append([key] + coords + [float(v) for v in table.values[i]])
    write_table(path, header, rows)


def read_assignments(path, id_col: str = "id", label_col: str = "cluster") -> dict[str, int]:
    header, rows = _read_csv(path)
    _require(header, [id_col, label_col], path)
    by_id = _index_rows(rows, id_col, path)
    try:
        return {k: int(row[label_col]) for k, row in by_id.items()}
    except ValueError:
        raise InputError(f"{path}: non-integer cluster labels") from None


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])


def write_matrix(path, names: Sequence[str], M) -> None:
    """Square matrix with a header row and a leading name column."""
    M = np.asarray(M)
    write_table(path, [""] + list(names), ([name] + list(M[i]) for i, name in enumerate(names)))


def to_json(obj):
    """Recursively convert numpy scalars/arrays and round floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return float(format(x, ".12g"))
    return obj


def write_json(path, obj) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    Path(path).write_text(json.dumps(to_json(obj), indent=2) + "\n", encoding="utf-8")


def geojson_points(ids, points: Sequence[GeoPoint], labels, scenario: str, extra=None) -> dict:
    """FeatureCollection of points carrying ``id``, ``cluster`` and ``scenario``."""
    features = []
    for i, (key, p, lab) in enumerate(zip(ids, points, labels)):
        props = {"id": key, "cluster": int(lab), "scenario": scenario}
        if extra:
            props.update({k: v[i] for k, v in extra.items()})
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [p.lon, p.lat]},
                "properties": props,
            }
        )
    return {"type": "FeatureCollection", "features": features}


_NEWICK_TOKEN = re.compile(r"'((?:[^']|'')*)'|([^()\[\]:;,\s]+)|(:[^,();]*)|([(),;])")


def newick_leaf_order(text: str) -> list[str]:
    """Leaf labels of a Newick string, left to right."""
    leaves = []
    prev = None
    for m in _NEWICK_TOKEN.finditer(text):
        quoted, bare, length, punct = m.groups()
        if length is not None:
            prev = "length"
            continue
        if punct is not None:
            prev = punct
            continue
        label = quoted.replace("''", "'") if quoted is not None else bare
        # a name right after ')' labels an internal node
        if prev in (None, "(", ","):
            leaves.append(label)
        prev = "label"
    return leaves
