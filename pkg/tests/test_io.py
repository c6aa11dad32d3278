import json
import math

import numpy as np
import pytest

from geoward.datasets import make_toy_countries, toy_path, write_toy_csv
from geoward.io import InputError, fmt, geojson_points, ingest, newick_leaf_order, to_json, write_features
from geoward import GeoPoint, agglomerate
from conftest import euclidean


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_bundled_csv_matches_generator(tmp_path):
    fresh = tmp_path / "toy.csv"
    write_toy_csv(fresh)
    assert fresh.read_text() == toy_path().read_text()


def test_toy_shares_are_valid_proportions():
    rows = make_toy_countries()
    assert len(rows) == 20
    for r in rows:
        assert 0 <= r["aware_low"] <= 1 and 0 <= r["hdi"] <= 1
        assert r["aware_low"] + r["aware_high"] == pytest.approx(1.0)


def test_ingest_defaults_to_numeric_columns():
    table, points = ingest(toy_path())
    assert list(table.feature_names) == ["aware_low", "aware_high", "hdi", "tas"]
    assert table.n == len(points) == 20
    assert table.ids[0] == "T01"


def test_round_trip(tmp_path):
    table, points = ingest(toy_path(), feature_columns=["hdi", "tas"])
    out = tmp_path / "copy.csv"
    write_features(out, table, points)
    again, pts = ingest(out)
    assert list(again.ids) == list(table.ids)
    np.testing.assert_allclose(again.values, table.values, rtol=1e-11)
    assert [(p.lat, p.lon) for p in pts] == pytest.approx([(p.lat, p.lon) for p in points], rel=1e-11)


def test_separate_coordinate_file(tmp_path):
    f = write(tmp_path / "f.csv", "code,x\nA,1\nB,2\nC,4\n")
    c = write(tmp_path / "c.csv", "code,latitude,longitude\nC,0,2\nA,0,0\nB,0,1\n")
    table, points = ingest(f, c, id_col="code", lat_col="latitude", lon_col="longitude")
    assert list(table.ids) == ["A", "B", "C"]
    assert [p.lon for p in points] == [0, 1, 2]


def test_weights_are_rescaled(tmp_path):
    f = write(tmp_path / "f.csv", "id,lat,lon,x,pop\nA,0,0,1,2\nB,0,1,2,6\n")
    table, _ = ingest(f, feature_columns=["x"], weight_col="pop")
    np.testing.assert_allclose(table.weights, [0.25, 0.75])


@pytest.mark.parametrize(
    "text, match",
    [
        ("id,lat,lon,x\nA,0,0,1\nA,0,1,2\n", "duplicate ids: A"),
        ("id,lat,x\nA,0,1\nB,0,2\n", "missing columns: lon"),
        ("id,lat,lon,x\nA,0,0,1\nB,0,1,abc\n", "cannot parse x"),
        ("id,lat,lon,x\nA,0,0,1\nB,0,1,\nC,0,2,NA\n", "missing values in rows: B, C"),
        ("id,lat,lon,x\nA,95,0,1\nB,0,1,2\n", "invalid coordinates"),
    ],
)
def test_ingest_errors(tmp_path, text, match):
    f = write(tmp_path / "bad.csv", text)
    with pytest.raises(InputError, match=match):
        ingest(f, feature_columns=["x"])


def test_id_mismatch_is_listed(tmp_path):
    f = write(tmp_path / "f.csv", "id,x\nA,1\nB,2\n")
    c = write(tmp_path / "c.csv", "id,lat,lon\nA,0,0\nZ,0,1\n")
    with pytest.raises(InputError, match="B, Z"):
        ingest(f, c)


def test_fmt_and_json_encoding():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(np.int64(4)) == "4"
    encoded = to_json({"a": np.float64(math.inf), "b": [np.nan, -math.inf], "c": np.arange(2)})
    assert encoded == {"a": "inf", "b": ["nan", "-inf"], "c": [0, 1]}
    json.dumps(encoded, allow_nan=False)


def test_geojson_uses_lon_lat_order():
    doc = geojson_points(["a"], [GeoPoint(10.0, 20.0)], [3], "s")
    feat = doc["features"][0]
    assert feat["geometry"]["coordinates"] == [20.0, 10.0]
    assert feat["properties"] == {"id": "a", "cluster": 3, "scenario": "s"}


def test_newick_leaf_order_round_trip():
    names = ["x", "it's", "a b", "c"]
    tree = agglomerate(euclidean([0.0, 1.0, 10.0, 11.0]), labels=names)
    leaves = newick_leaf_order(tree.to_newick())
    assert leaves == tree.leaf_names()
    assert sorted(leaves) == sorted(names)
