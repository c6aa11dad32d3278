"""Bundled synthetic country-level dataset.

Twenty fictitious countries in two regions (central Europe, east Africa).
Inside each region the countries sit on a jittered hexagonal patch; the
two clustering features are affine images of the same planar offsets, so
feature-space and geographic structure agree at every scale. A third
feature, ``tas``, is unrelated noise for robustness scenarios.
"""

from __future__ import annotations

import csv
from importlib import resources

import numpy as np

__all__ = ["TOY_COLUMNS", "make_toy_countries", "toy_path", "write_toy_csv"]

TOY_COLUMNS = ("id", "name", "lat", "lon", "aware_low", "aware_high", "hdi", "tas")

_KM_PER_DEGREE = 111.195
_HEX = np.array(
    [
        [0.0, 0.0], [1.0, 0.0], [2.0, 0.0],
        [0.5, 0.866], [1.5, 0.866], [2.5, 0.866],
        [0.0, 1.732], [1.0, 1.732], [2.0, 1.732],
        [1.0, 2.598],
    ]
)
_CENTERS = ((48.0, 10.0), (-2.0, 25.0))
_SEPARATION = 20.0
_SPACING_KM = 120.0


def make_toy_countries(seed: int = 1, jitter: float = 0.12) -> list[dict]:
    """Generate the toy table as a list of row dicts (ids ``T01``..``T20``)."""
    rng = np.random.default_rng(seed)
    offsets = []
    for _ in _CENTERS:
        o = _HEX + rng.normal(0.0, jitter, _HEX.shape)
        offsets.append(o - o.mean(axis=0))
    offsets = np.vstack(offsets)
    offsets /= offsets.std(axis=0)
    tas = rng.normal(20.0, 4.0, len(offsets))

    rows = []
    per_region = len(_HEX)
    for r, (lat0, lon0) in enumerate(_CENTERS):
        sign = 1.0 if r == 0 else -1.0
        for k in range(per_region):
            i = r * per_region + k
            x, y = offsets[i]
            a = sign * _SEPARATION + x
            b = sign * _SEPARATION + y
            aware_low = 0.5 - 0.012 * a
            rows.append(
                {
                    "id": f"T{i + 1:02d}",
                    "name": f"{'Nordia' if r == 0 else 'Austra'} {k + 1}",
                    "lat": lat0 + y * _SPACING_KM / _KM_PER_DEGREE,
                    "lon": lon0 + x * _SPACING_KM / (_KM_PER_DEGREE * np.cos(np.radians(lat0))),
                    "aware_low": aware_low,
                    "aware_high": 1.0 - aware_low,
                    "hdi": 0.7 + 0.01 * b,
                    "tas": tas[i],
                }
            )
    return rows


def toy_path():
    """Path of the bundled CSV copy of :func:`make_toy_countries`."""
    return resources.files("geoward") / "data" / "toy_countries.csv"


def write_toy_csv(path, rows=None) -> None:
    rows = make_toy_countries() if rows is None else rows
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TOY_COLUMNS)
        for row in rows:
            writer.writerow(
                [row[c] if isinstance(row[c], str) else format(float(row[c]), ".12g") for c in TOY_COLUMNS]
            )
