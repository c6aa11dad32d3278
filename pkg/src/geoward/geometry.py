"""Great-circle distances between points given in decimal degrees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["GeoPoint", "EarthModel", "geodesic_distance", "geodesic_matrix"]


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"non-finite coordinate: ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class EarthModel:
    """Spherical Earth. ``radius`` is in kilometers (IUGG mean radius by default)."""

    radius: float = 6371.0088

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")


MEAN_EARTH = EarthModel()


def _haversine(lat1, lon1, lat2, lon2, radius):
    # inputs in radians; works elementwise on arrays
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    h = np.clip(h, 0.0, 1.0)
    return 2.0 * radius * np.arcsin(np.sqrt(h))


def geodesic_distance(a: GeoPoint, b: GeoPoint, model: EarthModel = MEAN_EARTH) -> float:
    """Haversine distance in kilometers between two points.

    The result is symmetric bit-for-bit: the endpoints are put in a
    canonical order before evaluation.
    """
    if (b.lat, b.lon) < (a.lat, a.lon):
        a, b = b, a
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    return float(_haversine(lat1, lon1, lat2, lon2, model.radius))


def geodesic_matrix(points: Sequence[GeoPoint], model: EarthModel = MEAN_EARTH) -> np.ndarray:
    """Pairwise haversine distances (km) as a symmetric ``(n, n)`` array.

    Parameters
    ----------
    points : sequence of GeoPoint
        At least two locations.
    model : EarthModel
        Sphere used for the computation.

    Returns
    -------
    numpy.ndarray
        Matrix with zero diagonal whose entry ``(i, j)`` equals
        ``geodesic_distance(points[i], points[j], model)``.
    """
    n = len(points)
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    lat = np.radians([p.lat for p in points])
    lon = np.radians([p.lon for p in points])
    iu, ju = np.triu_indices(n, k=1)
    # canonical endpoint order, as in geodesic_distance
    swap = (lat[ju] < lat[iu]) | ((lat[ju] == lat[iu]) & (lon[ju] < lon[iu]))
    a = np.where(swap, ju, iu)
    b = np.where(swap, iu, ju)
    d = _haversine(lat[a], lon[a], lat[b], lon[b], model.radius)
    out = np.zeros((n, n))
    out[iu, ju] = d
    out[ju, iu] = d
    return out
