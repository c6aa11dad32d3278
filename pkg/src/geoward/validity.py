"""Distance-based cluster validity indices.

Every index works from pairwise dissimilarities only (no centroids), so it
can be evaluated on a blended feature/geography matrix. ``DIRECTIONS``
records whether larger (``"max"``) or smaller (``"min"``) values are better.
"""

from __future__ import annotations

import math

import numpy as np

from .hierarchy import check_partition

__all__ = [
    "silhouette",
    "dunn",
    "c_index",
    "calinski_harabasz",
    "mcclain_rao",
    "INDICES",
    "DIRECTIONS",
    "evaluate_indices",
]


def _prepare(D, labels):
    D = np.asarray(D, dtype=float)
    labels = check_partition(labels, D.shape[0])
    uniq, codes = np.unique(labels, return_inverse=True)
    if uniq.size < 2:
        raise ValueError(f"index needs at least 2 clusters, got {uniq.size}")
    return D, codes, uniq.size


def _pair_masks(codes):
    n = codes.size
    iu, ju = np.triu_indices(n, k=1)
    same = codes[iu] == codes[ju]
    return iu, ju, same


def silhouette(D, labels) -> float:
    """Mean silhouette width; members of singleton clusters score 0."""
    D, codes, K = _prepare(D, labels)
    n = D.shape[0]
    onehot = np.zeros((n, K))
    onehot[np.arange(n), codes] = 1.0
    counts = onehot.sum(axis=0)
    sums = D @ onehot  # sums[i, k] = total distance from i to cluster k
    own = counts[codes]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[np.arange(n), codes] / (own - 1)
        other = sums / counts
    other[np.arange(n), codes] = np.inf
    b = other.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s[own == 1] = 0.0
    return float(s.mean())


def dunn(D, labels) -> float:
    """Smallest between-cluster distance over largest within-cluster distance.

    Returns ``inf`` when clusters are internally degenerate (all
    within distances zero) but separated, and 0 when they are not separated.
    """
    D, codes, _ = _prepare(D, labels)
    iu, ju, same = _pair_masks(codes)
    d = D[iu, ju]
    min_between = d[~same].min()
    max_within = d[same].max() if same.any() else 0.0
    if max_within == 0:
        return math.inf if min_between > 0 else 0.0
    return float(min_between / max_within)


def c_index(D, labels) -> float:
    """Hubert-Levin C-index: 0 when within pairs are the closest pairs."""
    D, codes, _ = _prepare(D, labels)
    iu, ju, same = _pair_masks(codes)
    d = D[iu, ju]
    p = int(same.sum())
    if p == 0:
        raise ValueError("C-index needs at least one within-cluster pair")
    ordered = np.sort(d)
    s_min = ordered[:p].sum()
    s_max = ordered[-p:].sum()
    if s_max == s_min:
        raise ValueError("C-index undefined: all pairwise distances are equal")
    s = d[same].sum()
    return float((s - s_min) / (s_max - s_min))


def calinski_harabasz(D, labels) -> float:
    """Calinski-Harabasz ratio from squared pairwise dissimilarities.

    Within and total dispersion are ``sum_{i<j in C} d_ij**2 / |C|`` summed
    over clusters and over the whole set; the result equals the usual
    centroid form when ``D`` is Euclidean.
    """
    D, codes, K = _prepare(D, labels)
    n = D.shape[0]
    if K > n - 1:
        raise ValueError(f"Calinski-Harabasz needs 2 <= K <= n-1, got K={K}, n={n}")
    iu, ju, same = _pair_masks(codes)
    d2 = D[iu, ju] ** 2
    counts = np.bincount(codes)
    total = d2.sum() / n
    within = float(np.sum(np.bincount(codes[iu][same], weights=d2[same], minlength=K) / counts))
    between = total - within
    if within == 0:
        return math.inf if between > 0 else 0.0
    return float((between / (K - 1)) / (within / (n - K)))


def mcclain_rao(D, labels) -> float:
    """Mean within-cluster distance over mean between-cluster distance."""
    D, codes, _ = _prepare(D, labels)
    iu, ju, same = _pair_masks(codes)
    d = D[iu, ju]
    if not same.any():
        raise ValueError("McClain-Rao needs at least one within-cluster pair")
    between = d[~same].mean()
    if between == 0:
        raise ValueError("McClain-Rao undefined: mean between-cluster distance is zero")
    return float(d[same].mean() / between)


INDICES = {
    "silhouette": silhouette,
    "dunn": dunn,
    "c_index": c_index,
    "calinski_harabasz": calinski_harabasz,
    "mcclain_rao": mcclain_rao,
}

DIRECTIONS = {
    "silhouette": "max",
    "dunn": "max",
    "c_index": "min",
    "calinski_harabasz": "max",
    "mcclain_rao": "min",
}


def evaluate_indices(D, labels, names=None) -> dict[str, float]:
    """All requested indices; an index whose preconditions fail maps to ``nan``."""
    out = {}
    for name in names or INDICES:
        try:
            out[name] = INDICES[name](D, labels)
        except ValueError:
            out[name] = math.nan
    return out
