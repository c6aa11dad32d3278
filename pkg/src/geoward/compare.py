"""Comparing clusterings: leaf-order entanglement, ARI and correlations."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .dissimilarity import FeatureTable
from .hierarchy import Dendrogram

__all__ = [
    "entanglement",
    "leaf_alignment",
    "dendrogram_entanglement",
    "adjusted_rand_index",
    "ari_matrix",
    "pearson_matrix",
]


def entanglement(v1, v2, L: float = 1.5, root: bool = True) -> float:
    """Normalized L-norm distance between two position vectors.

    ``v1`` lists the positions of the labels on the left side and ``v2``
    the positions of the same labels on the right side. The distance is
    divided by its value for the fully reversed arrangement, so the result
    is 0 for identical orders and 1 for reversed ones.

    With ``root=False`` the L-th root is dropped on both sides, i.e. the
    ratio of summed ``|v1 - v2|**L`` terms is returned.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if v1.shape != v2.shape or v1.ndim != 1:
        raise ValueError("position vectors must be 1-d and of equal length")
    if v1.size < 2:
        raise ValueError("entanglement needs at least 2 labels")
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    if not np.array_equal(np.sort(v1), np.sort(v2)):
        raise ValueError("v1 and v2 must be permutations of the same positions")
    worst = np.sort(v1)[::-1][np.argsort(np.argsort(v1))]
    num = np.sum(np.abs(v1 - v2) ** L)
    den = np.sum(np.abs(v1 - worst) ** L)
    if root:
        num, den = num ** (1.0 / L), den ** (1.0 / L)
    return float(num / den)


def leaf_alignment(left: Sequence[str], right: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Positions (1-based) of each left label on the left and on the right."""
    left = [str(x) for x in left]
    right = [str(x) for x in right]
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise ValueError("leaf labels must be unique")
    if set(left) != set(right):
        diff = sorted(set(left) ^ set(right))
        raise ValueError(f"leaf label sets differ: {', '.join(diff)}")
    pos_right = {lab: k + 1 for k, lab in enumerate(right)}
    v1 = np.arange(1, len(left) + 1)
    v2 = np.array([pos_right[lab] for lab in left])
    return v1, v2


def dendrogram_entanglement(d1: Dendrogram, d2: Dendrogram, L: float = 1.5, root: bool = True) -> float:
    """Entanglement of the leaf orders of two dendrograms over the same labels.

    Leaf orders are taken as they are; no rotation search is performed.
    """
    names1 = d1.leaf_names()
    names2 = d2.leaf_names()
    left = [names1[i] for i in d1.leaf_order]
    right = [names2[i] for i in d2.leaf_order]
    v1, v2 = leaf_alignment(left, right)
    return entanglement(v1, v2, L=L, root=root)


def _comb2(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def adjusted_rand_index(p1, p2) -> float:
    """Adjusted Rand Index of two labelings of the same observations.

    Pair counts are kept as integers so that chance-level agreement
    yields exactly 0.
    """
    p1 = np.asarray(p1)
    p2 = np.asarray(p2)
    if p1.shape != p2.shape or p1.ndim != 1:
        raise ValueError(f"partitions differ in size: {p1.shape} vs {p2.shape}")
    n = p1.size
    _, a = np.unique(p1, return_inverse=True)
    _, b = np.unique(p2, return_inverse=True)
    table = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    index = int(_comb2(table).sum())
    rows = int(_comb2(table.sum(axis=1)).sum())
    cols = int(_comb2(table.sum(axis=0)).sum())
    pairs = int(_comb2(n))
    num = 2 * (index * pairs - rows * cols)
    den = (rows + cols) * pairs - 2 * rows * cols
    if den == 0:
        # both labelings trivial (one cluster or all singletons) and equal
        return 1.0
    return num / den


def ari_matrix(partitions: Mapping[str, Sequence] | Sequence) -> tuple[list[str], np.ndarray]:
    """Pairwise ARI for a named collection of partitions.

    Returns the names (in input order) and the symmetric matrix.
    """
    if isinstance(partitions, Mapping):
        names = [str(k) for k in partitions]
        parts = list(partitions.values())
    else:
        parts = list(partitions)
        names = [str(i) for i in range(len(parts))]
    m = len(parts)
    out = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = adjusted_rand_index(parts[i], parts[j])
    return names, out


def pearson_matrix(t: FeatureTable) -> np.ndarray:
    """Pearson correlations between the feature columns of ``t``."""
    x = t.values
    if x.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    sd = x.std(axis=0, ddof=1)
    flat = [name for name, s in zip(t.feature_names, sd) if not s > 0]
    if flat:
        raise ValueError(f"constant feature columns: {', '.join(flat)}")
    z = (x - x.mean(axis=0)) / sd
    r = z.T @ z / (x.shape[0] - 1)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return r
