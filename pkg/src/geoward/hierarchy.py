"""Weighted Ward-like agglomeration on an arbitrary dissimilarity matrix.

The merge criterion is the increase in pseudo-inertia

    I(C) = sum_{i, j in C} w_i w_j d_ij**2 / (2 mu_C),   mu_C = sum_{i in C} w_i,

caused by joining two clusters. It only needs pairwise dissimilarities, so
it applies unchanged to non-Euclidean inputs such as geodesic distances or
a blend of a feature matrix and a geographic one.

Partitions are integer label arrays; :func:`cut` numbers clusters ``1..K``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dissimilarity import check_dissimilarity, check_weights, uniform_weights

__all__ = [
    "Dendrogram",
    "agglomerate",
    "cut",
    "check_partition",
    "clusters",
    "pseudo_inertia",
    "ward_merge_cost",
    "cluster_pseudo_inertia",
    "within_pseudo_inertia",
    "within_inertia",
    "explained_inertia",
    "normalized_explained",
    "weighted_explained",
]


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _newick_label(name: str) -> str:
    if any(ch in name for ch in " ():;,[]'\t\n"):
        return "'" + name.replace("'", "''") + "'"
    return name


@dataclass(frozen=True)
class Dendrogram:
    """Ordered merge tree produced by :func:`agglomerate`.

    Leaves are nodes ``0..n-1``; the cluster created by merge ``t`` is
    node ``n + t``. ``merges[t]`` holds the two node ids joined at step
    ``t`` (smaller id first), ``heights[t]`` the Ward cost of that merge,
    ``weights[t]`` the total observation weight of the new cluster and
    ``sizes[t]`` its number of leaves.
    """

    merges: np.ndarray
    heights: np.ndarray
    weights: np.ndarray
    sizes: np.ndarray
    labels: tuple | None = None

    @property
    def n_leaves(self) -> int:
        return len(self.merges) + 1

    def leaf_names(self) -> list[str]:
        if self.labels is not None:
            return [str(x) for x in self.labels]
        return [str(i) for i in range(self.n_leaves)]

    def _node_height(self, node: int) -> float:
        n = self.n_leaves
        return 0.0 if node < n else float(self.heights[node - n])

    @property
    def leaf_order(self) -> np.ndarray:
        """Leaf indices in plotting order (left child before right child)."""
        n = self.n_leaves
        order = [[i] for i in range(n)] + [None] * (n - 1)
        for t, (a, b) in enumerate(self.merges):
            order[n + t] = order[a] + order[b]
            order[a] = order[b] = None
        return np.array(order[-1], dtype=int)

    def to_linkage(self) -> np.ndarray:
        """Return a scipy-compatible linkage matrix (raw Ward costs as heights)."""
        Z = np.empty((len(self.merges), 4))
        Z[:, :2] = self.merges
        Z[:, 2] = self.heights
        Z[:, 3] = self.sizes
        return Z

    def to_newick(self) -> str:
        """Newick string; branch lengths are differences of node heights."""
        n = self.n_leaves
        names = self.leaf_names()
        text = [_newick_label(s) for s in names] + [None] * (n - 1)
        for t, (a, b) in enumerate(self.merges):
            h = float(self.heights[t])
            parts = [f"{text[c]}:{_fmt(h - self._node_height(c))}" for c in (a, b)]
            text[n + t] = "(" + ",".join(parts) + ")"
        return text[-1] + ";"

    def to_text(self) -> str:
        """Indented outline of the tree, root first."""
        n = self.n_leaves
        names = self.leaf_names()
        lines = []
        stack = [(2 * n - 2, 0)]
        while stack:
            node, depth = stack.pop()
            pad = "  " * depth
            if node < n:
                lines.append(f"{pad}- {names[node]}")
                continue
            t = node - n
            lines.append(
                f"{pad}+ node {node} height={_fmt(self.heights[t])} "
                f"weight={_fmt(self.weights[t])} size={int(self.sizes[t])}"
            )
            a, b = self.merges[t]
            stack.append((int(b), depth + 1))
            stack.append((int(a), depth + 1))
        return "\n".join(lines) + "\n"


def agglomerate(D, w=None, labels: Sequence | None = None) -> Dendrogram:
    """Ward-like hierarchical clustering of a dissimilarity matrix.

    At every step the pair of active clusters with the smallest increase in
    pseudo-inertia is merged. Costs are maintained with the weighted
    Lance-Williams update, which is exact for pseudo-inertia on any
    dissimilarity. Equal costs are resolved in favour of the
    lexicographically smallest pair of node ids.

    Parameters
    ----------
    D : array_like
        ``(n, n)`` dissimilarity matrix, ``n >= 2``.
    w : array_like, optional
        Observation weights summing to one. Uniform by default.
    labels : sequence, optional
        Leaf names carried into the dendrogram exports.

    Returns
    -------
    Dendrogram
    """
    D = check_dissimilarity(D)
    n = D.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    w = uniform_weights(n) if w is None else check_weights(w, n)
    if labels is not None and len(labels) != n:
        raise ValueError(f"{len(labels)} labels for {n} observations")

    m = 2 * n - 1
    mass = np.zeros(m)
    mass[:n] = w
    size = np.zeros(m, dtype=int)
    size[:n] = 1

    pair_mass = w[:, None] + w[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        init = np.where(pair_mass > 0, np.outer(w, w) * D**2 / pair_mass, 0.0)
    delta = np.full((m, m), np.inf)
    delta[:n, :n] = init
    np.fill_diagonal(delta, np.inf)
    upper = np.triu(np.ones((m, m), dtype=bool), k=1)
    active = np.zeros(m, dtype=bool)
    active[:n] = True

    merges = np.empty((n - 1, 2), dtype=int)
    heights = np.empty(n - 1)
    weights = np.empty(n - 1)
    sizes = np.empty(n - 1, dtype=int)

    for t in range(n - 1):
        # row-major argmin over the upper triangle = lexicographic tie-break
        flat = int(np.argmin(np.where(upper, delta, np.inf)))
        i, j = divmod(flat, m)
        h = delta[i, j]
        c = n + t
        merges[t] = i, j
        heights[t] = h
        mass[c] = mass[i] + mass[j]
        size[c] = size[i] + size[j]
        weights[t] = mass[c]
        sizes[t] = size[c]

        active[i] = active[j] = False
        ks = np.nonzero(active)[0]
        if ks.size:
            mk = mass[ks]
            dik = delta[i, ks]
            djk = delta[j, ks]
            total = mass[i] + mass[j] + mk
            with np.errstate(invalid="ignore", divide="ignore"):
                new = ((mass[i] + mk) * dik + (mass[j] + mk) * djk - mk * h) / total
            new = np.where(total > 0, new, 0.0)
            # exact arithmetic guarantees this bound; enforcing it keeps
            # heights monotone under rounding
            new = np.maximum(new, np.minimum(dik, djk))
            delta[c, ks] = new
            delta[ks, c] = new
        delta[[i, j], :] = np.inf
        delta[:, [i, j]] = np.inf
        active[c] = True

    return Dendrogram(
        merges=merges,
        heights=heights,
        weights=weights,
        sizes=sizes,
        labels=None if labels is None else tuple(labels),
    )


def cut(d: Dendrogram, K: int) -> np.ndarray:
    """Partition into ``K`` clusters by undoing the last ``K - 1`` merges.

    Labels run ``1..K`` in order of each cluster's smallest leaf index.
    """
    n = d.n_leaves
    if not 1 <= K <= n:
        raise ValueError(f"K must lie in [1, {n}], got {K}")
    root = np.arange(2 * n - 1)
    for t in range(n - K):
        a, b = d.merges[t]
        root[a] = root[b] = n + t
    # follow parent links; merge order guarantees parents have larger ids
    for node in range(2 * n - 2, -1, -1):
        root[node] = root[root[node]]
    leaf_roots = root[:n]
    _, first = np.unique(leaf_roots, return_index=True)
    relabel = {leaf_roots[f]: k + 1 for k, f in enumerate(np.sort(first))}
    return np.array([relabel[r] for r in leaf_roots], dtype=int)


def check_partition(labels, n: int | None = None) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise ValueError("partition labels must be a nonempty 1-d array")
    if n is not None and labels.shape[0] != n:
        raise ValueError(f"partition has {labels.shape[0]} labels, expected {n}")
    return labels


def clusters(labels) -> list[np.ndarray]:
    """Member indices of each cluster, ordered by sorted label value."""
    labels = check_partition(labels)
    return [np.nonzero(labels == k)[0] for k in np.unique(labels)]


def _members(C, n: int) -> np.ndarray:
    idx = np.unique(np.asarray(list(C), dtype=int))
    if idx.size == 0:
        raise ValueError("cluster must be nonempty")
    if idx[0] < 0 or idx[-1] >= n:
        raise IndexError("cluster index out of range")
    return idx


def pseudo_inertia(C, D, w=None) -> float:
    """Pseudo-inertia of the observations ``C`` under a single matrix ``D``."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    w = uniform_weights(n) if w is None else np.asarray(w, dtype=float)
    idx = _members(C, n)
    wc = w[idx]
    mu = wc.sum()
    if mu == 0:
        return 0.0
    sub = D[np.ix_(idx, idx)]
    return float(wc @ (sub**2) @ wc / (2.0 * mu))


def ward_merge_cost(A, B, D, w=None) -> float:
    """Increase of pseudo-inertia when clusters ``A`` and ``B`` are joined."""
    A = set(int(i) for i in A)
    B = set(int(i) for i in B)
    if not A or not B:
        raise ValueError("clusters must be nonempty")
    if A & B:
        raise ValueError(f"clusters overlap on {sorted(A & B)}")
    return pseudo_inertia(A | B, D, w) - pseudo_inertia(A, D, w) - pseudo_inertia(B, D, w)


def cluster_pseudo_inertia(C, D0n, D1n, alpha: float, w=None) -> float:
    """Mixed pseudo-inertia ``(1 - alpha) I_D0(C) + alpha I_D1(C)``."""
    return (1.0 - alpha) * pseudo_inertia(C, D0n, w) + alpha * pseudo_inertia(C, D1n, w)


def within_pseudo_inertia(labels, D, w=None) -> float:
    """Sum of cluster pseudo-inertias under a single matrix."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    labels = check_partition(labels, n)
    w = uniform_weights(n) if w is None else np.asarray(w, dtype=float)
    _, codes = np.unique(labels, return_inverse=True)
    M = np.zeros((n, codes.max() + 1))
    M[np.arange(n), codes] = w
    mu = M.sum(axis=0)
    S = np.einsum("ik,ij,jk->k", M, D**2, M)
    keep = mu > 0
    return float(np.sum(S[keep] / (2.0 * mu[keep])))


def within_inertia(labels, D0n, D1n, alpha: float, w=None) -> float:
    """Mixed within-cluster pseudo-inertia of a partition."""
    return (1.0 - alpha) * within_pseudo_inertia(labels, D0n, w) + alpha * within_pseudo_inertia(
        labels, D1n, w
    )


def explained_inertia(labels, D, w=None) -> float:
    """Share of the total pseudo-inertia under ``D`` explained by ``labels``."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    total = pseudo_inertia(range(n), D, w)
    if total <= 0:
        raise ValueError("total pseudo-inertia is zero (all dissimilarities vanish)")
    return 1.0 - within_pseudo_inertia(labels, D, w) / total


def normalized_explained(labels, D0n, D1n, w=None, ref0=None, ref1=None) -> tuple[float, float]:
    """Explained inertias relative to the single-matrix reference clusterings.

    ``ref0`` and ``ref1`` are the partitions into the same number of
    clusters obtained from ``D0n`` alone and ``D1n`` alone; when omitted
    they are computed here.

    Returns
    -------
    (float, float)
        ``Q_D0(labels) / Q_D0(ref0)`` and ``Q_D1(labels) / Q_D1(ref1)``.
    """
    K = len(np.unique(labels))
    if ref0 is None:
        ref0 = cut(agglomerate(D0n, w), K)
    if ref1 is None:
        ref1 = cut(agglomerate(D1n, w), K)
    q0_ref = explained_inertia(ref0, D0n, w)
    q1_ref = explained_inertia(ref1, D1n, w)
    if q0_ref == 0 or q1_ref == 0:
        raise ValueError("reference partition explains no inertia; normalization undefined")
    return (
        explained_inertia(labels, D0n, w) / q0_ref,
        explained_inertia(labels, D1n, w) / q1_ref,
    )


def weighted_explained(labels, D0n, D1n, w=None) -> float:
    """Mean of the two explained inertias weighted by the total inertias."""
    n = np.asarray(D0n).shape[0]
    t0 = pseudo_inertia(range(n), D0n, w)
    t1 = pseudo_inertia(range(n), D1n, w)
    if t0 + t1 <= 0:
        raise ValueError("both total pseudo-inertias are zero")
    q0 = explained_inertia(labels, D0n, w) if t0 > 0 else 0.0
    q1 = explained_inertia(labels, D1n, w) if t1 > 0 else 0.0
    return (t0 * q0 + t1 * q1) / (t0 + t1)
