"""Feature tables and the dissimilarity matrices built from them.

Dissimilarity matrices are plain ``numpy`` arrays; :func:`check_dissimilarity`
enforces the shape and value contract at module boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "FeatureTable",
    "check_dissimilarity",
    "check_weights",
    "uniform_weights",
    "standardize_features",
    "feature_dissimilarity",
    "normalize_matrix",
    "mix_dissimilarities",
    "MIX_MODES",
]

WEIGHT_TOL = 1e-12


def uniform_weights(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def check_weights(w, n: int | None = None) -> np.ndarray:
    """Validate observation weights: nonnegative, summing to one."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise ValueError("weights must be one-dimensional")
    if n is not None and w.shape[0] != n:
        raise ValueError(f"expected {n} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and nonnegative")
    if abs(w.sum() - 1.0) > WEIGHT_TOL * max(1, w.shape[0]):
        raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
    return w


def check_dissimilarity(D) -> np.ndarray:
    """Return ``D`` as a float array after checking the matrix invariants.

    Raises ``ValueError`` unless ``D`` is square, finite, nonnegative,
    exactly symmetric and has a zero diagonal.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"dissimilarity matrix must be square, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise ValueError("dissimilarity matrix has non-finite entries")
    if np.any(D < 0):
        raise ValueError("dissimilarity matrix has negative entries")
    if np.any(np.diag(D) != 0):
        raise ValueError("dissimilarity matrix must have a zero diagonal")
    if not np.array_equal(D, D.T):
        raise ValueError("dissimilarity matrix is not symmetric")
    return D


@dataclass(frozen=True)
class FeatureTable:
    """``n`` observations described by ``p`` named numeric features.

    Attributes
    ----------
    ids : tuple of str
        Unique observation identifiers (e.g. ISO country codes).
    feature_names : tuple of str
    values : numpy.ndarray
        ``(n, p)`` matrix without missing entries.
    weights : numpy.ndarray
        Observation weights summing to one; uniform when omitted.
    """

    ids: tuple
    feature_names: tuple
    values: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        names = tuple(str(c) for c in self.feature_names)
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        n, p = values.shape
        if len(ids) != n:
            raise ValueError(f"{len(ids)} ids for {n} rows")
        if len(names) != p:
            raise ValueError(f"{len(names)} feature names for {p} columns")
        dup = sorted({i for i in ids if ids.count(i) > 1})
        if dup:
            raise ValueError(f"duplicate ids: {', '.join(dup)}")
        if not np.all(np.isfinite(values)):
            bad = [ids[r] for r in np.unique(np.nonzero(~np.isfinite(values))[0])]
            raise ValueError(f"missing or non-finite values in rows: {', '.join(bad)}")
        weights = uniform_weights(n) if self.weights is None else check_weights(self.weights, n)
        values.flags.writeable = False
        weights = np.array(weights)
        weights.flags.writeable = False
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def select(self, columns: Sequence[str]) -> "FeatureTable":
        """Restrict the table to ``columns`` (in the given order)."""
        missing = [c for c in columns if c not in self.feature_names]
        if missing:
            raise KeyError(f"unknown feature columns: {', '.join(missing)}")
        idx = [self.feature_names.index(c) for c in columns]
        return replace(self, feature_names=tuple(columns), values=self.values[:, idx])

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.feature_names.index(name)]


def standardize_features(t: FeatureTable) -> FeatureTable:
    """Center each column and scale it to unit sample standard deviation."""
    values = t.values
    sd = values.std(axis=0, ddof=1) if t.n > 1 else np.zeros(values.shape[1])
    flat = [name for name, s in zip(t.feature_names, sd) if not s > 0]
    if flat:
        raise ValueError(f"zero-variance feature columns: {', '.join(flat)}")
    return replace(t, values=(values - values.mean(axis=0)) / sd)


def feature_dissimilarity(t: FeatureTable) -> np.ndarray:
    """Euclidean distances between the rows of ``t.values``."""
    x = t.values
    diff = x[:, None, :] - x[None, :, :]
    D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    # exact symmetry regardless of summation order
    D = np.triu(D, 1)
    return D + D.T


def normalize_matrix(D) -> np.ndarray:
    """Divide every entry by the largest one so that ``max == 1``."""
    D = check_dissimilarity(D)
    top = D.max()
    if top <= 0:
        raise ValueError("cannot normalize an all-zero dissimilarity matrix")
    return D / top


MIX_MODES = ("linear", "inertia")


def mix_dissimilarities(D0n, D1n, alpha: float, mode: str = "linear") -> np.ndarray:
    """Blend two normalized dissimilarity matrices with weight ``alpha``.

    ``mode="linear"`` returns ``(1 - alpha) * D0n + alpha * D1n``.
    ``mode="inertia"`` returns ``sqrt((1 - alpha) * D0n**2 + alpha * D1n**2)``,
    whose Ward pseudo-inertia is exactly the convex combination of the
    pseudo-inertias computed on ``D0n`` and ``D1n`` separately.

    At ``alpha`` 0 and 1 both modes return an exact copy of the
    corresponding input.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if mode not in MIX_MODES:
        raise ValueError(f"unknown mix mode {mode!r}; expected one of {MIX_MODES}")
    D0n = np.asarray(D0n, dtype=float)
    D1n = np.asarray(D1n, dtype=float)
    if D0n.shape != D1n.shape:
        raise ValueError(f"size mismatch: {D0n.shape} vs {D1n.shape}")
    if alpha == 0.0:
        return D0n.copy()
    if alpha == 1.0:
        return D1n.copy()
    if mode == "inertia":
        return np.sqrt((1.0 - alpha) * D0n**2 + alpha * D1n**2)
    return (1.0 - alpha) * D0n + alpha * D1n
