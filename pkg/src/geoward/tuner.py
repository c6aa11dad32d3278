"""Joint selection of the mixing weight ``alpha`` and the number of clusters ``K``.

For every ``K`` in the grid the blended matrix is clustered at every
``alpha`` and two choices of ``alpha`` are made:

``balance``
    the ``alpha`` minimizing ``|Q~_D0 - Q~_D1|``, i.e. the point where the
    relative loss of feature homogeneity meets the relative gain of
    geographic homogeneity;
``weighted``
    the ``alpha`` maximizing ``Q-bar``, the explained inertias of both
    matrices averaged with their total inertias as weights.

The five validity indices are then computed for each ``(K, criterion)``
partition and for the geography-free partition (``alpha = 0``) at the same
``K``. ``K`` is chosen by majority vote on the raw index values and by
majority vote on the percentage gain/loss against the baseline.

Ties are always resolved toward the smaller ``alpha`` and the smaller ``K``.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dissimilarity import check_dissimilarity, check_weights, mix_dissimilarities, uniform_weights
from .hierarchy import Dendrogram, agglomerate, cut, pseudo_inertia, within_pseudo_inertia
from .validity import DIRECTIONS, INDICES, evaluate_indices

__all__ = [
    "CRITERIA",
    "TuningGrid",
    "AlphaCurves",
    "TuningReport",
    "alpha_curves",
    "select_alpha_min",
    "select_alpha_max",
    "gain_loss",
    "improvement",
    "majority_vote",
    "optimal_k",
    "inertia_curve",
    "tune",
]

CRITERIA = ("balance", "weighted")


def _clean_alpha(a: float) -> float:
    return float(round(float(a), 12))


@dataclass(frozen=True)
class TuningGrid:
    """Candidate values for ``alpha`` and the range of ``K``.

    ``alphas`` must be strictly increasing and contain both 0 and 1.
    """

    alphas: tuple = ()
    k_min: int = 2
    k_max: int = 15

    def __post_init__(self):
        alphas = tuple(_clean_alpha(a) for a in (self.alphas or self.steps(0.01)))
        if alphas[0] != 0.0 or alphas[-1] != 1.0:
            raise ValueError("alpha grid must start at 0 and end at 1")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alpha grid must be strictly increasing")
        if not 2 <= self.k_min <= self.k_max:
            raise ValueError(f"need 2 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        object.__setattr__(self, "alphas", alphas)

    @staticmethod
    def steps(step: float) -> tuple:
        if not 0 < step <= 1:
            raise ValueError(f"alpha step must lie in (0, 1], got {step}")
        count = int(round(1.0 / step))
        if abs(count * step - 1.0) < 1e-9:
            values = np.linspace(0.0, 1.0, count + 1)
        else:
            values = np.append(np.arange(0.0, 1.0, step), 1.0)
        return tuple(_clean_alpha(a) for a in values)

    @classmethod
    def regular(cls, step: float = 0.01, k_min: int = 2, k_max: int = 15) -> "TuningGrid":
        return cls(alphas=cls.steps(step), k_min=k_min, k_max=k_max)

    def for_size(self, n: int) -> "TuningGrid":
        """Grid with ``k_max`` capped at ``n - 1``."""
        k_max = min(self.k_max, n - 1)
        if k_max < self.k_min:
            raise ValueError(f"no admissible K for n={n} (k_min={self.k_min})")
        return TuningGrid(alphas=self.alphas, k_min=self.k_min, k_max=k_max)

    @property
    def ks(self) -> range:
        return range(self.k_min, self.k_max + 1)


@dataclass
class AlphaCurves:
    """Explained-inertia criteria along the alpha grid for one ``K``."""

    k: int
    alphas: np.ndarray
    q0: np.ndarray
    q1: np.ndarray
    q0_norm: np.ndarray
    q1_norm: np.ndarray
    q_bar: np.ndarray

    def rows(self) -> list[dict]:
        return [
            {
                "alpha": float(a),
                "q_d0": float(self.q0[i]),
                "q_d1": float(self.q1[i]),
                "q_d0_norm": float(self.q0_norm[i]),
                "q_d1_norm": float(self.q1_norm[i]),
                "q_bar": float(self.q_bar[i]),
            }
            for i, a in enumerate(self.alphas)
        ]


class _Context:
    """Shared quantities for one (D0n, D1n, w) problem."""

    def __init__(self, D0n, D1n, w, mix):
        self.D0n = check_dissimilarity(D0n)
        self.D1n = check_dissimilarity(D1n)
        if self.D0n.shape != self.D1n.shape:
            raise ValueError(f"size mismatch: {self.D0n.shape} vs {self.D1n.shape}")
        self.n = self.D0n.shape[0]
        self.w = uniform_weights(self.n) if w is None else check_weights(w, self.n)
        self.mix = mix
        everyone = range(self.n)
        self.t0 = pseudo_inertia(everyone, self.D0n, self.w)
        self.t1 = pseudo_inertia(everyone, self.D1n, self.w)
        if self.t0 <= 0 or self.t1 <= 0:
            raise ValueError("both dissimilarity matrices need a positive total inertia")
        self._trees: dict[float, Dendrogram] = {}

    def matrix(self, alpha: float) -> np.ndarray:
        return mix_dissimilarities(self.D0n, self.D1n, alpha, mode=self.mix)

    def tree(self, alpha: float) -> Dendrogram:
        if alpha not in self._trees:
            self._trees[alpha] = agglomerate(self.matrix(alpha), self.w)
        return self._trees[alpha]

    def build(self, alphas: Sequence[float], n_jobs: int = 1) -> None:
        todo = [a for a in alphas if a not in self._trees]
        if n_jobs > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                trees = list(pool.map(lambda a: agglomerate(self.matrix(a), self.w), todo))
        else:
            trees = [agglomerate(self.matrix(a), self.w) for a in todo]
        self._trees.update(zip(todo, trees))

    def explained(self, labels) -> tuple[float, float]:
        q0 = 1.0 - within_pseudo_inertia(labels, self.D0n, self.w) / self.t0
        q1 = 1.0 - within_pseudo_inertia(labels, self.D1n, self.w) / self.t1
        return q0, q1

    def curves(self, K: int, alphas: Sequence[float]) -> AlphaCurves:
        ref0, _ = self.explained(cut(self.tree(0.0), K))
        _, ref1 = self.explained(cut(self.tree(1.0), K))
        if ref0 == 0 or ref1 == 0:
            raise ValueError(f"reference clustering at K={K} explains no inertia")
        q = np.array([self.explained(cut(self.tree(a), K)) for a in alphas])
        q0, q1 = q[:, 0], q[:, 1]
        q_bar = (self.t0 * q0 + self.t1 * q1) / (self.t0 + self.t1)
        return AlphaCurves(
            k=K,
            alphas=np.asarray(alphas, dtype=float),
            q0=q0,
            q1=q1,
            q0_norm=q0 / ref0,
            q1_norm=q1 / ref1,
            q_bar=q_bar,
        )


def alpha_curves(K: int, alphas, D0n, D1n, w=None, mix: str = "linear") -> AlphaCurves:
    """Cluster at each ``alpha``, cut at ``K`` and evaluate the inertia criteria.

    The normalizing references are the ``K``-cuts of the clusterings of
    ``D0n`` and ``D1n`` alone.
    """
    if isinstance(alphas, TuningGrid):
        alphas = alphas.alphas
    ctx = _Context(D0n, D1n, w, mix)
    return ctx.curves(K, [float(a) for a in alphas])


def select_alpha_min(curves: AlphaCurves) -> float:
    """Grid ``alpha`` minimizing ``|Q~_D0 - Q~_D1|`` (first one on ties)."""
    gap = np.abs(np.asarray(curves.q0_norm) - np.asarray(curves.q1_norm))
    gap = np.where(np.isnan(gap), np.inf, gap)
    return float(curves.alphas[int(np.argmin(gap))])


def select_alpha_max(curves: AlphaCurves) -> float:
    """Grid ``alpha`` maximizing ``Q-bar`` (first one on ties)."""
    q = np.asarray(curves.q_bar, dtype=float)
    q = np.where(np.isnan(q), -np.inf, q)
    return float(curves.alphas[int(np.argmax(q))])


def gain_loss(index_at_alpha_star: float, index_at_alpha0: float) -> float | None:
    """Percentage change of an index with respect to the ``alpha = 0`` baseline.

    Returns ``None`` when the change is undefined: zero baseline or a
    non-finite index value.
    """
    x, base = float(index_at_alpha_star), float(index_at_alpha0)
    if base == 0 or not (math.isfinite(x) and math.isfinite(base)):
        return None
    return (x - base) / base * 100.0


def improvement(index_name: str, gl: float | None) -> str:
    """Classify a gain/loss value as ``"gain"``, ``"loss"`` or ``"neutral"``.

    Increases are gains for indices to be maximized and losses for indices
    to be minimized. Undefined changes are reported as ``"undefined"``.
    """
    if index_name not in DIRECTIONS:
        raise ValueError(f"unknown index {index_name!r}")
    if gl is None:
        return "undefined"
    if gl == 0:
        return "neutral"
    better = gl > 0 if DIRECTIONS[index_name] == "max" else gl < 0
    return "gain" if better else "loss"


def majority_vote(votes: Sequence[int]) -> int:
    """Most frequent ``K``; the smallest one among equally frequent values."""
    votes = [int(v) for v in votes if v is not None]
    if not votes:
        raise ValueError("no votes to count")
    counts = Counter(votes)
    top = max(counts.values())
    return min(k for k, c in counts.items() if c == top)


def optimal_k(values: dict[int, float], index_name: str) -> int | None:
    """Best ``K`` for one index given its value at each ``K`` (ties -> smallest)."""
    direction = DIRECTIONS[index_name]
    best_k, best = None, None
    for k in sorted(values):
        v = values[k]
        if v is None or math.isnan(v):
            continue
        if best is None or (v > best if direction == "max" else v < best):
            best_k, best = k, v
    return best_k


def inertia_curve(D, w=None, k_max: int | None = None) -> list[tuple[int, float]]:
    """Within pseudo-inertia of the nested Ward cuts ``K = 1..k_max``."""
    D = check_dissimilarity(D)
    n = D.shape[0]
    k_max = n if k_max is None else k_max
    if not 1 <= k_max <= n:
        raise ValueError(f"k_max must lie in [1, {n}], got {k_max}")
    tree = agglomerate(D, w)
    return [(K, within_pseudo_inertia(cut(tree, K), D, w)) for K in range(1, k_max + 1)]


@dataclass
class TuningReport:
    """Every intermediate quantity of a tuning run, keyed by ``K``."""

    grid: TuningGrid
    index_matrix: str
    mix: str
    curves: dict[int, AlphaCurves] = field(default_factory=dict)
    alpha_star: dict[int, dict[str, float]] = field(default_factory=dict)
    indices: dict[int, dict[str, dict[str, float]]] = field(default_factory=dict)
    baseline: dict[int, dict[str, float]] = field(default_factory=dict)
    gain_loss: dict[int, dict[str, dict[str, float | None]]] = field(default_factory=dict)
    verdicts: dict[int, dict[str, dict[str, str]]] = field(default_factory=dict)
    optimal_k: dict[str, dict[str, int | None]] = field(default_factory=dict)
    absolute_vote: int | None = None
    absolute_vote_by_criterion: dict[str, int] = field(default_factory=dict)
    gl_vote: tuple[int, str] | None = None
    gl_vote_by_criterion: dict[str, int] = field(default_factory=dict)
    selected: dict = field(default_factory=dict)

    def alpha_min_star(self, K: int) -> float:
        return self.alpha_star[K]["balance"]

    def alpha_max_star(self, K: int) -> float:
        return self.alpha_star[K]["weighted"]

    def to_dict(self) -> dict:
        per_k = []
        for K in self.grid.ks:
            per_k.append(
                {
                    "k": K,
                    "alpha_min_star": self.alpha_star[K]["balance"],
                    "alpha_max_star": self.alpha_star[K]["weighted"],
                    "indices": {c: dict(self.indices[K][c]) for c in CRITERIA},
                    "baseline_indices": dict(self.baseline[K]),
                    "gain_loss_percent": {c: dict(self.gain_loss[K][c]) for c in CRITERIA},
                    "verdicts": {c: dict(self.verdicts[K][c]) for c in CRITERIA},
                }
            )
        return {
            "settings": {
                "alphas": list(self.grid.alphas),
                "k_min": self.grid.k_min,
                "k_max": self.grid.k_max,
                "index_matrix": self.index_matrix,
                "mix": self.mix,
            },
            "per_k": per_k,
            "curves": [{"k": K, "rows": self.curves[K].rows()} for K in self.grid.ks],
            "optimal_k": {c: dict(self.optimal_k[c]) for c in CRITERIA},
            "votes": {
                "absolute": self.absolute_vote,
                "absolute_by_criterion": dict(self.absolute_vote_by_criterion),
                "gain_loss": {"k": self.gl_vote[0], "criterion": self.gl_vote[1]},
                "gain_loss_by_criterion": dict(self.gl_vote_by_criterion),
            },
            "selected": dict(self.selected),
        }


def _gl_rank(report: TuningReport, K: int, criterion: str):
    """Sort key for gain/loss voting: more gains, then larger gains, then smaller K."""
    gains = [
        abs(report.gain_loss[K][criterion][name])
        for name, verdict in report.verdicts[K][criterion].items()
        if verdict == "gain"
    ]
    return (-len(gains), -math.fsum(gains), K, CRITERIA.index(criterion)), len(gains)


def tune(
    D0n,
    D1n,
    w=None,
    grid: TuningGrid | None = None,
    index_matrix: str = "mixed",
    mix: str = "linear",
    n_jobs: int = 1,
) -> TuningReport:
    """Run the full alpha/K selection procedure.

    Parameters
    ----------
    D0n, D1n : array_like
        Normalized feature and geographic dissimilarity matrices.
    w : array_like, optional
        Observation weights (uniform by default).
    grid : TuningGrid, optional
        Candidate ``alpha`` values and ``K`` range; ``k_max`` is capped at
        ``n - 1``. Defaults to steps of 0.01 and ``K = 2..15``.
    index_matrix : {"mixed", "features"}
        Matrix on which validity indices are evaluated: the blended matrix
        at the selected ``alpha`` or the feature matrix ``D0n``.
    mix : {"linear", "inertia"}
        Blending mode passed to :func:`mix_dissimilarities`.
    n_jobs : int
        Threads used to build the per-alpha dendrograms. The report does
        not depend on this value.

    Returns
    -------
    TuningReport
    """
    if index_matrix not in ("mixed", "features"):
        raise ValueError(f"index_matrix must be 'mixed' or 'features', got {index_matrix!r}")
    ctx = _Context(D0n, D1n, w, mix)
    grid = (grid or TuningGrid()).for_size(ctx.n)
    alphas = list(grid.alphas)
    ctx.build(alphas, n_jobs=n_jobs)
    report = TuningReport(grid=grid, index_matrix=index_matrix, mix=mix)

    def index_matrix_at(alpha):
        return ctx.matrix(alpha) if index_matrix == "mixed" else ctx.D0n

    for K in grid.ks:
        curves = ctx.curves(K, alphas)
        report.curves[K] = curves
        stars = {"balance": select_alpha_min(curves), "weighted": select_alpha_max(curves)}
        report.alpha_star[K] = stars
        base = evaluate_indices(index_matrix_at(0.0), cut(ctx.tree(0.0), K))
        report.baseline[K] = base
        report.indices[K], report.gain_loss[K], report.verdicts[K] = {}, {}, {}
        for criterion in CRITERIA:
            a = stars[criterion]
            values = evaluate_indices(index_matrix_at(a), cut(ctx.tree(a), K))
            gls = {name: gain_loss(values[name], base[name]) for name in INDICES}
            report.indices[K][criterion] = values
            report.gain_loss[K][criterion] = gls
            report.verdicts[K][criterion] = {name: improvement(name, g) for name, g in gls.items()}

    for criterion in CRITERIA:
        report.optimal_k[criterion] = {
            name: optimal_k({K: report.indices[K][criterion][name] for K in grid.ks}, name)
            for name in INDICES
        }
        report.absolute_vote_by_criterion[criterion] = majority_vote(
            list(report.optimal_k[criterion].values())
        )
    report.absolute_vote = majority_vote(
        [k for c in CRITERIA for k in report.optimal_k[c].values()]
    )

    cells = {(K, c): _gl_rank(report, K, c) for K in grid.ks for c in CRITERIA}
    best = min(cells, key=lambda cell: cells[cell][0])
    report.gl_vote = best
    for criterion in CRITERIA:
        own = [cell for cell in cells if cell[1] == criterion]
        report.gl_vote_by_criterion[criterion] = min(own, key=lambda cell: cells[cell][0])[0]

    if cells[best][1] > 0:
        K_star, criterion, rule = best[0], best[1], "gain_loss_vote"
    else:
        K_star, criterion, rule = report.absolute_vote, "weighted", "absolute_vote"
    report.selected = {
        "k_star": K_star,
        "alpha_star": report.alpha_star[K_star][criterion],
        "criterion": criterion,
        "rule": rule,
    }
    return report
