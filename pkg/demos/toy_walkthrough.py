"""Walk through a full tuning run on the bundled toy table.

The toy table has twenty fictitious countries in two regions. Features and
locations share the same layout, so every choice of alpha should recover
the two regions; this script shows where that shows up in the report.

Run with ``python demos/toy_walkthrough.py``.
"""

import numpy as np

from geoward import agglomerate, cut, tune
from geoward.datasets import toy_path
from geoward.io import ingest
from geoward.pipeline import prepare_matrices
from geoward.tuner import CRITERIA, TuningGrid

table, points = ingest(toy_path(), feature_columns=["aware_low", "hdi"])
D0n, D1n = prepare_matrices(table, points)
print(f"{table.n} countries, features: {', '.join(table.feature_names)}")

# Both matrices on their own already split the table in two.
for name, D in (("features", D0n), ("geography", D1n)):
    labels = cut(agglomerate(D), 2)
    print(f"{name:>9}: cluster sizes {np.bincount(labels)[1:].tolist()}")

report = tune(D0n, D1n, grid=TuningGrid.regular(0.01, 2, 8))

print("\nK  alpha_min*  alpha_max*  Q_bar at alpha_max*")
for K in report.grid.ks:
    c = report.curves[K]
    best = c.q_bar[list(c.alphas).index(report.alpha_max_star(K))]
    print(f"{K}  {report.alpha_min_star(K):10.2f}  {report.alpha_max_star(K):10.2f}  {best:.4f}")

print("\noptimal K per index")
for criterion in CRITERIA:
    print(f"  {criterion:>8}: {report.optimal_k[criterion]}")
print(f"absolute vote: K = {report.absolute_vote}")
print(f"gain/loss vote: K = {report.gl_vote[0]} ({report.gl_vote[1]})")
print(f"selected: {report.selected}")
