"""How alpha trades feature homogeneity for spatial compactness.

Here the features are only loosely tied to location: three spatial
regions, but feature values that drift across region borders. As alpha
grows the partition becomes more compact on the map (Q_D1 rises) while
feature homogeneity (Q_D0) broadly drops. Ward is greedy, so a mixed tree
can explain slightly more feature inertia than the alpha = 0 tree itself;
the normalized Q~_D0 then exceeds one. The two selection criteria pick
different points on that trade-off.

Run with ``python demos/alpha_tradeoff.py``.
"""

import numpy as np

from geoward import FeatureTable, GeoPoint, tune
from geoward.pipeline import prepare_matrices
from geoward.tuner import TuningGrid

rng = np.random.default_rng(3)
n = 45
centers = np.array([[45.0, 5.0], [40.0, 20.0], [52.0, 18.0]])
region = np.repeat(np.arange(3), n // 3)
latlon = centers[region] + rng.normal(scale=1.5, size=(n, 2))
points = [GeoPoint(float(a), float(b)) for a, b in latlon]

# feature structure: two groups cutting across the regions, plus noise
group = (latlon[:, 1] > 12).astype(float)
values = np.column_stack([group + rng.normal(scale=0.35, size=n), rng.normal(size=n)])
table = FeatureTable(ids=[f"c{i:02d}" for i in range(n)], feature_names=["x1", "x2"], values=values)

D0n, D1n = prepare_matrices(table, points)
report = tune(D0n, D1n, grid=TuningGrid.regular(0.05, 2, 6))

K = 3
c = report.curves[K]
print(f"K = {K}")
print("alpha   Q_D0    Q_D1    Q~_D0   Q~_D1   Q_bar")
for row in c.rows():
    print("{alpha:5.2f}  {q_d0:.3f}  {q_d1:.3f}  {q_d0_norm:.3f}  {q_d1_norm:.3f}  {q_bar:.3f}".format(**row))
print(f"\nbalance criterion  -> alpha = {report.alpha_min_star(K):.2f}")
print(f"weighted criterion -> alpha = {report.alpha_max_star(K):.2f}")

print("\nindex changes against alpha = 0 (percent, verdict)")
for name, gl in report.gain_loss[K]["weighted"].items():
    verdict = report.verdicts[K]["weighted"][name]
    print(f"  {name:>18}: {'n/a' if gl is None else f'{gl:+.1f}'} {verdict}")
