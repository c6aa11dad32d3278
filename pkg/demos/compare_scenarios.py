"""Compare clusterings from several scenarios.

Runs the toy table with a few fixed (alpha, K) settings plus one tuned
run, writes every artifact under ``demo_out/``, then prints the pairwise
ARI matrix and the entanglement between the feature-only and
geography-only dendrograms.

Run with ``python demos/compare_scenarios.py``.
"""

from pathlib import Path

from geoward import dendrogram_entanglement
from geoward.datasets import toy_path
from geoward.pipeline import Scenario, compare_runs, ingest_for, run
from geoward.tuner import TuningGrid

out = Path("demo_out")
inputs = {"features": toy_path()}
columns = ["aware_low", "hdi"]
scenarios = [
    Scenario("features_only", columns, alpha=0.0, k=2),
    Scenario("geography_only", columns, alpha=1.0, k=2),
    Scenario("finer", columns, alpha=0.5, k=4, summary_variable="tas"),
    Scenario("tuned", columns, grid=TuningGrid.regular(0.05, 2, 6)),
]

results = {}
for s in scenarios:
    table, points = ingest_for(s, inputs)
    results[s.name] = run(s, table, points, out)
    print(f"{s.name:>15}: alpha={results[s.name]['alpha']:.2f} K={results[s.name]['k']}")

names, M = compare_runs([out / s.name / "assignments.csv" for s in scenarios], out_path=out / "ari.csv")
print("\nARI")
print(" " * 16 + "".join(f"{n[:10]:>11}" for n in names))
for name, row in zip(names, M):
    print(f"{name:>15} " + "".join(f"{x:11.3f}" for x in row))

e = dendrogram_entanglement(results["features_only"]["dendrogram"], results["geography_only"]["dendrogram"])
print(f"\nentanglement (features vs geography dendrograms, L=1.5): {e:.3f}")
