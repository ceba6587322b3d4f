"""Hierarchically stabilized k-means versus plain random-restart k-means.

Ward agglomeration seeds Lloyd refinement, giving the same model on every
run; random-restart k-means needs many initializations to stabilize. Also
sweeps k to produce the inertia/silhouette elbow table.
"""

from pathlib import Path

import numpy as np

from granttopics import baseline_kmeans, fit_hsk, silhouette_score, sweep_k, ward_partition
from granttopics.cluster import compare_methods, partition_means, write_sweep_csv

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(0)
centers = rng.standard_normal((4, 8)) * 6.0
points = np.vstack([c + rng.standard_normal((40, 8)) for c in centers])
print(f"data: {points.shape[0]} points around 4 planted centers")

labels, trace = ward_partition(points, 4)
init = partition_means(points, labels, 4)
print("\nward merge costs are monotone:", trace.merges[0][2] <= trace.merges[-1][2])
print("last three merge costs:", [round(c, 2) for _, _, c in trace.merges[-3:]])

model = fit_hsk(points, 4)
print(f"hsk inertia {model.inertia:.2f} after {model.iterations_used} Lloyd iterations")
assert (fit_hsk(points, 4).centroids == model.centroids).all(), "deterministic refit"
print("refit is bitwise identical")

for n_init in (1, 10):
    base = baseline_kmeans(points, 4, n_init=n_init, seed=123)
    print(f"baseline k-means best-of-{n_init:>2}: inertia {base.inertia:.2f}, "
          f"silhouette {silhouette_score(points, base.assignments):.4f}")
print(f"hsk silhouette:            {silhouette_score(points, model.assignments):.4f}")

quality = sweep_k(points, range(2, 9))
write_sweep_csv(quality, OUT / "sweep.csv")
print(f"\nk sweep (written to {OUT / 'sweep.csv'}):")
print("   k   inertia  silhouette")
for k in sorted(quality):
    q = quality[k]
    marker = "  <- planted k" if k == 4 else ""
    print(f"  {k:2d}  {q.inertia:8.1f}  {q.silhouette:.4f}{marker}")

print("\nstabilized vs random-restart silhouette per k:")
for k, row in compare_methods(points, range(3, 6), n_init=10, seed=99).items():
    print(f"  k={k}: hsk {row['hsk_silhouette']:.4f}  baseline {row['baseline_silhouette']:.4f}")
