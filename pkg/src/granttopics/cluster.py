"""Hierarchically stabilized k-means.

Ward agglomerative clustering (nearest-neighbor chain with the
Lance-Williams update) produces a deterministic k-way partition whose
member means initialize Lloyd refinement. No randomness anywhere on this
path: identical inputs give bitwise-identical models. A conventional
random-restart k-means is included for comparison runs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_MONOTONE_SLACK = 1e-9


@dataclass
class ClusterModel:
    """Fitted clustering: centroids, per-document labels and quality numbers."""

    k: int
    centroids: np.ndarray  # (k, D)
    assignments: np.ndarray  # (n,) int labels in [0, k)
    inertia: float
    iterations_used: int
    inertia_history: list[float] = field(default_factory=list)


@dataclass
class WardMergeTrace:
    """Agglomeration history: (cluster_a, cluster_b, merge_cost) per merge.

    Merges are ordered by non-decreasing Ward cost (the increase in total
    within-cluster sum of squares). Leaves carry ids 0..n-1 and the t-th
    merge creates id n+t, so cutting after the first n-k merges yields the
    k-cluster partition, and every cut refines all coarser cuts.
    """

    n_leaves: int
    merges: list[tuple[int, int, float]]


@dataclass
class KQuality:
    inertia: float
    silhouette: float


def _pairwise_sq_distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    sq = (x * x).sum(axis=1)[:, None] + (y * y).sum(axis=1)[None, :] - 2.0 * (x @ y.T)
    return np.maximum(sq, 0.0)


def ward_partition(embeddings: np.ndarray, k: int) -> tuple[np.ndarray, WardMergeTrace]:
    """Agglomerate under the Ward minimum-variance criterion down to k clusters.

    Uses the nearest-neighbor chain algorithm with the Lance-Williams
    recurrence; the discovered merges are sorted by cost into a monotone
    trace and the partition is read off the first n-k merges. Ties break
    deterministically: the chain prefers its predecessor, then the cluster
    created earliest, and the final sort is stable.

    Returns (labels, trace); labels are numbered by first document
    occurrence.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("embeddings must be a 2-D array")
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    # Slot s always contains leaf s, so slots double as leaf representatives.
    dist = _pairwise_sq_distances(x, x)  # maintained at 2x the Ward merge cost
    np.fill_diagonal(dist, np.inf)
    sizes = np.ones(n, dtype=np.float64)
    creation = np.arange(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    raw_merges: list[tuple[int, int, float]] = []  # (slot_a, slot_b, cost)
    chain: list[int] = []
    next_creation = n

    while len(raw_merges) < n - 1:
        if not chain:
            candidates = np.flatnonzero(active)
            chain.append(int(candidates[np.argmin(creation[candidates])]))
        top = chain[-1]
        row = np.where(active, dist[top], np.inf)
        row[top] = np.inf
        best = row.min()
        if len(chain) >= 2 and row[chain[-2]] == best:
            nxt = chain[-2]
        else:
            ties = np.flatnonzero(row == best)
            nxt = int(ties[np.argmin(creation[ties])])
        if len(chain) >= 2 and nxt == chain[-2]:
            i, j = chain.pop(), chain.pop()
            cost = dist[i, j] / 2.0
            raw_merges.append((i, j, float(cost)))
            si, sj = sizes[i], sizes[j]
            keep, drop = (i, j) if i < j else (j, i)
            updated = (
                (sizes + si) * dist[i] + (sizes + sj) * dist[j] - sizes * dist[i, j]
            ) / (si + sj + sizes)
            dist[keep, :] = updated
            dist[:, keep] = updated
            dist[keep, keep] = np.inf
            sizes[keep] = si + sj
            creation[keep] = next_creation
            next_creation += 1
            active[drop] = False
            dist[drop, :] = np.inf
            dist[:, drop] = np.inf
        else:
            chain.append(nxt)

    order = np.argsort([m[2] for m in raw_merges], kind="stable")

    # Relabel into monotone dendrogram ids and capture the k-cluster cut.
    parent = np.arange(n, dtype=np.int64)

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    cluster_id = {leaf: leaf for leaf in range(n)}
    merges: list[tuple[int, int, float]] = []
    cut_roots: np.ndarray | None = np.arange(n, dtype=np.int64) if k == n else None
    for t, idx in enumerate(order):
        slot_a, slot_b, cost = raw_merges[idx]
        ra, rb = find(slot_a), find(slot_b)
        ida, idb = cluster_id.pop(ra), cluster_id.pop(rb)
        parent[ra] = rb
        cluster_id[rb] = n + t
        merges.append((min(ida, idb), max(ida, idb), cost))
        if t + 1 == n - k:
            cut_roots = np.array([find(leaf) for leaf in range(n)], dtype=np.int64)

    assert cut_roots is not None
    labels = np.empty(n, dtype=np.int64)
    seen: dict[int, int] = {}
    for doc, root in enumerate(cut_roots):
        labels[doc] = seen.setdefault(int(root), len(seen))
    return labels, WardMergeTrace(n_leaves=n, merges=merges)


def partition_means(embeddings: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Member mean of each cluster, rows ordered by label."""
    x = np.asarray(embeddings, dtype=np.float64)
    means = np.empty((k, x.shape[1]), dtype=np.float64)
    for j in range(k):
        members = x[labels == j]
        if members.shape[0] == 0:
            raise ValueError(f"cluster {j} has no members")
        means[j] = members.mean(axis=0)
    return means


def kmeans_refine(
    embeddings: np.ndarray,
    initial_centroids: np.ndarray,
    tol: float = 1e-6,
    max_iter: int = 300,
) -> ClusterModel:
    """Lloyd iterations from the given centroids until stable.

    Assignment goes to the nearest centroid by Euclidean distance (tie:
    lowest cluster index). Stops when assignments repeat, when the largest
    centroid displacement drops below ``tol``, or at ``max_iter``. An empty
    cluster is repaired by moving in the point farthest from its own
    centroid (tie: lowest document index); donor clusters must keep at
    least one member. Duplicate initial centroids therefore resolve
    through repair rather than failing.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    centroids = np.array(initial_centroids, dtype=np.float64, copy=True)
    n = x.shape[0]
    k = centroids.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    if centroids.ndim != 2 or centroids.shape[1] != x.shape[1]:
        raise ValueError("initial centroids must be a (k, D) array matching the data")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    prev_assign: np.ndarray | None = None
    prev_inertia = np.inf
    history: list[float] = []
    assign = np.zeros(n, dtype=np.int64)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = _pairwise_sq_distances(x, centroids)
        assign = d2.argmin(axis=1)
        counts = np.bincount(assign, minlength=k)
        for j in np.flatnonzero(counts == 0):
            own = d2[np.arange(n), assign]
            own[counts[assign] < 2] = -np.inf
            moved = int(own.argmax())
            counts[assign[moved]] -= 1
            assign[moved] = j
            counts[j] += 1
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        new_centroids = np.vstack([x[assign == j].mean(axis=0) for j in range(k)])
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        inertia = float(((x - centroids[assign]) ** 2).sum())
        if inertia > prev_inertia + _MONOTONE_SLACK * max(1.0, prev_inertia):
            raise AssertionError(
                f"inertia increased across Lloyd iterations: {prev_inertia} -> {inertia}"
            )
        history.append(inertia)
        prev_inertia = inertia
        prev_assign = assign
        if shift < tol:
            break

    final_inertia = float(((x - centroids[assign]) ** 2).sum())
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=assign,
        inertia=final_inertia,
        iterations_used=iterations,
        inertia_history=history,
    )


def fit_hsk(
    embeddings: np.ndarray,
    k: int,
    tol: float = 1e-6,
    max_iter: int = 300,
) -> ClusterModel:
    """Ward initialization followed by Lloyd refinement; fully deterministic."""
    labels, _ = ward_partition(embeddings, k)
    initial = partition_means(embeddings, labels, k)
    return kmeans_refine(embeddings, initial, tol=tol, max_iter=max_iter)


def inertia(embeddings: np.ndarray, model: ClusterModel) -> float:
    """Recompute sum of squared distances of each point to its centroid."""
    x = np.asarray(embeddings, dtype=np.float64)
    if len(model.assignments) != x.shape[0]:
        raise ValueError("model assignments do not cover the embedding rows")
    return float(((x - model.centroids[model.assignments]) ** 2).sum())


def silhouette_score(embeddings: np.ndarray, assignments: np.ndarray) -> float:
    """Mean silhouette s(i) = (b - a)/max(a, b) over all points.

    a is the mean intra-cluster distance excluding the point itself and b
    the smallest mean distance to another cluster. Singleton clusters
    contribute 0 by convention, as does a point with a = b = 0.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    labels = np.asarray(assignments, dtype=np.int64)
    uniques = np.unique(labels)
    if len(uniques) < 2:
        raise ValueError("silhouette undefined for fewer than 2 clusters")
    dist = np.sqrt(_pairwise_sq_distances(x, x))
    scores = np.zeros(len(labels), dtype=np.float64)
    member_idx = {int(c): np.flatnonzero(labels == c) for c in uniques}
    for i in range(len(labels)):
        own = member_idx[int(labels[i])]
        if len(own) == 1:
            continue
        a = dist[i, own].sum() / (len(own) - 1)
        b = min(dist[i, member_idx[int(c)]].mean() for c in uniques if c != labels[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def sweep_k(
    embeddings: np.ndarray,
    k_range: range | list[int],
    tol: float = 1e-6,
    max_iter: int = 300,
) -> dict[int, KQuality]:
    """Fit at every k and record inertia plus silhouette for elbow plots."""
    n = len(embeddings)
    quality: dict[int, KQuality] = {}
    for k in k_range:
        if not 2 <= k <= n:
            raise ValueError(f"sweep k values must lie in [2, {n}], got {k}")
        model = fit_hsk(embeddings, k, tol=tol, max_iter=max_iter)
        quality[k] = KQuality(
            inertia=model.inertia,
            silhouette=silhouette_score(embeddings, model.assignments),
        )
    return quality


def baseline_kmeans(
    embeddings: np.ndarray,
    k: int,
    n_init: int = 100,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 300,
) -> ClusterModel:
    """Best-of-n_init random-initialization Lloyd runs, seeded reproducibly.

    Initial centroids are drawn as k distinct data rows from a single
    generator stream, so best-of-m considers a superset of best-of-(m-1)
    candidates for the same seed.
    """
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    x = np.asarray(embeddings, dtype=np.float64)
    rng = np.random.default_rng(seed)
    best: ClusterModel | None = None
    for _ in range(n_init):
        idx = rng.choice(x.shape[0], size=k, replace=False)
        model = kmeans_refine(x, x[idx], tol=tol, max_iter=max_iter)
        if best is None or model.inertia < best.inertia:
            best = model
    assert best is not None
    return best


def compare_methods(
    embeddings: np.ndarray,
    k_range: range | list[int],
    n_init: int = 100,
    seed: int = 0,
) -> dict[int, dict[str, float]]:
    """Silhouette of the stabilized fit versus best-of-n random k-means, per k."""
    out: dict[int, dict[str, float]] = {}
    for k in k_range:
        stabilized = fit_hsk(embeddings, k)
        baseline = baseline_kmeans(embeddings, k, n_init=n_init, seed=seed)
        out[k] = {
            "hsk_silhouette": silhouette_score(embeddings, stabilized.assignments),
            "baseline_silhouette": silhouette_score(embeddings, baseline.assignments),
            "hsk_inertia": stabilized.inertia,
            "baseline_inertia": baseline.inertia,
        }
    return out


def model_to_json(model: ClusterModel) -> str:
    payload = {
        "k": model.k,
        "centroids": [[float(v) for v in row] for row in model.centroids],
        "assignments": {str(i): int(c) for i, c in enumerate(model.assignments)},
        "inertia": model.inertia,
        "iterations_used": model.iterations_used,
    }
    return json.dumps(payload, sort_keys=True)


def model_from_json(text: str) -> ClusterModel:
    payload = json.loads(text)
    assignments = np.array(
        [payload["assignments"][str(i)] for i in range(len(payload["assignments"]))],
        dtype=np.int64,
    )
    return ClusterModel(
        k=int(payload["k"]),
        centroids=np.array(payload["centroids"], dtype=np.float64),
        assignments=assignments,
        inertia=float(payload["inertia"]),
        iterations_used=int(payload["iterations_used"]),
    )


def write_sweep_csv(quality: dict[int, KQuality], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "inertia", "silhouette"])
        for k in sorted(quality):
            writer.writerow([k, repr(quality[k].inertia), repr(quality[k].silhouette)])
