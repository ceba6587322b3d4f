"""Exact t-SNE for 2-D visualization of document embeddings.

Quadratic-cost reference implementation: per-row bandwidths from a binary
search on conditional-distribution entropy, symmetrized joint affinities,
and momentum gradient descent on KL(P||Q) with a Student-t low-dimensional
kernel. Initialization uses the first two principal components (not a
random draw), so repeated runs produce bitwise-identical layouts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

P_FLOOR = 1e-12
ENTROPY_TOL = 1e-5
MAX_SEARCH_STEPS = 50
KL_CHECKPOINT_EVERY = 50


class CalibrationError(ValueError):
    """Bandwidth binary search failed for some row."""


class ProjectionError(RuntimeError):
    """Optimization produced non-finite coordinates."""

    def __init__(self, iteration: int):
        super().__init__(f"non-finite embedding at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class TsneConfig:
    """Optimizer settings; defaults follow the usual reference schedule.

    Early exaggeration multiplies the affinities for the first
    ``exaggeration_iters`` iterations, and momentum switches from 0.5 to
    0.8 at the same point. ``seed`` is recorded for provenance; the PCA
    initialization makes the run deterministic without it.
    """

    perplexity: float = 30.0
    learning_rate: float = 200.0
    iterations: int = 1000
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.perplexity <= 1:
            raise ValueError("perplexity must exceed 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class Projection2D:
    """2-D coordinates aligned with the embedding rows, plus the KL trail."""

    points: np.ndarray  # (n, 2)
    final_kl: float
    kl_trace: list[tuple[int, float]] = field(default_factory=list)


def _row_entropy_bits(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def calibrate_affinities(
    embeddings: np.ndarray, perplexity: float
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized joint affinities P and the per-row bandwidths sigma.

    Each row's Gaussian precision is bisected until the conditional
    distribution's entropy matches log2(perplexity) within 1e-5 bits (at
    most 50 steps, else an error naming the row). P is symmetrized to
    (P_cond + P_cond^T)/(2n) with off-diagonal entries floored at 1e-12.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    n = x.shape[0]
    if n < 3:
        raise ValueError("need at least 3 points to calibrate affinities")
    if not 1 < perplexity <= n - 1:
        raise ValueError(f"perplexity must lie in (1, {n - 1}], got {perplexity}")
    sq = (x * x).sum(axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    target = np.log2(perplexity)
    cond = np.zeros((n, n), dtype=np.float64)
    sigmas = np.empty(n, dtype=np.float64)
    for i in range(n):
        others = np.concatenate([np.arange(i), np.arange(i + 1, n)])
        d = d2[i, others]
        d = d - d.min()  # shift-invariant; keeps exp() in range
        beta, beta_min, beta_max = 1.0, 0.0, np.inf
        p = np.full(len(others), 1.0 / len(others))
        diff = np.inf
        for _ in range(MAX_SEARCH_STEPS):
            w = np.exp(-beta * d)
            p = w / w.sum()
            diff = _row_entropy_bits(p) - target
            if abs(diff) <= ENTROPY_TOL:
                break
            if diff > 0:
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = (beta + beta_min) / 2.0
        if abs(diff) > ENTROPY_TOL:
            raise CalibrationError(f"entropy search did not converge for row {i}")
        cond[i, others] = p
        sigmas[i] = np.sqrt(1.0 / (2.0 * beta))
    joint = (cond + cond.T) / (2.0 * n)
    off = ~np.eye(n, dtype=bool)
    joint[off] = np.maximum(joint[off], P_FLOOR)
    return joint, sigmas


def _student_t_q(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sq = (y * y).sum(axis=1)
    num = 1.0 / (1.0 + np.maximum(sq[:, None] + sq[None, :] - 2.0 * (y @ y.T), 0.0))
    np.fill_diagonal(num, 0.0)
    q = num / num.sum()
    return np.maximum(q, P_FLOOR), num


def kl_divergence(p: np.ndarray, y: np.ndarray) -> float:
    """KL(P||Q) of the Student-t layout ``y`` against affinities ``p``."""
    q, _ = _student_t_q(y)
    off = ~np.eye(p.shape[0], dtype=bool)
    pe = p[off]
    qe = q[off]
    mask = pe > 0
    return float((pe[mask] * np.log(pe[mask] / qe[mask])).sum())


def kl_gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic gradient of KL(P||Q) with respect to the 2-D coordinates."""
    q, num = _student_t_q(y)
    w = (p - q) * num
    return 4.0 * (w.sum(axis=1)[:, None] * y - w @ y)


def pca_init(embeddings: np.ndarray) -> np.ndarray:
    """First two principal components, sign-fixed, first column scaled to sd 1e-4."""
    x = np.asarray(embeddings, dtype=np.float64)
    centered = x - x.mean(axis=0)
    u, s, _ = np.linalg.svd(centered, full_matrices=False)
    if len(s) < 2 or s[1] <= s[0] * 1e-14 or s[0] == 0.0:
        raise ValueError("embeddings are degenerate; PCA initialization needs 2 components")
    scores = u[:, :2] * s[:2]
    for j in range(2):
        if scores[np.abs(scores[:, j]).argmax(), j] < 0:
            scores[:, j] = -scores[:, j]
    return scores / np.std(scores[:, 0]) * 1e-4


def tsne_project(embeddings: np.ndarray, config: TsneConfig = TsneConfig()) -> Projection2D:
    """Optimize a 2-D layout of the embeddings under the given config.

    KL checkpoints (against the un-exaggerated affinities) are recorded
    every 50 iterations and at the final one. Raises ProjectionError with
    the iteration number if coordinates stop being finite.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    n = x.shape[0]
    if n < 4:
        raise ValueError("need at least 4 points to project")
    if config.perplexity >= n / 3:
        raise ValueError(f"perplexity must be below n/3 = {n / 3:.2f}, got {config.perplexity}")
    p, _ = calibrate_affinities(x, config.perplexity)

    y = pca_init(x)
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    trace: list[tuple[int, float]] = []
    # the isfinite check is the failure mechanism; silence the overflow noise
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, config.iterations + 1):
            exaggerating = it <= config.exaggeration_iters
            p_eff = p * config.early_exaggeration if exaggerating else p
            q, num = _student_t_q(y)
            w = (p_eff - q) * num
            grad = 4.0 * (w.sum(axis=1)[:, None] * y - w @ y)
            momentum = 0.5 if it <= config.exaggeration_iters else 0.8
            same_sign = (grad > 0) == (velocity > 0)
            gains = np.where(same_sign, gains * 0.8, gains + 0.2)
            np.clip(gains, 0.01, None, out=gains)
            velocity = momentum * velocity - config.learning_rate * (gains * grad)
            y = y + velocity
            y = y - y.mean(axis=0)
            if not np.isfinite(y).all():
                raise ProjectionError(it)
            if it % KL_CHECKPOINT_EVERY == 0 or it == config.iterations:
                trace.append((it, kl_divergence(p, y)))
    return Projection2D(points=y, final_kl=trace[-1][1], kl_trace=trace)


def write_projection_csv(
    path: str | Path,
    record_ids: list[str],
    projection: Projection2D,
    labels: np.ndarray,
) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record_id", "x", "y", "cluster_label"])
        for rid, (px, py), lab in zip(record_ids, projection.points, labels):
            writer.writerow([rid, repr(float(px)), repr(float(py)), int(lab)])


def write_kl_log(path: str | Path, projection: Projection2D) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "kl"])
        for it, kl in projection.kl_trace:
            writer.writerow([it, repr(kl)])
