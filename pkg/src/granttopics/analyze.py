"""Cluster summaries for naming, funding trends, rankings and quadrant growth.

All operations are pure functions of the fitted model plus the embedded
corpus (records aligned row-for-row with the embedding matrix). Dollar
arithmetic is integer throughout, so totals are conserved exactly.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from collections.abc import Sequence

import numpy as np

from .cluster import ClusterModel
from .corpus import GrantRecord
from .text import DocumentTermWeights

logger = logging.getLogger(__name__)

TOP_TOKENS = 10
NEAREST_DOCS = 10


@dataclass
class ClusterSummary:
    cluster_label: int
    top_tokens: list[str]
    nearest_documents: list[str]
    size: int


@dataclass
class TopicTrend:
    """Annual funding series for one cluster plus its growth statistics."""

    cluster_label: int
    annual_totals: dict[int, int]
    ols_slope: float = 0.0
    endpoint_delta: int = 0
    rank: int = 0
    first_funded_year: int | None = None
    last_funded_year: int | None = None
    emerged: bool = False
    extinct: bool = False
    endpoint_zero_filled: bool = False


@dataclass(frozen=True)
class AxisConfig:
    """Semantic names for the projection half-planes (analyst orientation)."""

    x_negative: str = "diagnostics"
    x_positive: str = "therapeutics"
    y_negative: str = "physics"
    y_positive: str = "biology"


@dataclass
class QuadrantReport:
    """Mean growth per quadrant and half-plane of the centered projection."""

    quadrants: dict[str, dict]
    half_planes: dict[str, dict]
    per_grant: bool = False


def cluster_summary(
    model: ClusterModel,
    weights: Sequence[DocumentTermWeights],
    embeddings: np.ndarray,
    records: Sequence[GrantRecord],
) -> list[ClusterSummary]:
    """Top tokens by summed TF-IDF weight and nearest unique documents per cluster.

    Token ties break lexicographically. Nearest documents are ordered by
    (distance to centroid, record id) and de-duplicated by abstract text so
    renewals collapse to the closest copy.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if not (len(weights) == x.shape[0] == len(records) == len(model.assignments)):
        raise ValueError("weights, embeddings, records and assignments must align")
    summaries = []
    for label in range(model.k):
        members = np.flatnonzero(model.assignments == label)
        scores: defaultdict[str, float] = defaultdict(float)
        for i in members:
            for tok, w in weights[i].items():
                scores[tok] += w
        top = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_TOKENS]
        dist = np.sqrt(((x[members] - model.centroids[label]) ** 2).sum(axis=1))
        order = sorted(zip(dist, (records[i].record_id for i in members), members))
        nearest: list[str] = []
        seen_abstracts: set[str] = set()
        for _, rid, i in order:
            if records[i].abstract in seen_abstracts:
                continue
            seen_abstracts.add(records[i].abstract)
            nearest.append(rid)
            if len(nearest) == NEAREST_DOCS:
                break
        summaries.append(
            ClusterSummary(
                cluster_label=label,
                top_tokens=[t for t, _ in top],
                nearest_documents=nearest,
                size=len(members),
            )
        )
    return summaries


def annual_totals(
    records: Sequence[GrantRecord],
    assignments: np.ndarray,
    year_range: tuple[int, int],
) -> dict[int, dict[int, int]]:
    """Dollars per (cluster, fiscal year), zero-filled across the full range."""
    if len(records) != len(assignments):
        raise ValueError("assignments must cover the corpus")
    start, end = year_range
    labels = sorted({int(c) for c in assignments})
    series = {c: {y: 0 for y in range(start, end + 1)} for c in labels}
    for rec, label in zip(records, assignments):
        series[int(label)][rec.fiscal_year] += rec.amount
    return series


def growth_rate(series: dict[int, int]) -> tuple[float, int]:
    """Least-squares slope (dollars/year) and last-minus-first delta."""
    if len(series) < 2:
        raise ValueError("growth rate needs at least 2 years")
    years = np.array(sorted(series), dtype=np.float64)
    dollars = np.array([series[int(y)] for y in years], dtype=np.float64)
    xc = years - years.mean()
    slope = float((xc * (dollars - dollars.mean())).sum() / (xc * xc).sum())
    delta = int(series[int(years[-1])] - series[int(years[0])])
    return slope, delta


def emergence_extinction(
    trends: Sequence[TopicTrend], year_range: tuple[int, int]
) -> dict[int, tuple[int | None, int | None, bool, bool]]:
    """Lifespan flags per cluster: (first, last, emerged, extinct).

    A topic emerged if its first funded year is after the range start and
    went extinct if its last funded year is before the range end. A topic
    with no funded year at all gets None endpoints and neither flag.
    """
    start, end = year_range
    out = {}
    for t in trends:
        funded = [y for y, v in sorted(t.annual_totals.items()) if v > 0]
        if funded:
            first, last = funded[0], funded[-1]
            out[t.cluster_label] = (first, last, first > start, last < end)
        else:
            out[t.cluster_label] = (None, None, False, False)
    return out


def build_trends(
    records: Sequence[GrantRecord],
    assignments: np.ndarray,
    year_range: tuple[int, int],
) -> list[TopicTrend]:
    """Annual totals, growth statistics and lifespan flags for every cluster."""
    start, end = year_range
    trends = []
    for label, series in annual_totals(records, assignments, year_range).items():
        slope, delta = growth_rate(series)
        trends.append(
            TopicTrend(
                cluster_label=label,
                annual_totals=series,
                ols_slope=slope,
                endpoint_delta=delta,
                endpoint_zero_filled=series[start] == 0 or series[end] == 0,
            )
        )
    flags = emergence_extinction(trends, year_range)
    for t in trends:
        t.first_funded_year, t.last_funded_year, t.emerged, t.extinct = flags[t.cluster_label]
    return rank_topics(trends)[0]


def rank_topics(trends: Sequence[TopicTrend]) -> tuple[list[TopicTrend], float]:
    """Rank 1 = steepest funding growth; ties go to the lower cluster label.

    Returns the trends sorted by rank together with the mean slope across
    topics.
    """
    ordered = sorted(trends, key=lambda t: (-t.ols_slope, t.cluster_label))
    for pos, t in enumerate(ordered, start=1):
        t.rank = pos
    mean_slope = float(np.mean([t.ols_slope for t in trends])) if trends else 0.0
    return ordered, mean_slope


def cluster_sizes(model: ClusterModel) -> dict[int, int]:
    counts = np.bincount(model.assignments, minlength=model.k)
    return {label: int(c) for label, c in enumerate(counts)}


def _region_of(cx: float, cy: float, axes: AxisConfig, context: str) -> tuple[str, str, str]:
    if cx == 0.0 or cy == 0.0:
        logger.warning("%s lies exactly on an axis; assigned to the positive side", context)
    x_name = axes.x_positive if cx >= 0 else axes.x_negative
    y_name = axes.y_positive if cy >= 0 else axes.y_negative
    return f"{y_name}-{x_name}", x_name, y_name


def quadrant_growth(
    points: np.ndarray,
    model: ClusterModel,
    trends: Sequence[TopicTrend],
    axes: AxisConfig = AxisConfig(),
    per_grant: bool = False,
) -> QuadrantReport:
    """Mean growth per quadrant/half-plane of the centered 2-D projection.

    Cluster centroids in projection space are centered on their own mean;
    each cluster falls in a quadrant by coordinate signs (exact zero goes
    to the positive side with a warning). By default regions average the
    slopes of their member clusters; with ``per_grant`` every document
    contributes its own projected position and its cluster's slope, so a
    cluster may span several regions.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[0] != len(model.assignments):
        raise ValueError("projection rows must align with model assignments")
    slopes = {t.cluster_label: t.ols_slope for t in trends}
    centroids_2d = np.vstack(
        [pts[model.assignments == label].mean(axis=0) for label in range(model.k)]
    )
    centered_centroids = centroids_2d - centroids_2d.mean(axis=0)

    quadrant_members: defaultdict[str, list] = defaultdict(list)
    quadrant_slopes: defaultdict[str, list] = defaultdict(list)
    half_members: defaultdict[str, list] = defaultdict(list)
    half_slopes: defaultdict[str, list] = defaultdict(list)

    if per_grant:
        centered_pts = pts - centroids_2d.mean(axis=0)
        for i, label in enumerate(model.assignments):
            label = int(label)
            quad, x_name, y_name = _region_of(
                float(centered_pts[i, 0]), float(centered_pts[i, 1]), axes, f"grant row {i}"
            )
            quadrant_members[quad].append(label)
            quadrant_slopes[quad].append(slopes[label])
            for name in (x_name, y_name):
                half_members[name].append(label)
                half_slopes[name].append(slopes[label])
    else:
        for label in range(model.k):
            cx, cy = centered_centroids[label]
            quad, x_name, y_name = _region_of(float(cx), float(cy), axes, f"cluster {label}")
            quadrant_members[quad].append(label)
            quadrant_slopes[quad].append(slopes[label])
            for name in (x_name, y_name):
                half_members[name].append(label)
                half_slopes[name].append(slopes[label])

    def summarize(members: dict, slope_lists: dict, names: list[str]) -> dict[str, dict]:
        out = {}
        for name in names:
            labels = sorted(set(members.get(name, [])))
            vals = slope_lists.get(name, [])
            out[name] = {
                "clusters": labels,
                "mean_growth": float(np.mean(vals)) if vals else 0.0,
                "n": len(vals),
            }
        return out

    quad_names = [
        f"{y}-{x}"
        for y in (axes.y_positive, axes.y_negative)
        for x in (axes.x_positive, axes.x_negative)
    ]
    half_names = [axes.y_positive, axes.y_negative, axes.x_positive, axes.x_negative]
    return QuadrantReport(
        quadrants=summarize(quadrant_members, quadrant_slopes, quad_names),
        half_planes=summarize(half_members, half_slopes, half_names),
        per_grant=per_grant,
    )


def summaries_to_json(summaries: Sequence[ClusterSummary]) -> str:
    return json.dumps(
        [
            {
                "cluster_label": s.cluster_label,
                "top_tokens": s.top_tokens,
                "nearest_documents": s.nearest_documents,
                "size": s.size,
            }
            for s in summaries
        ],
        sort_keys=True,
    )


def write_naming_template(
    path: str | Path,
    summaries: Sequence[ClusterSummary],
    records: Sequence[GrantRecord],
) -> None:
    """Editable CSV naming sheet: label, placeholder name, evidence columns."""
    titles = {r.record_id: r.title for r in records}
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "name", "top_tokens", "nearest_titles"])
        for s in summaries:
            writer.writerow(
                [
                    s.cluster_label,
                    f"topic-{s.cluster_label}",
                    " ".join(s.top_tokens),
                    " | ".join(titles.get(rid, "") for rid in s.nearest_documents),
                ]
            )


def read_topic_names(path: str | Path) -> dict[int, str]:
    """Read the analyst-edited naming sheet; first two columns are label, name."""
    names: dict[int, str] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return names
        for row in reader:
            if len(row) < 2 or not row[1].strip():
                continue
            names[int(row[0])] = row[1].strip()
    return names


def write_trend_csv(
    path: str | Path,
    trends: Sequence[TopicTrend],
    year_range: tuple[int, int],
    names: dict[int, str] | None = None,
) -> None:
    names = names or {}
    start, end = year_range
    years = list(range(start, end + 1))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["label", "name", "slope", "endpoint_delta", "rank", "first_year",
             "last_year", "emerged", "extinct", "endpoint_zero_filled"]
            + [f"total_{y}" for y in years]
        )
        for t in sorted(trends, key=lambda t: t.rank):
            writer.writerow(
                [
                    t.cluster_label,
                    names.get(t.cluster_label, str(t.cluster_label)),
                    repr(t.ols_slope),
                    t.endpoint_delta,
                    t.rank,
                    "" if t.first_funded_year is None else t.first_funded_year,
                    "" if t.last_funded_year is None else t.last_funded_year,
                    int(t.emerged),
                    int(t.extinct),
                    int(t.endpoint_zero_filled),
                ]
                + [t.annual_totals[y] for y in years]
            )


def quadrant_to_json(report: QuadrantReport) -> str:
    return json.dumps(
        {
            "per_grant": report.per_grant,
            "quadrants": report.quadrants,
            "half_planes": report.half_planes,
        },
        sort_keys=True,
    )
