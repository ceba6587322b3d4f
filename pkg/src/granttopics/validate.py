"""Manual-validation quiz generation and agreement statistics.

A quiz item shows one grant (title + abstract) and five cluster options,
each rendered as its top TF-IDF tokens; exactly one option is the model's
assignment. Scoring yields accuracy, Cohen's kappa against the model,
inter-rater kappa on dual-reviewed items, and a two-sample KS comparison
of distance-to-centroid between correct and wrong picks.
"""

from __future__ import annotations

import json
import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from collections.abc import Sequence

import numpy as np

from .cluster import ClusterModel
from .corpus import GrantRecord
from .analyze import ClusterSummary
from .embedding import EmbeddingMatrix


class QuizError(ValueError):
    pass


@dataclass
class QuizItem:
    quiz_id: str
    record_id: str
    title: str
    abstract: str
    options: list[tuple[int, tuple[str, ...]]]  # (cluster label, its top tokens)
    answer_index: int  # position of the model-assigned option; kept out of the form
    seed: int


@dataclass(frozen=True)
class QuizResponse:
    quiz_id: str
    reviewer_id: str
    choice: int


@dataclass
class ReviewPlan:
    """Reviewer assignment per quiz item; dual items carry two reviewers."""

    assignments: dict[str, list[int]] = field(default_factory=dict)

    @property
    def n_slots(self) -> int:
        return sum(len(v) for v in self.assignments.values())

    @property
    def n_dual(self) -> int:
        return sum(1 for v in self.assignments.values() if len(v) == 2)


@dataclass
class AgreementReport:
    accuracy: float
    cohen_kappa: float
    n_responses: int
    per_reviewer: dict[str, dict]
    interrater_kappa: float | None
    unvisited_clusters: list[int]
    ks_statistic: float | None = None
    ks_p_value: float | None = None


def generate_quiz(
    model: ClusterModel,
    summaries: Sequence[ClusterSummary],
    records: Sequence[GrantRecord],
    sample_fraction: float,
    n_reviewers: int,
    overlap_fraction: float,
    seed: int,
    stratified: bool = False,
) -> tuple[list[QuizItem], ReviewPlan]:
    """Sample documents, build 5-option items and a balanced review plan.

    The sample is drawn without replacement over record ids in sorted
    order, so the plan depends only on the seed and the id set, not on
    corpus row order. ``overlap_fraction`` is the share of total review
    slots used for second reviews: items = n, duals = n*f/(1-f), slots =
    n + duals (300 items at 0.25 gives 400 slots, 100 dual). Distractor
    clusters come uniformly without replacement from the other k-1; with
    ``stratified`` the sample is spread over clusters proportionally.
    """
    if model.k < 5:
        raise QuizError("need >=5 clusters for 5-option quiz")
    n = len(records)
    if len(model.assignments) != n:
        raise ValueError("records must align with model assignments")
    n_items = round(sample_fraction * n)
    if n_items < 1:
        raise QuizError("sample_fraction too small: no items to generate")
    if not 0.0 <= overlap_fraction < 0.5:
        raise QuizError("overlap_fraction must lie in [0, 0.5)")
    n_dual = round(n_items * overlap_fraction / (1.0 - overlap_fraction))
    if n_dual > 0 and n_reviewers < 2:
        raise QuizError("dual review requires at least 2 reviewers")
    if n_reviewers < 1:
        raise QuizError("need at least 1 reviewer")

    tokens_by_label = {s.cluster_label: tuple(s.top_tokens) for s in summaries}
    order = np.argsort(np.array([r.record_id for r in records]))
    rng = np.random.default_rng(seed)
    if stratified:
        chosen: list[int] = []
        by_cluster: defaultdict[int, list[int]] = defaultdict(list)
        for pos in order:
            by_cluster[int(model.assignments[pos])].append(int(pos))
        remaining = n_items
        labels = sorted(by_cluster)
        for j, label in enumerate(labels):
            members = by_cluster[label]
            want = round(n_items * len(members) / n)
            want = min(max(want, 0), len(members), remaining)
            if j == len(labels) - 1:
                want = min(remaining, len(members))
            if want:
                chosen.extend(int(i) for i in rng.choice(members, size=want, replace=False))
            remaining -= want
        sampled = chosen[:n_items]
    else:
        sampled = [int(order[i]) for i in rng.choice(n, size=n_items, replace=False)]

    items: list[QuizItem] = []
    plan = ReviewPlan()
    for item_no, doc in enumerate(sampled):
        rec = records[doc]
        assigned = int(model.assignments[doc])
        others = [c for c in range(model.k) if c != assigned]
        distractors = [int(c) for c in rng.choice(others, size=4, replace=False)]
        option_labels = [assigned] + distractors
        perm = rng.permutation(5)
        shuffled = [option_labels[i] for i in perm]
        quiz_id = f"q{item_no:04d}"
        items.append(
            QuizItem(
                quiz_id=quiz_id,
                record_id=rec.record_id,
                title=rec.title,
                abstract=rec.abstract,
                options=[(lab, tokens_by_label[lab]) for lab in shuffled],
                answer_index=shuffled.index(assigned),
                seed=seed,
            )
        )
        if item_no < n_dual:
            first = item_no % n_reviewers
            plan.assignments[quiz_id] = [first, (first + 1) % n_reviewers]
        else:
            plan.assignments[quiz_id] = [(item_no - n_dual) % n_reviewers]
    return items, plan


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Chance-corrected agreement between two equal-length label sequences.

    kappa = (p_o - p_e) / (1 - p_e), with p_e from the marginal products.
    Evaluated in integer arithmetic (one final division) so hand-worked
    tables reproduce exactly.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError("label sequences must have equal length")
    if not labels_a:
        raise ValueError("label sequences must be non-empty")
    n = len(labels_a)
    agreements = sum(1 for a, b in zip(labels_a, labels_b) if a == b)
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    chance = sum(count * counts_b.get(c, 0) for c, count in counts_a.items())
    denominator = n * n - chance  # zero iff p_e = 1
    if denominator == 0:
        raise ValueError("kappa undefined: degenerate marginals (p_e = 1)")
    return (n * agreements - chance) / denominator


def _kolmogorov_sf(lam: float) -> float:
    """Asymptotic two-sided Kolmogorov survival function Q(lambda)."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) < 1e-16:
            break
    return min(max(2.0 * total, 0.0), 1.0)


def ks_two_sample(sample_a: Sequence[float], sample_b: Sequence[float]) -> tuple[float, float]:
    """Two-sample KS statistic D and its asymptotic p-value.

    D is the supremum gap between the two empirical CDFs. The p-value uses
    the Kolmogorov series with the standard small-sample correction:
    lambda = (sqrt(e) + 0.12 + 0.11/sqrt(e)) * D, e = mn/(m+n).
    """
    a = np.sort(np.asarray(sample_a, dtype=np.float64))
    b = np.sort(np.asarray(sample_b, dtype=np.float64))
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / m
    cdf_b = np.searchsorted(b, pooled, side="right") / n
    d = float(np.abs(cdf_a - cdf_b).max())
    if d == 0.0:
        return 0.0, 1.0
    e = m * n / (m + n)
    lam = (math.sqrt(e) + 0.12 + 0.11 / math.sqrt(e)) * d
    return d, _kolmogorov_sf(lam)


@dataclass
class DistanceSplit:
    """Distance-to-centroid comparison between correct and wrong picks."""

    degenerate: bool
    correct: dict
    wrong: dict
    ks_statistic: float | None = None
    p_value: float | None = None
    bin_edges: list[float] = field(default_factory=list)
    correct_hist: list[int] = field(default_factory=list)
    wrong_hist: list[int] = field(default_factory=list)


def score_agreement(
    items: Sequence[QuizItem], responses: Sequence[QuizResponse]
) -> AgreementReport:
    """Accuracy and kappa of human picks against the model's assignments.

    Kappa is computed over the full cluster-label space (chosen cluster vs
    assigned cluster). The inter-rater kappa covers items answered by two
    different reviewers. Clusters never appearing as a sampled item's
    assignment are reported as unvisited.
    """
    if not responses:
        raise ValueError("empty response set")
    by_id = {item.quiz_id: item for item in items}
    chosen: list[int] = []
    assigned: list[int] = []
    hits = 0
    per_reviewer: defaultdict[str, list[tuple[int, int]]] = defaultdict(list)
    by_item: defaultdict[str, list[QuizResponse]] = defaultdict(list)
    for resp in responses:
        item = by_id.get(resp.quiz_id)
        if item is None:
            raise ValueError(f"response references unknown quiz_id {resp.quiz_id!r}")
        if not 0 <= resp.choice < len(item.options):
            raise ValueError(f"choice {resp.choice} out of range for {resp.quiz_id}")
        picked = item.options[resp.choice][0]
        model_label = item.options[item.answer_index][0]
        chosen.append(picked)
        assigned.append(model_label)
        hits += picked == model_label
        per_reviewer[resp.reviewer_id].append((picked, model_label))
        by_item[resp.quiz_id].append(resp)

    accuracy = hits / len(responses)
    kappa = cohen_kappa(chosen, assigned)

    reviewer_stats = {}
    for reviewer, pairs in sorted(per_reviewer.items()):
        r_acc = sum(1 for p, m in pairs if p == m) / len(pairs)
        try:
            r_kappa = cohen_kappa([p for p, _ in pairs], [m for _, m in pairs])
        except ValueError:
            r_kappa = None
        reviewer_stats[reviewer] = {"n": len(pairs), "accuracy": r_acc, "kappa": r_kappa}

    pair_a: list[int] = []
    pair_b: list[int] = []
    for quiz_id in sorted(by_item):
        rs = sorted(by_item[quiz_id], key=lambda r: r.reviewer_id)
        if len(rs) == 2 and rs[0].reviewer_id != rs[1].reviewer_id:
            item = by_id[quiz_id]
            pair_a.append(item.options[rs[0].choice][0])
            pair_b.append(item.options[rs[1].choice][0])
    interrater = None
    if pair_a:
        try:
            interrater = cohen_kappa(pair_a, pair_b)
        except ValueError:
            interrater = None

    option_labels = {lab for item in items for lab, _ in item.options}
    visited = {item.options[item.answer_index][0] for item in items}
    unvisited = sorted(option_labels - visited)

    return AgreementReport(
        accuracy=accuracy,
        cohen_kappa=kappa,
        n_responses=len(responses),
        per_reviewer=reviewer_stats,
        interrater_kappa=interrater,
        unvisited_clusters=unvisited,
    )


def distance_split_analysis(
    items: Sequence[QuizItem],
    responses: Sequence[QuizResponse],
    embeddings: EmbeddingMatrix,
    model: ClusterModel,
    bins: int = 20,
) -> DistanceSplit:
    """KS comparison of distance-to-assigned-centroid, correct vs wrong picks.

    Every review contributes once (a dual-reviewed document appears per
    response). With either group empty the split is degenerate and no test
    runs.
    """
    by_id = {item.quiz_id: item for item in items}
    row_of = {rid: i for i, rid in enumerate(embeddings.record_ids)}
    correct: list[float] = []
    wrong: list[float] = []
    for resp in responses:
        item = by_id.get(resp.quiz_id)
        if item is None:
            raise ValueError(f"response references unknown quiz_id {resp.quiz_id!r}")
        row = row_of[item.record_id]
        label = int(model.assignments[row])
        dist = float(np.sqrt(((embeddings.vectors[row] - model.centroids[label]) ** 2).sum()))
        (correct if resp.choice == item.answer_index else wrong).append(dist)

    def describe(vals: list[float]) -> dict:
        if not vals:
            return {"n": 0, "mean": None, "median": None}
        return {"n": len(vals), "mean": float(np.mean(vals)), "median": float(np.median(vals))}

    if not correct or not wrong:
        return DistanceSplit(degenerate=True, correct=describe(correct), wrong=describe(wrong))

    d, p = ks_two_sample(correct, wrong)
    pooled = correct + wrong
    edges = np.linspace(min(pooled), max(pooled), bins + 1)
    if edges[0] == edges[-1]:
        edges = np.array([edges[0], edges[0] + 1.0])
    c_hist, _ = np.histogram(correct, bins=edges)
    w_hist, _ = np.histogram(wrong, bins=edges)
    return DistanceSplit(
        degenerate=False,
        correct=describe(correct),
        wrong=describe(wrong),
        ks_statistic=d,
        p_value=p,
        bin_edges=[float(e) for e in edges],
        correct_hist=[int(c) for c in c_hist],
        wrong_hist=[int(w) for w in w_hist],
    )


def write_quiz_jsonl(items: Sequence[QuizItem], path: str | Path) -> None:
    """One item per line, without the answer index (kept in the key file)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps({
                "quiz_id": item.quiz_id,
                "record_id": item.record_id,
                "title": item.title,
                "abstract": item.abstract,
                "options": [
                    {"tokens": list(tokens)} for _, tokens in item.options
                ],
                "seed": item.seed,
            }, sort_keys=True))
            fh.write("\n")


def write_answer_key(items: Sequence[QuizItem], path: str | Path) -> None:
    key = {
        item.quiz_id: {
            "answer_index": item.answer_index,
            "option_labels": [lab for lab, _ in item.options],
            "record_id": item.record_id,
        }
        for item in items
    }
    Path(path).write_text(json.dumps(key, sort_keys=True), encoding="utf-8")


def read_quiz_jsonl(items_path: str | Path, key_path: str | Path) -> list[QuizItem]:
    key = json.loads(Path(key_path).read_text(encoding="utf-8"))
    items = []
    with Path(items_path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            entry = key[raw["quiz_id"]]
            items.append(
                QuizItem(
                    quiz_id=raw["quiz_id"],
                    record_id=raw["record_id"],
                    title=raw["title"],
                    abstract=raw["abstract"],
                    options=[
                        (int(lab), tuple(opt["tokens"]))
                        for lab, opt in zip(entry["option_labels"], raw["options"])
                    ],
                    answer_index=int(entry["answer_index"]),
                    seed=int(raw["seed"]),
                )
            )
    return items


def write_quiz_sheet(items: Sequence[QuizItem], path: str | Path) -> None:
    """Plain-text review sheet: title, abstract, five token-list options."""
    lines: list[str] = []
    for item in items:
        lines.append(f"=== {item.quiz_id} ===")
        lines.append(item.title)
        lines.append("")
        lines.append(item.abstract)
        lines.append("")
        for idx, (_, tokens) in enumerate(item.options):
            lines.append(f"  [{idx}] {', '.join(tokens)}")
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def write_plan_json(plan: ReviewPlan, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps({"assignments": plan.assignments, "n_slots": plan.n_slots,
                    "n_dual": plan.n_dual}, sort_keys=True),
        encoding="utf-8",
    )


def read_responses_csv(path: str | Path) -> list[QuizResponse]:
    """Responses as CSV ``quiz_id,reviewer_id,choice``."""
    responses = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in ("quiz_id", "reviewer_id", "choice"):
            if col not in (reader.fieldnames or []):
                raise ValueError(f"responses file missing column '{col}'")
        for raw in reader:
            responses.append(
                QuizResponse(
                    quiz_id=raw["quiz_id"],
                    reviewer_id=raw["reviewer_id"],
                    choice=int(raw["choice"]),
                )
            )
    return responses


def report_to_json(report: AgreementReport, split: DistanceSplit | None = None) -> str:
    payload = {
        "accuracy": report.accuracy,
        "cohen_kappa": report.cohen_kappa,
        "n_responses": report.n_responses,
        "per_reviewer": report.per_reviewer,
        "interrater_kappa": report.interrater_kappa,
        "unvisited_clusters": report.unvisited_clusters,
    }
    if split is not None:
        payload["distance_split"] = {
            "degenerate": split.degenerate,
            "correct": split.correct,
            "wrong": split.wrong,
            "ks_statistic": split.ks_statistic,
            "p_value": split.p_value,
            "bin_edges": split.bin_edges,
            "correct_hist": split.correct_hist,
            "wrong_hist": split.wrong_hist,
        }
    return json.dumps(payload, sort_keys=True)
