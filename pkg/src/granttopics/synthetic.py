"""Seeded synthetic corpus and word-vector generators for demos and tests.

Documents are built from disjoint per-topic vocabularies and token vectors
sit near orthogonal topic axes, so the planted partition is recoverable
and every artifact of a run is reproducible from the seed alone.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .corpus import GrantRecord

FILLER = (
    "study aim propose method result patient clinical data analysis develop "
    "approach novel measure evaluate test model system design"
).split()


def topic_vocabulary(topic: int, tokens_per_topic: int = 20) -> list[str]:
    return [f"term{topic}x{j:02d}" for j in range(tokens_per_topic)]


def make_corpus(
    n_docs: int = 500,
    n_topics: int = 5,
    seed: int = 7,
    tokens_per_topic: int = 20,
    year_range: tuple[int, int] = (2000, 2020),
    with_filler: bool = False,
) -> tuple[list[GrantRecord], np.ndarray]:
    """Synthetic grant records with a planted topic per document.

    Returns the records plus the planted topic labels. Each abstract draws
    55-90 tokens from its own topic's vocabulary (meeting the default
    50-token inclusion floor), optionally mixed with a few shared filler
    words. Later topics get systematically larger awards so funding trends
    differ by topic.
    """
    rng = np.random.default_rng(seed)
    start, end = year_range
    records: list[GrantRecord] = []
    labels = np.empty(n_docs, dtype=np.int64)
    for i in range(n_docs):
        topic = int(rng.integers(n_topics))
        labels[i] = topic
        vocab = topic_vocabulary(topic, tokens_per_topic)
        length = int(rng.integers(55, 91))
        words = [vocab[int(j)] for j in rng.integers(len(vocab), size=length)]
        if with_filler:
            extra = [FILLER[int(j)] for j in rng.integers(len(FILLER), size=5)]
            words = words + extra
        year = int(rng.integers(start, end + 1))
        amount = int(rng.integers(50, 500)) * 1000 * (topic + 1) + (year - start) * 2000 * topic
        records.append(
            GrantRecord(
                record_id=f"G{i:05d}",
                title=f"Synthetic study {i} on topic {topic}",
                abstract=" ".join(words),
                fiscal_year=year,
                amount=amount,
                institute="CA",
                activity_code="R01",
                department="Radiation-Diagnostic/Oncology",
            )
        )
    return records, labels


def make_vector_lines(
    n_topics: int = 5,
    tokens_per_topic: int = 20,
    dimension: int = 64,
    seed: int = 11,
    include_filler: bool = False,
) -> list[str]:
    """word2vec-text lines whose token vectors cluster on orthogonal topic axes."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n_topics, dimension))
    axes, _ = np.linalg.qr(raw.T)
    axes = axes.T[:n_topics]
    tokens: list[tuple[str, np.ndarray]] = []
    for topic in range(n_topics):
        for tok in topic_vocabulary(topic, tokens_per_topic):
            vec = axes[topic] + 0.05 * rng.standard_normal(dimension)
            tokens.append((tok, vec))
    if include_filler:
        for tok in FILLER:
            tokens.append((tok, 0.02 * rng.standard_normal(dimension)))
    lines = [f"{len(tokens)} {dimension}"]
    for tok, vec in tokens:
        lines.append(tok + " " + " ".join(repr(float(v)) for v in vec))
    return lines


def write_vectors(path: str | Path, **kwargs) -> None:
    Path(path).write_text("\n".join(make_vector_lines(**kwargs)) + "\n", encoding="utf-8")
