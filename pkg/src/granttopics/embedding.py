"""Pretrained word vectors and TF-IDF-weighted document embeddings.

Word vectors load from word2vec text format. Each document becomes the
weighted average of its in-store token vectors, weights taken from the
fitted TF-IDF model. Summation runs in ascending vocabulary-index order so
results are bitwise reproducible regardless of worker count.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from collections.abc import Sequence

import numpy as np

from .corpus import GrantRecord
from .text import DocumentTermWeights, TfIdfModel, doc_term_weights, tokenize

logger = logging.getLogger(__name__)

UNEMBEDDABLE = None


class VectorParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class WordVectorStore:
    """Token -> dense vector map with a fixed dimension."""

    dimension: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class EmbeddingMatrix:
    """Per-document embedding rows aligned with ``record_ids``."""

    record_ids: list[str]
    vectors: np.ndarray  # shape (n_documents, dimension)

    def __len__(self) -> int:
        return len(self.record_ids)


def load_word_vectors(path: str | Path, format: str = "word2vec-text") -> WordVectorStore:
    """Parse a word2vec text file: header "<count> <dim>", then token + floats.

    Duplicate tokens keep the last occurrence (logged); a line whose value
    count disagrees with the declared dimension is a parse error.
    """
    if format != "word2vec-text":
        raise ValueError(f"unsupported vector format {format!r}")
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorParseError("header must be '<count> <dimension>'", 1)
        try:
            _, dim = int(header[0]), int(header[1])
        except ValueError:
            raise VectorParseError("header must be '<count> <dimension>'", 1) from None
        if dim < 1:
            raise VectorParseError(f"dimension must be >= 1, got {dim}", 1)
        for line_no, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise VectorParseError(
                    f"expected {dim} values for token {token!r}, got {len(values)}", line_no
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise VectorParseError(f"non-numeric value for token {token!r}", line_no) from None
            if token in vectors:
                logger.warning("duplicate token %r at line %d; keeping last occurrence", token, line_no)
            vectors[token] = vec
    return WordVectorStore(dimension=dim, vectors=vectors)


def embed_document(store: WordVectorStore, weights: DocumentTermWeights,
                   vocabulary: dict[str, int] | None = None) -> np.ndarray | None:
    """Weighted average of the vectors of tokens present in both inputs.

    Returns None (the unembeddable signal) when no weighted token is in the
    store. Tokens are accumulated in ascending vocabulary index (falling
    back to lexicographic order when no vocabulary is given) so the sum
    order is canonical.
    """
    if vocabulary is not None:
        ordered = sorted((t for t in weights if t in store.vectors), key=vocabulary.__getitem__)
    else:
        ordered = sorted(t for t in weights if t in store.vectors)
    if not ordered:
        return UNEMBEDDABLE
    acc = np.zeros(store.dimension, dtype=np.float64)
    total = 0.0
    for tok in ordered:
        w = weights[tok]
        acc += w * store.vectors[tok]
        total += w
    return acc / total


def embed_corpus(
    store: WordVectorStore,
    model: TfIdfModel,
    records: Sequence[GrantRecord],
    stop_words: frozenset[str] | None = None,
    threads: int = 1,
) -> tuple[EmbeddingMatrix, list[str]]:
    """Embed every record abstract; unembeddable documents are excluded.

    Returns the embedding matrix (corpus order preserved over embeddable
    documents) and the list of excluded record ids. Raises ValueError when
    nothing is embeddable. ``threads`` caps the worker pool; results are
    identical for any thread count.
    """
    n = len(records)
    rows: list[np.ndarray | None] = [None] * n

    def work(i: int) -> None:
        weights = doc_term_weights(model, tokenize(records[i].abstract, stop_words))
        rows[i] = embed_document(store, weights, model.vocabulary)

    if threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(n)))
    else:
        for i in range(n):
            work(i)

    excluded = [records[i].record_id for i in range(n) if rows[i] is None]
    kept = [(records[i].record_id, rows[i]) for i in range(n) if rows[i] is not None]
    if not kept:
        raise ValueError("all documents are unembeddable")
    if excluded:
        logger.info("excluded %d unembeddable document(s)", len(excluded))
    in_store = sum(1 for t in model.vocabulary if t in store.vectors)
    store_miss = len(model.vocabulary) - in_store
    if store_miss:
        logger.info("%d vocabulary token(s) missing from the vector store", store_miss)
    matrix = np.vstack([vec for _, vec in kept])
    if not np.isfinite(matrix).all():
        raise ValueError("embedding matrix contains non-finite values")
    return EmbeddingMatrix(record_ids=[rid for rid, _ in kept], vectors=matrix), excluded


def write_matrix_csv(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write rows as ``id,v1..vD`` with shortest round-trip float formatting."""
    dim = matrix.vectors.shape[1]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"v{i + 1}" for i in range(dim)])
        for rid, row in zip(matrix.record_ids, matrix.vectors):
            writer.writerow([rid] + [repr(float(x)) for x in row])


def read_matrix_csv(path: str | Path) -> EmbeddingMatrix:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        dim = len(header) - 1
        ids: list[str] = []
        rows: list[list[float]] = []
        for row in reader:
            if not row:
                continue
            if len(row) != dim + 1:
                raise ValueError(f"expected {dim + 1} columns, got {len(row)}")
            ids.append(row[0])
            rows.append([float(x) for x in row[1:]])
    return EmbeddingMatrix(record_ids=ids, vectors=np.array(rows, dtype=np.float64).reshape(len(ids), dim))
