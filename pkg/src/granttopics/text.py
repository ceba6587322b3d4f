"""Tokenization, stop-word removal, rare-token pruning and corpus TF-IDF weights.

The tokenizer is rule-based: case-fold, split on any non-alphanumeric
character, keep tokens that are at least two characters long and contain at
least one letter, then drop stop-words. A bundled English stop-word list is
shipped as package data and can be replaced by the caller.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


class VocabularyError(ValueError):
    """Raised when vocabulary construction cannot proceed."""


def load_stop_words(path: str | Path | None = None) -> frozenset[str]:
    """Load a stop-word list (one token per line); bundled list by default."""
    if path is None:
        data = resources.files("granttopics.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        data = Path(path).read_text("utf-8")
    return frozenset(w.strip() for w in data.splitlines() if w.strip())


_DEFAULT_STOP_WORDS = load_stop_words()


def tokenize(text: str, stop_words: frozenset[str] | None = None) -> list[str]:
    """Split ``text`` into lowercase word tokens.

    Rules: lowercase, split on any non-alphanumeric character, drop tokens
    shorter than 2 characters or without a letter (this removes purely
    numeric tokens), drop stop-words.
    """
    if stop_words is None:
        stop_words = _DEFAULT_STOP_WORDS
    pieces = "".join(c if c.isalnum() else " " for c in text.lower()).split()
    return [
        tok
        for tok in pieces
        if len(tok) >= 2 and any(c.isalpha() for c in tok) and tok not in stop_words
    ]


@dataclass
class TfIdfModel:
    """Corpus vocabulary with document frequencies and (optionally) IDF weights.

    ``vocabulary`` maps token -> index, indices assigned in lexicographic
    order. ``df`` counts documents containing each token, ``n_documents`` is
    the corpus size, and ``idf`` holds ln((1+N)/(1+df)) + 1 once fitted.
    """

    vocabulary: dict[str, int]
    df: dict[str, int]
    n_documents: int
    min_count: int = 50
    idf: dict[str, float] = field(default_factory=dict)

    @property
    def fitted(self) -> bool:
        return bool(self.idf)


DocumentTermWeights = dict[str, float]


def build_vocabulary(token_streams: Sequence[Sequence[str]], min_count: int = 50) -> TfIdfModel:
    """Build vocabulary and document frequencies from tokenized documents.

    Tokens whose total corpus count is below ``min_count`` are pruned.
    Raises VocabularyError if nothing survives.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    corpus_counts: Counter[str] = Counter()
    df_counts: Counter[str] = Counter()
    for tokens in token_streams:
        corpus_counts.update(tokens)
        df_counts.update(set(tokens))
    kept = sorted(t for t, c in corpus_counts.items() if c >= min_count)
    if not kept:
        raise VocabularyError("no tokens survive min_count")
    vocabulary = {tok: i for i, tok in enumerate(kept)}
    df = {tok: df_counts[tok] for tok in kept}
    return TfIdfModel(vocabulary=vocabulary, df=df, n_documents=len(token_streams), min_count=min_count)


def fit_tfidf(model: TfIdfModel) -> TfIdfModel:
    """Populate smoothed IDF weights: idf(t) = ln((1+N)/(1+df(t))) + 1."""
    n = model.n_documents
    model.idf = {tok: math.log((1.0 + n) / (1.0 + df)) + 1.0 for tok, df in model.df.items()}
    return model


def doc_term_weights(model: TfIdfModel, tokens: Iterable[str]) -> DocumentTermWeights:
    """Per-document TF-IDF weights: raw count times idf, vocabulary tokens only."""
    if not model.fitted:
        raise ValueError("model has no idf weights; call fit_tfidf first")
    counts = Counter(tok for tok in tokens if tok in model.vocabulary)
    return {tok: c * model.idf[tok] for tok, c in counts.items()}


def make_token_counter(
    stop_words: frozenset[str] | None = None,
    vocabulary: dict[str, int] | None = None,
) -> Callable[[str], int]:
    """Return a callback counting post-preprocessing tokens of a text.

    With ``vocabulary`` the count is restricted to in-vocabulary tokens
    (i.e. min-count pruning applied); without it, stop-word removal only.
    """

    def count(text: str) -> int:
        tokens = tokenize(text, stop_words)
        if vocabulary is not None:
            return sum(1 for t in tokens if t in vocabulary)
        return len(tokens)

    return count


def model_to_json(model: TfIdfModel) -> str:
    payload = {
        "vocabulary": model.vocabulary,
        "df": model.df,
        "n_documents": model.n_documents,
        "min_count": model.min_count,
        "idf": model.idf,
    }
    return json.dumps(payload, sort_keys=True)


def model_from_json(text: str) -> TfIdfModel:
    payload = json.loads(text)
    return TfIdfModel(
        vocabulary={t: int(i) for t, i in payload["vocabulary"].items()},
        df={t: int(c) for t, c in payload["df"].items()},
        n_documents=int(payload["n_documents"]),
        min_count=int(payload["min_count"]),
        idf={t: float(v) for t, v in payload["idf"].items()},
    )
