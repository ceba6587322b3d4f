"""From raw abstract text to one dense vector per document.

Shows tokenization rules, vocabulary pruning, the smoothed IDF weights,
and the TF-IDF-weighted average of pretrained word vectors.
"""

import math
from pathlib import Path

import numpy as np

from granttopics import build_vocabulary, doc_term_weights, embed_corpus, fit_tfidf, tokenize
from granttopics.embedding import load_word_vectors
from granttopics import synthetic

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

print("tokenize('The DNA-damage response') ->", tokenize("The DNA-damage response"))
print("tokenize('p53 p53 P53')             ->", tokenize("p53 p53 P53"))
print("tokenize('40 mg at week 2')         ->", tokenize("40 mg at week 2"))

docs = [
    "radiation dose escalation in prostate cancer",
    "prostate cancer imaging with novel tracers",
    "tumor hypoxia and radiation response",
    "deep learning for tumor segmentation in imaging",
]
streams = [tokenize(d) for d in docs]
model = fit_tfidf(build_vocabulary(streams, min_count=1))
print(f"\nvocabulary ({len(model.vocabulary)} tokens):", sorted(model.vocabulary)[:8], "...")

# idf falls as document frequency rises; ln((1+N)/(1+df)) + 1
for token in ("cancer", "imaging", "hypoxia"):
    print(f"  df({token}) = {model.df[token]}, idf = {model.idf[token]:.6f}")
assert model.idf["hypoxia"] == math.log((1 + 4) / (1 + 1)) + 1

weights = doc_term_weights(model, streams[0])
print("\ndoc 0 term weights:", {t: round(w, 4) for t, w in sorted(weights.items())})

# embed a synthetic corpus against synthetic word vectors
records, _ = synthetic.make_corpus(n_docs=30, n_topics=3, seed=5)
vec_path = OUT / "demo_vectors.txt"
synthetic.write_vectors(vec_path, n_topics=3, dimension=16, seed=6)
store = load_word_vectors(vec_path)
streams = [tokenize(r.abstract) for r in records]
tfidf = fit_tfidf(build_vocabulary(streams, min_count=1))
matrix, excluded = embed_corpus(store, tfidf, records)
print(f"\nembedded {len(matrix)} documents into {matrix.vectors.shape[1]}-dim vectors")
print("exclusions:", excluded)
print("row norms (first 5):", np.linalg.norm(matrix.vectors[:5], axis=1).round(3))
