"""Funding trends per extracted topic: growth slopes, ranks, lifespans, quadrants.

Builds a synthetic corpus whose later topics get systematically larger and
faster-growing awards, then reports annual totals, OLS growth, rank order,
emergence/extinction flags, and half-plane growth on the 2-D projection.
"""

from pathlib import Path

import numpy as np

from granttopics import (
    AxisConfig,
    TsneConfig,
    build_trends,
    cluster_sizes,
    cluster_summary,
    fit_hsk,
    quadrant_growth,
    rank_topics,
    tsne_project,
)
from granttopics.analyze import write_naming_template, write_trend_csv, read_topic_names
from granttopics.embedding import load_word_vectors, embed_corpus
from granttopics.text import build_vocabulary, doc_term_weights, fit_tfidf, tokenize
from granttopics import synthetic

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

records, _ = synthetic.make_corpus(n_docs=200, n_topics=5, seed=9)
vec_path = OUT / "trend_vectors.txt"
synthetic.write_vectors(vec_path, n_topics=5, dimension=32, seed=10)
store = load_word_vectors(vec_path)
streams = [tokenize(r.abstract) for r in records]
tfidf = fit_tfidf(build_vocabulary(streams, min_count=1))
matrix, _ = embed_corpus(store, tfidf, records)
model = fit_hsk(matrix.vectors, 5)
print("cluster sizes:", cluster_sizes(model))

weights = [doc_term_weights(tfidf, tokenize(r.abstract)) for r in records]
summaries = cluster_summary(model, weights, matrix.vectors, records)
for s in summaries[:2]:
    print(f"cluster {s.cluster_label}: top tokens {s.top_tokens[:4]}..., "
          f"{s.size} members, nearest {s.nearest_documents[:2]}")

write_naming_template(OUT / "topic_names.csv", summaries, records)
names = read_topic_names(OUT / "topic_names.csv")  # analyst would edit this file
print("naming template round-trip:", names)

year_range = (2000, 2020)
trends = build_trends(records, model.assignments, year_range)
ranked, mean_slope = rank_topics(trends)
print(f"\nmean growth across topics: ${mean_slope:,.0f}/yr")
print("rank  label  slope($/yr)  delta($)     lifespan")
for t in ranked:
    lifespan = f"{t.first_funded_year}-{t.last_funded_year}"
    flags = ("emerged" if t.emerged else "") + (" extinct" if t.extinct else "")
    print(f"  {t.rank:2d}   {t.cluster_label:3d}   {t.ols_slope:10,.0f}  {t.endpoint_delta:10,d}  {lifespan} {flags}")

total = sum(sum(t.annual_totals.values()) for t in trends)
assert total == sum(r.amount for r in records), "dollar conservation"
print(f"dollars conserved exactly: ${total:,}")

write_trend_csv(OUT / "trends.csv", trends, year_range, names)
print(f"trend table written to {OUT / 'trends.csv'}")

proj = tsne_project(matrix.vectors, TsneConfig(perplexity=15.0, iterations=500))
report = quadrant_growth(proj.points, model, trends, AxisConfig())
print("\nhalf-plane mean growth ($/yr):")
for name, info in report.half_planes.items():
    print(f"  {name:>13}: {info['mean_growth']:10,.0f}  clusters {info['clusters']}")
