"""The 5-option manual-validation loop with simulated reviewers.

Generates the quiz and review plan, simulates reviewers who answer
correctly whenever the document sits close to its centroid, then scores
accuracy, Cohen's kappa, inter-rater agreement, and the KS distance split.
"""

from pathlib import Path

import numpy as np

from granttopics import (
    QuizResponse,
    cohen_kappa,
    distance_split_analysis,
    fit_hsk,
    generate_quiz,
    ks_two_sample,
    score_agreement,
)
from granttopics.analyze import cluster_summary
from granttopics.embedding import embed_corpus, load_word_vectors
from granttopics.text import build_vocabulary, doc_term_weights, fit_tfidf, tokenize
from granttopics.validate import write_answer_key, write_quiz_jsonl, write_quiz_sheet
from granttopics import synthetic

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

records, _ = synthetic.make_corpus(n_docs=240, n_topics=6, seed=21)
vec_path = OUT / "quiz_vectors.txt"
synthetic.write_vectors(vec_path, n_topics=6, dimension=24, seed=22)
store = load_word_vectors(vec_path)
streams = [tokenize(r.abstract) for r in records]
tfidf = fit_tfidf(build_vocabulary(streams, min_count=1))
matrix, _ = embed_corpus(store, tfidf, records)
model = fit_hsk(matrix.vectors, 6)
weights = [doc_term_weights(tfidf, tokenize(r.abstract)) for r in records]
summaries = cluster_summary(model, weights, matrix.vectors, records)

items, plan = generate_quiz(
    model, summaries, records,
    sample_fraction=0.5, n_reviewers=4, overlap_fraction=0.25, seed=33,
)
print(f"quiz: {len(items)} items, {plan.n_slots} review slots, {plan.n_dual} dual-reviewed")
write_quiz_jsonl(items, OUT / "quiz.jsonl")
write_answer_key(items, OUT / "quiz_key.json")
write_quiz_sheet(items, OUT / "quiz_sheet.txt")
print(f"form, key and printable sheet written to {OUT}")

# simulated reviewers: reliable on documents near their centroid, guessing otherwise
rng = np.random.default_rng(44)
row_of = {rid: i for i, rid in enumerate(matrix.record_ids)}
dist_of = {
    item.quiz_id: float(np.linalg.norm(
        matrix.vectors[row_of[item.record_id]]
        - model.centroids[model.assignments[row_of[item.record_id]]]
    ))
    for item in items
}
median_dist = float(np.median(list(dist_of.values())))
responses = []
for item in items:
    for reviewer in plan.assignments[item.quiz_id]:
        if dist_of[item.quiz_id] <= median_dist or rng.random() < 0.5:
            choice = item.answer_index
        else:
            choice = int(rng.integers(0, 5))
        responses.append(QuizResponse(item.quiz_id, f"reviewer{reviewer}", choice))

report = score_agreement(items, responses)
print(f"\naccuracy vs model: {report.accuracy:.3f}")
print(f"cohen kappa vs model: {report.cohen_kappa:.3f}")
print(f"inter-rater kappa on the overlap: {report.interrater_kappa:.3f}")
for reviewer, stats in report.per_reviewer.items():
    print(f"  {reviewer}: n={stats['n']}, accuracy={stats['accuracy']:.3f}")
if report.unvisited_clusters:
    print("clusters never sampled:", report.unvisited_clusters)

split = distance_split_analysis(items, responses, matrix, model)
print(f"\ndistance-to-centroid split (correct vs wrong picks):")
print(f"  correct: n={split.correct['n']}, mean={split.correct['mean']:.3f}")
print(f"  wrong:   n={split.wrong['n']}, mean={split.wrong['mean']:.3f}")
print(f"  KS D={split.ks_statistic:.3f}, p={split.p_value:.2e}")

# the KS machinery on its own
d, p = ks_two_sample([1.0, 2.0], [1.5, 2.5])
print(f"\nks_two_sample([1,2],[1.5,2.5]) -> D={d}, p={p:.3f}")
print("cohen_kappa of a sequence with itself:", cohen_kappa([1, 2, 3, 1], [1, 2, 3, 1]))
