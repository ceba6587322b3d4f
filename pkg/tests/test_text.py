import math

import pytest
from hypothesis import given, strategies as st

from granttopics.text import (
    TfIdfModel,
    VocabularyError,
    build_vocabulary,
    doc_term_weights,
    fit_tfidf,
    load_stop_words,
    make_token_counter,
    model_from_json,
    model_to_json,
    tokenize,
)


class TestTokenize:
    def test_hand_example_with_stop_word_and_hyphen(self):
        assert tokenize("The DNA-damage response") == ["dna", "damage", "response"]

    def test_empty_text(self):
        assert tokenize("") == []

    def test_alphanumeric_token_survives_case_folded(self):
        assert tokenize("p53 p53 P53") == ["p53", "p53", "p53"]

    def test_numeric_and_single_char_tokens_dropped(self):
        assert tokenize("x 2020 40mg q7 dose") == ["40mg", "q7", "dose"]

    def test_custom_stop_words(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("dose\nq7\n")
        stops = load_stop_words(path)
        assert tokenize("q7 dose tumor", stops) == ["tumor"]

    def test_bundled_list_size(self):
        assert 250 <= len(load_stop_words()) <= 400


class TestBuildVocabulary:
    STREAMS = [["a", "b"], ["a"], ["a", "c"]]

    def test_hand_counts(self):
        model = build_vocabulary(self.STREAMS, min_count=1)
        assert set(model.vocabulary) == {"a", "b", "c"}
        assert model.df == {"a": 3, "b": 1, "c": 1}
        assert model.n_documents == 3

    def test_min_count_prunes(self):
        model = build_vocabulary(self.STREAMS, min_count=3)
        assert set(model.vocabulary) == {"a"}

    def test_all_pruned_is_error(self):
        with pytest.raises(VocabularyError, match="min_count"):
            build_vocabulary(self.STREAMS, min_count=10)

    def test_indices_lexicographic(self):
        model = build_vocabulary([["zeta", "alpha", "mid"]] * 2, min_count=1)
        assert model.vocabulary == {"alpha": 0, "mid": 1, "zeta": 2}

    def test_order_invariance(self):
        a = build_vocabulary(self.STREAMS, min_count=1)
        b = build_vocabulary(list(reversed(self.STREAMS)), min_count=1)
        assert a.vocabulary == b.vocabulary
        assert a.df == b.df


class TestFitTfidf:
    def test_token_in_all_documents_gets_idf_one(self):
        model = build_vocabulary([["t"], ["t"], ["t"]], min_count=1)
        fit_tfidf(model)
        assert model.idf["t"] == 1.0

    def test_single_document_corpus(self):
        model = build_vocabulary([["t"]], min_count=1)
        fit_tfidf(model)
        assert model.idf["t"] == 1.0

    def test_direct_formula_value(self):
        # N=4, df=1: ln(5/2) + 1
        model = TfIdfModel(vocabulary={"t": 0}, df={"t": 1}, n_documents=4)
        fit_tfidf(model)
        assert model.idf["t"] == pytest.approx(1.9162907319, abs=1e-10)
        assert model.idf["t"] == math.log(5 / 2) + 1

    def test_idf_strictly_decreasing_in_df(self):
        model = TfIdfModel(
            vocabulary={"a": 0, "b": 1, "c": 2},
            df={"a": 1, "b": 5, "c": 10},
            n_documents=10,
        )
        fit_tfidf(model)
        assert model.idf["a"] > model.idf["b"] > model.idf["c"] == 1.0


class TestDocTermWeights:
    def fitted(self, df, n):
        model = TfIdfModel(vocabulary={t: i for i, t in enumerate(sorted(df))}, df=df, n_documents=n)
        return fit_tfidf(model)

    def test_out_of_vocabulary_skipped(self):
        model = self.fitted({"known": 1}, 4)
        assert doc_term_weights(model, ["unknown", "other"]) == {}

    def test_formula_value(self):
        model = self.fitted({"t": 1}, 4)
        weights = doc_term_weights(model, ["t", "t", "t"])
        assert weights["t"] == pytest.approx(5.7488721957, abs=1e-10)

    def test_single_token_idf_one(self):
        model = self.fitted({"t": 4}, 4)
        assert doc_term_weights(model, ["t"]) == {"t": 1.0}

    @given(st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=30),
           st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=30))
    def test_additive_under_concatenation(self, d1, d2):
        model = self.fitted({"a": 1, "b": 2, "c": 3}, 5)
        w1 = doc_term_weights(model, d1)
        w2 = doc_term_weights(model, d2)
        combined = doc_term_weights(model, d1 + d2)
        expected = {t: w1.get(t, 0.0) + w2.get(t, 0.0) for t in set(w1) | set(w2)}
        assert combined.keys() == expected.keys()
        for t in expected:
            assert combined[t] == pytest.approx(expected[t], rel=1e-12)

    def test_weights_strictly_positive(self):
        model = self.fitted({"a": 1, "b": 2}, 3)
        weights = doc_term_weights(model, ["a", "b", "b"])
        assert all(w > 0 for w in weights.values())


class TestTokenCounter:
    def test_pre_pruning_counts_all_kept_tokens(self):
        counter = make_token_counter()
        assert counter("the tumor margin") == 2

    def test_vocabulary_restricted_counts(self):
        counter = make_token_counter(vocabulary={"tumor": 0})
        assert counter("the tumor margin tumor") == 2


def test_model_json_round_trip():
    model = fit_tfidf(build_vocabulary([["aa", "bb"], ["aa"]], min_count=1))
    clone = model_from_json(model_to_json(model))
    assert clone == model
