"""Document-level inference from per-word topic distributions."""

import numpy as np
import pytest

from cwibtd.corpus import Document
from cwibtd.errors import InferenceError, VocabularyMismatch
from cwibtd.inference import (
    DocTopicDistribution,
    assign_cluster,
    format_inference_line,
    infer_corpus,
    infer_doc_topics,
)
from cwibtd.sampler import ModelParams, train_model

from conftest import corpus_from_tokens, two_topic_docs


def _doc(ids):
    return Document(np.asarray(ids, dtype=np.int32))


def _theta(rows, covered_words, vocab_size):
    mat = np.zeros((vocab_size, len(rows[0])))
    covered = np.zeros(vocab_size, dtype=bool)
    for w, row in zip(covered_words, rows):
        mat[w] = row
        covered[w] = True
    return mat, covered


class TestInferDocTopics:
    def test_single_word_reduces_to_its_row(self):
        theta, covered = _theta([(0.9, 0.1)], [0], 1)
        dist = infer_doc_topics(_doc([0]), theta, covered)
        assert np.allclose(dist.p, [0.9, 0.1])
        assert dist.coverage == 1.0

    def test_frequency_weighted_mixture(self):
        # [w1, w1, w2] with rows (1,0) and (0,1): raw = (2/3, 1/3)
        theta, covered = _theta([(1.0, 0.0), (0.0, 1.0)], [0, 1], 2)
        dist = infer_doc_topics(_doc([0, 0, 1]), theta, covered)
        assert np.allclose(dist.raw, [2 / 3, 1 / 3])
        assert np.allclose(dist.p, [2 / 3, 1 / 3])
        assert dist.coverage == 1.0

    def test_uncovered_words_excluded_and_renormalized(self):
        theta, covered = _theta([(0.8, 0.2)], [0], 3)
        dist = infer_doc_topics(_doc([0, 1, 2]), theta, covered)
        assert np.allclose(dist.p, [0.8, 0.2])
        assert dist.coverage == pytest.approx(1 / 3)

    def test_zero_coverage_gives_uniform(self):
        theta, covered = _theta([(0.8, 0.2)], [0], 3)
        dist = infer_doc_topics(_doc([1, 2]), theta, covered)
        assert np.allclose(dist.p, [0.5, 0.5])
        assert dist.coverage == 0.0
        assert not dist.informative

    def test_empty_document(self):
        theta, covered = _theta([(0.8, 0.2)], [0], 1)
        dist = infer_doc_topics(_doc([]), theta, covered)
        assert np.allclose(dist.p, [0.5, 0.5])
        assert dist.coverage == 0.0

    def test_concatenation_linearity(self):
        # raw vector of d1 + d2 equals the length-weighted combination of
        # the per-document raw vectors
        rng = np.random.default_rng(17)
        vocab_size, k = 10, 3
        rows = rng.dirichlet(np.ones(k), size=7)
        theta, covered = _theta(rows, list(range(7)), vocab_size)
        for _ in range(30):
            d1 = rng.integers(0, vocab_size, size=rng.integers(1, 8)).tolist()
            d2 = rng.integers(0, vocab_size, size=rng.integers(1, 8)).tolist()
            r1 = infer_doc_topics(_doc(d1), theta, covered).raw
            r2 = infer_doc_topics(_doc(d2), theta, covered).raw
            both = infer_doc_topics(_doc(d1 + d2), theta, covered).raw
            n1, n2 = len(d1), len(d2)
            expected = (n1 * r1 + n2 * r2) / (n1 + n2)
            assert np.allclose(both, expected, atol=1e-12)

    def test_coverage_bounds(self):
        rng = np.random.default_rng(18)
        theta, covered = _theta(rng.dirichlet(np.ones(2), size=5), range(5), 9)
        for _ in range(50):
            ids = rng.integers(0, 9, size=rng.integers(1, 10))
            dist = infer_doc_topics(_doc(ids), theta, covered)
            assert 0.0 <= dist.coverage <= 1.0
            if set(ids.tolist()) <= set(range(5)):
                assert dist.coverage == 1.0
            if dist.coverage > 0:
                assert dist.p.sum() == pytest.approx(1.0, abs=1e-9)


class TestAssignCluster:
    def test_argmax(self):
        dist = DocTopicDistribution(
            raw=np.array([0.1, 0.7, 0.2]), p=np.array([0.1, 0.7, 0.2]), coverage=1.0
        )
        assert assign_cluster(dist) == 1

    def test_tie_breaks_to_lowest_id(self):
        dist = DocTopicDistribution(
            raw=np.array([0.5, 0.5]), p=np.array([0.5, 0.5]), coverage=1.0
        )
        assert assign_cluster(dist) == 0

    def test_scale_invariance(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            p = rng.random(4)
            for c in (1e-6, 1.0, 37.5):
                a = DocTopicDistribution(raw=p, p=p, coverage=1.0)
                b = DocTopicDistribution(raw=p * c, p=p * c, coverage=1.0)
                assert assign_cluster(a) == assign_cluster(b)


class TestInferCorpus:
    def _model_and_corpus(self, kind):
        rng = np.random.default_rng(23)
        docs, labels = two_topic_docs(rng, n_per_topic=20, words_per_topic=15, doc_len=8)
        corpus = corpus_from_tokens(docs, labels, ["A", "B"])
        return train_model(kind, corpus, ModelParams(iterations=30, seed=1)), corpus

    def test_lda_labels_its_training_corpus(self):
        model, corpus = self._model_and_corpus("lda")
        labels, coverage, probs = infer_corpus(model, corpus)
        assert labels.shape[0] == corpus.n_docs
        assert np.all(coverage == 1.0)
        assert np.allclose(probs.sum(axis=1), 1.0)

    def test_lda_rejects_other_document_counts(self):
        model, corpus = self._model_and_corpus("lda")
        smaller = corpus_from_tokens([["t0w0", "t0w1"]], [0], ["A"])
        # same vocabulary is required before the size check can trigger
        smaller.vocab = corpus.vocab
        with pytest.raises(InferenceError):
            infer_corpus(model, smaller)

    def test_vocabulary_hash_checked(self):
        model, corpus = self._model_and_corpus("cwibtd")
        other = corpus_from_tokens([["x", "y"], ["y", "x"]], [0, 1], ["A", "B"])
        with pytest.raises(VocabularyMismatch):
            infer_corpus(model, other)

    def test_network_model_covers_connected_words(self):
        model, corpus = self._model_and_corpus("cwibtd")
        labels, coverage, probs = infer_corpus(model, corpus)
        assert labels.shape[0] == corpus.n_docs
        assert np.all((coverage >= 0) & (coverage <= 1))
        assert np.allclose(probs.sum(axis=1), 1.0)


class TestLineFormat:
    def test_six_decimal_places(self):
        line = format_inference_line(3, 1, 0.5, np.array([0.25, 0.75]))
        assert line == "3\t1\t0.500000\t0.250000 0.750000"
