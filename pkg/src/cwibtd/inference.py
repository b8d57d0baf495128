"""Document-level topic inference from word-level topic distributions.

For network models a document's topic distribution is the word-frequency
weighted mixture of its words' distributions:

    P(z|d) = sum_w P(z|w) * n_d(w)/Len(d)

renormalized over the words the model actually covers (words outside the
pruned network carry no topic information). `coverage` reports the
fraction of tokens that contributed; a document with zero covered tokens
gets the uniform distribution and coverage 0 rather than an error, so
batch evaluation never aborts. LDA bypasses the mixture: its trained
theta rows are per-document already, and since folding-in is out of
scope an LDA model can only label the corpus it was trained on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Document
from .errors import InferenceError, VocabularyMismatch
from .sampler import TrainedModel


@dataclass
class DocTopicDistribution:
    """Topic distribution of one document.

    raw is the unnormalized mixture (useful for aggregation identities),
    p the renormalized distribution, coverage the fraction of tokens with
    topic information. coverage == 0 flags an uninformative document: p
    is then uniform by convention.
    """

    raw: np.ndarray
    p: np.ndarray
    coverage: float

    @property
    def informative(self) -> bool:
        return self.coverage > 0.0


def infer_doc_topics(
    doc: Document,
    word_theta: np.ndarray,
    covered: np.ndarray,
) -> DocTopicDistribution:
    """Mix the per-word topic rows of `doc`'s covered words, weighted by
    within-document frequency, and renormalize.

    word_theta is (V, K); covered marks the words that have a row.
    """
    n_topics = word_theta.shape[1]
    n = doc.length
    if n == 0:
        uniform = np.full(n_topics, 1.0 / n_topics)
        return DocTopicDistribution(raw=np.zeros(n_topics), p=uniform, coverage=0.0)

    ids, counts = np.unique(doc.tokens, return_counts=True)
    mask = covered[ids]
    covered_tokens = int(counts[mask].sum())
    if covered_tokens == 0:
        uniform = np.full(n_topics, 1.0 / n_topics)
        return DocTopicDistribution(raw=np.zeros(n_topics), p=uniform, coverage=0.0)

    weights = counts[mask].astype(np.float64) / n
    raw = weights @ word_theta[ids[mask]]
    return DocTopicDistribution(
        raw=raw,
        p=raw / raw.sum(),
        coverage=covered_tokens / n,
    )


def assign_cluster(dist: DocTopicDistribution) -> int:
    """Cluster label = most probable topic; ties go to the lowest id."""
    return int(np.argmax(dist.p))


def infer_corpus(
    model: TrainedModel, corpus
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Label and topic distribution for every document of `corpus`.

    Returns (labels, coverage, probs) with probs of shape (n_docs, K).
    Network models handle any corpus encoded against their vocabulary;
    LDA requires its own training corpus (theta rows align by position).
    """
    if corpus.vocab.sha256() != model.vocab_hash:
        raise VocabularyMismatch(
            "corpus was encoded against a different vocabulary than the model"
        )
    n = corpus.n_docs
    k = model.config.n_topics
    labels = np.zeros(n, dtype=np.int32)
    coverage = np.zeros(n, dtype=np.float64)
    probs = np.zeros((n, k), dtype=np.float64)

    if model.theta_rows == "document":
        if model.theta.shape[0] != n:
            raise InferenceError(
                f"lda model was trained on {model.theta.shape[0]} documents, "
                f"got {n}; lda cannot infer unseen documents"
            )
        for i, doc in enumerate(corpus.docs):
            if doc.length > 0:
                probs[i] = model.theta[i]
                coverage[i] = 1.0
            else:
                probs[i] = 1.0 / k
            labels[i] = int(np.argmax(probs[i]))
        return labels, coverage, probs

    word_theta, covered = model.word_topic_matrix()
    for i, doc in enumerate(corpus.docs):
        dist = infer_doc_topics(doc, word_theta, covered)
        labels[i] = assign_cluster(dist)
        coverage[i] = dist.coverage
        probs[i] = dist.p
    return labels, coverage, probs


def predict_corpus(model: TrainedModel, corpus) -> tuple[np.ndarray, np.ndarray]:
    """Cluster label and coverage per document (see infer_corpus)."""
    labels, coverage, _ = infer_corpus(model, corpus)
    return labels, coverage


def format_inference_line(
    doc_index: int, cluster: int, coverage: float, p: np.ndarray
) -> str:
    """Batch output row: `doc_index\\tcluster\\tcoverage\\tp_0 p_1 ...`,
    probabilities with 6 decimal places."""
    probs = " ".join(f"{x:.6f}" for x in p)
    return f"{doc_index}\t{cluster}\t{coverage:.6f}\t{probs}"
