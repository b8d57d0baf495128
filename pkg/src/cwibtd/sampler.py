"""Collapsed Gibbs sampling for the shared LDA-style generative model.

One sampler serves all three model kinds: LDA runs it on real documents,
WNTM and CWIBTD run it on pseudo-documents built from the co-occurrence
network. A "document" here is just a token sequence; for network models
row i of theta is the topic distribution of word i's adjacency list.

The per-token resampling loop is the hot path. It is written once as a
plain-Python kernel over flat numpy arrays and JIT-compiled with numba
when available; the pure-Python fallback executes the identical source,
and all randomness is pre-drawn per sweep from a seeded numpy Generator,
so the two paths produce bit-identical chains.

A chain is strictly sequential (each token's draw reads the counts the
previous draw wrote): one chain, one thread. Independent chains with
different seeds share nothing and can run fully in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .conet import accumulate_pair_counts, prune
from .corpus import LabeledCorpus, Vocabulary
from .errors import EmptyInput, NumericalError
from .pseudodoc import PseudoDocumentSet, build_pseudo_docs

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

MODEL_KINDS = ("lda", "wntm", "cwibtd")

# alpha/beta defaults per model kind
MODEL_DEFAULTS = {
    "lda": (0.05, 0.01),
    "wntm": (0.1, 0.1),
    "cwibtd": (0.1, 0.1),
}


@dataclass(frozen=True)
class SamplerConfig:
    """Hyperparameters of one Gibbs chain."""

    n_topics: int
    alpha: float
    beta: float
    iterations: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.n_topics < 1:
            raise ValueError(f"n_topics must be >= 1, got {self.n_topics}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be > 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _sweep_kernel(token_words, token_docs, z, n_dk, n_wk, n_k,
                  alpha, beta, vbeta, uniforms, probs):
    """Resample every token once, in document/token order.

    For token i with word w in document d the collapsed conditional is

        P(z_i = k | rest) ∝ (n_dk[d,k] + α) (n_wk[w,k] + β) / (n_k[k] + Vβ)

    with the token's own counts removed first. The draw is inverse-CDF
    over the unnormalized weights, consuming uniforms[i]. Returns -1, or
    the token index whose weight vector was non-finite or non-positive.
    """
    n_topics = n_k.shape[0]
    for i in range(token_words.shape[0]):
        w = token_words[i]
        d = token_docs[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_wk[w, k_old] -= 1
        n_k[k_old] -= 1

        total = 0.0
        for k in range(n_topics):
            p = (n_dk[d, k] + alpha) * (n_wk[w, k] + beta) / (n_k[k] + vbeta)
            probs[k] = p
            total += p
        if not (total > 0.0) or not np.isfinite(total):
            return i

        target = uniforms[i] * total
        acc = 0.0
        k_new = n_topics - 1
        for k in range(n_topics):
            acc += probs[k]
            if target < acc:
                k_new = k
                break

        z[i] = k_new
        n_dk[d, k_new] += 1
        n_wk[w, k_new] += 1
        n_k[k_new] += 1
    return -1


if numba is not None:
    _sweep = numba.njit(cache=True)(_sweep_kernel)
else:  # pragma: no cover
    _sweep = _sweep_kernel


def warm_up_kernel() -> None:
    """Trigger JIT compilation outside any timed section."""
    tw = np.zeros(1, dtype=np.int32)
    td = np.zeros(1, dtype=np.int32)
    z = np.zeros(1, dtype=np.int32)
    n_dk = np.array([[1, 0]], dtype=np.int64)
    n_wk = np.array([[1, 0]], dtype=np.int64)
    n_k = np.array([1, 0], dtype=np.int64)
    _sweep(tw, td, z, n_dk, n_wk, n_k, 0.1, 0.1, 0.2,
           np.array([0.5]), np.empty(2))


@dataclass
class TopicModelState:
    """Per-token assignments plus the count matrices of collapsed Gibbs.

    Invariants (checked by invariants_ok, preserved by every sweep):
      * sum_k n_dk[d, k] == length of document d
      * sum_w n_wk[w, k] == n_k[k]
      * sum_k n_k[k]     == total token count
      * all counts >= 0
    """

    z: np.ndarray            # int32 (n_tokens,) topic of each token
    n_dk: np.ndarray         # int64 (n_docs, K)
    n_wk: np.ndarray         # int64 (V, K)
    n_k: np.ndarray          # int64 (K,)
    token_words: np.ndarray  # int32 (n_tokens,)
    token_docs: np.ndarray   # int32 (n_tokens,)
    doc_lengths: np.ndarray  # int64 (n_docs,)
    rng: np.random.Generator = field(repr=False)

    @property
    def n_tokens(self) -> int:
        return int(self.z.shape[0])

    @property
    def n_docs(self) -> int:
        return int(self.n_dk.shape[0])

    @property
    def n_topics(self) -> int:
        return int(self.n_k.shape[0])

    @property
    def vocab_size(self) -> int:
        return int(self.n_wk.shape[0])

    def invariants_ok(self) -> bool:
        return (
            np.array_equal(self.n_dk.sum(axis=1), self.doc_lengths)
            and np.array_equal(self.n_wk.sum(axis=0), self.n_k)
            and int(self.n_k.sum()) == self.n_tokens
            and int(self.n_dk.min(initial=0)) >= 0
            and int(self.n_wk.min(initial=0)) >= 0
        )


TrainInput = Union[LabeledCorpus, PseudoDocumentSet]


def _flatten(docs: TrainInput) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    if isinstance(docs, PseudoDocumentSet):
        lists = docs.token_lists()
        vocab_size = docs.vocab_size
    elif isinstance(docs, LabeledCorpus):
        lists = [d.tokens for d in docs.docs]
        vocab_size = docs.vocab.size
    else:
        raise TypeError(f"cannot sample over {type(docs).__name__}")
    if not lists:
        raise EmptyInput("no documents to sample over")
    doc_lengths = np.array([len(t) for t in lists], dtype=np.int64)
    n_tokens = int(doc_lengths.sum())
    if n_tokens == 0:
        raise EmptyInput("documents contain no tokens")
    token_words = np.concatenate(lists).astype(np.int32, copy=False)
    token_docs = np.repeat(
        np.arange(len(lists), dtype=np.int32), doc_lengths
    )
    return token_words, token_docs, doc_lengths, vocab_size


def init_state(docs: TrainInput, config: SamplerConfig) -> TopicModelState:
    """Assign every token a uniformly random topic and build the count
    matrices to match. Same seed, same input -> identical state."""
    token_words, token_docs, doc_lengths, vocab_size = _flatten(docs)
    rng = np.random.default_rng(config.seed)
    k = config.n_topics
    z = rng.integers(0, k, size=token_words.shape[0], dtype=np.int32)

    n_dk = np.zeros((len(doc_lengths), k), dtype=np.int64)
    n_wk = np.zeros((vocab_size, k), dtype=np.int64)
    np.add.at(n_dk, (token_docs, z), 1)
    np.add.at(n_wk, (token_words, z), 1)
    n_k = n_wk.sum(axis=0)

    return TopicModelState(
        z=z, n_dk=n_dk, n_wk=n_wk, n_k=n_k,
        token_words=token_words, token_docs=token_docs,
        doc_lengths=doc_lengths, rng=rng,
    )


def gibbs_sweep(state: TopicModelState, config: SamplerConfig) -> TopicModelState:
    """One full pass: every token resampled exactly once, in order.

    Mutates and returns `state`. Raises NumericalError when a weight
    vector is non-finite or non-positive (count corruption)."""
    uniforms = state.rng.random(state.n_tokens)
    probs = np.empty(config.n_topics, dtype=np.float64)
    bad = _sweep(
        state.token_words, state.token_docs, state.z,
        state.n_dk, state.n_wk, state.n_k,
        float(config.alpha), float(config.beta),
        float(state.vocab_size) * config.beta,
        uniforms, probs,
    )
    if bad >= 0:
        raise NumericalError(
            f"non-positive or non-finite sampling weights at token {bad}"
        )
    return state


def estimate_phi(state: TopicModelState, config: SamplerConfig) -> np.ndarray:
    """Smoothed topic-word distributions: phi[k, w] = (n_wk+β)/(n_k+Vβ)."""
    return (state.n_wk.T + config.beta) / (
        state.n_k[:, None] + state.vocab_size * config.beta
    )


def estimate_theta(state: TopicModelState, config: SamplerConfig) -> np.ndarray:
    """Smoothed doc-topic distributions: theta[d, k] = (n_dk+α)/(len_d+Kα)."""
    return (state.n_dk + config.alpha) / (
        state.doc_lengths[:, None] + config.n_topics * config.alpha
    )


def train(
    docs: TrainInput, config: SamplerConfig
) -> tuple[TopicModelState, np.ndarray, np.ndarray]:
    """Initialize and run the configured number of sweeps; estimate Phi
    and Theta from the final state (no within-chain averaging)."""
    state = init_state(docs, config)
    for _ in range(config.iterations):
        gibbs_sweep(state, config)
    return state, estimate_phi(state, config), estimate_theta(state, config)


@dataclass(frozen=True)
class ModelParams:
    """User-facing knobs of train_model; None means the per-kind default."""

    n_topics: int | None = None     # default: number of gold classes
    alpha: float | None = None
    beta: float | None = None
    iterations: int = 2000
    seed: int = 0
    window_size: int = 10
    window_mode: str = "sliding"
    pmi_scale: float = 10.0


@dataclass
class TrainedModel:
    """Everything inference needs, bundled per model kind.

    theta_rows says what a theta row is: "document" for LDA (one row per
    training document) or "word" for network models (one row per
    network-connected word, with row_word giving the word ids).
    """

    kind: str
    config: SamplerConfig
    vocab: Vocabulary
    phi: np.ndarray                 # (K, V)
    theta: np.ndarray               # (rows, K)
    theta_rows: str                 # "document" | "word"
    row_word: np.ndarray | None     # int32, only for theta_rows == "word"
    network_stats: dict | None      # only for network models
    params: dict                    # resolved parameter manifest
    preprocess: dict | None = None  # preprocessing manifest, if known

    @property
    def vocab_hash(self) -> str:
        return self.vocab.sha256()

    def word_topic_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """(V, K) matrix of per-word topic distributions plus a boolean
        mask of which words actually have one."""
        if self.theta_rows != "word":
            raise ValueError("only network models carry per-word topics")
        v = self.vocab.size
        mat = np.zeros((v, self.config.n_topics), dtype=np.float64)
        covered = np.zeros(v, dtype=bool)
        mat[self.row_word] = self.theta
        covered[self.row_word] = True
        return mat, covered


def resolve_params(kind: str, params: ModelParams, n_classes: int) -> dict:
    """Fill per-kind defaults and return the full parameter manifest."""
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    alpha_default, beta_default = MODEL_DEFAULTS[kind]
    n_topics = params.n_topics if params.n_topics is not None else n_classes
    if not n_topics or n_topics < 1:
        raise ValueError("n_topics is required for an unlabeled corpus")
    resolved = {
        "kind": kind,
        "n_topics": int(n_topics),
        "alpha": params.alpha if params.alpha is not None else alpha_default,
        "beta": params.beta if params.beta is not None else beta_default,
        "iterations": params.iterations,
        "seed": params.seed,
    }
    if kind != "lda":
        resolved["window_size"] = params.window_size
        resolved["window_mode"] = params.window_mode
    if kind == "cwibtd":
        resolved["pmi_scale"] = params.pmi_scale
    return resolved


def train_model(
    kind: str,
    corpus: LabeledCorpus,
    params: ModelParams = ModelParams(),
) -> TrainedModel:
    """Train one of the three model kinds on an encoded corpus.

    lda:    sample over the documents themselves.
    wntm:   raw co-occurrence network -> count-mode pseudo-docs -> sample.
    cwibtd: raw network -> PMI pruning -> pmi-scaled pseudo-docs -> sample.
    """
    resolved = resolve_params(kind, params, corpus.n_classes)
    config = SamplerConfig(
        n_topics=resolved["n_topics"],
        alpha=resolved["alpha"],
        beta=resolved["beta"],
        iterations=resolved["iterations"],
        seed=resolved["seed"],
    )

    if kind == "lda":
        _, phi, theta = train(corpus, config)
        return TrainedModel(
            kind=kind, config=config, vocab=corpus.vocab,
            phi=phi, theta=theta, theta_rows="document",
            row_word=None, network_stats=None, params=resolved,
        )

    raw = accumulate_pair_counts(corpus, resolved["window_size"], resolved["window_mode"])
    if kind == "wntm":
        pseudo = build_pseudo_docs(raw, mode="count")
        stats = {"nodes": raw.n_nodes, "edges_raw": raw.n_edges, "edges_pruned": None}
    else:
        pruned = prune(raw)
        pseudo = build_pseudo_docs(pruned, mode="pmi-scaled", scale=resolved["pmi_scale"])
        stats = {
            "nodes": raw.n_nodes,
            "edges_raw": raw.n_edges,
            "edges_pruned": pruned.n_edges,
        }
    _, phi, theta = train(pseudo, config)
    return TrainedModel(
        kind=kind, config=config, vocab=corpus.vocab,
        phi=phi, theta=theta, theta_rows="word",
        row_word=pseudo.origin_word, network_stats=stats, params=resolved,
    )
