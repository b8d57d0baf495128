"""Shared fixtures, corpus builders and independent oracles.

The oracles here deliberately re-derive results by the most naive route
available (materialize every window, count by dict, evaluate formulas
term by term) so they share no code path with the implementations they
check.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from cwibtd.corpus import Document, LabeledCorpus, Vocabulary, encode_corpus
from cwibtd.sampler import warm_up_kernel


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    """Compile the sampler kernel once, outside any timed assertion."""
    warm_up_kernel()


# ------------------------------------------------------------- builders

def id_vocabulary(size: int) -> Vocabulary:
    words = tuple(f"w{i}" for i in range(size))
    return Vocabulary(words=words, index={w: i for i, w in enumerate(words)})


def corpus_from_ids(id_docs, vocab_size, labels=None, class_names=()) -> LabeledCorpus:
    """Wrap raw word-id documents in a LabeledCorpus with a synthetic
    vocabulary (w0, w1, ...)."""
    docs = [Document(np.asarray(d, dtype=np.int32)) for d in id_docs]
    return LabeledCorpus(
        docs=docs,
        vocab=id_vocabulary(vocab_size),
        labels=None if labels is None else np.asarray(labels, dtype=np.int32),
        class_names=tuple(class_names),
    )


def corpus_from_tokens(token_docs, labels=None, class_names=()) -> LabeledCorpus:
    """Encode string-token documents with min_count=1 and no stopwords."""
    from cwibtd.corpus import build_vocabulary

    vocab = build_vocabulary(token_docs, min_count=1, stopwords=frozenset())
    return encode_corpus(token_docs, labels, vocab, class_names)


def random_id_docs(rng, n_docs, max_len, vocab_size, min_len=0):
    return [
        rng.integers(0, vocab_size, size=rng.integers(min_len, max_len + 1)).tolist()
        for _ in range(n_docs)
    ]


def two_topic_docs(rng, n_per_topic=100, words_per_topic=50, doc_len=10):
    """Two classes over fully disjoint vocabularies."""
    docs, labels = [], []
    for t in range(2):
        words = [f"t{t}w{i}" for i in range(words_per_topic)]
        for _ in range(n_per_topic):
            docs.append(list(rng.choice(words, size=doc_len)))
            labels.append(t)
    return docs, labels


def imbalanced_docs(
    gen_seed=42,
    n_private=30,
    n_shared=60,
    doc_len=10,
    n_shared_tokens=4,
    per_large=300,
    per_rare=20,
):
    """Eight classes, four large and four rare, each with a private
    vocabulary plus tokens drawn from a shared pool (the controlled
    overlap that makes rare classes hard for count-weighted models)."""
    rng = np.random.default_rng(gen_seed)
    shared = [f"sh{i}" for i in range(n_shared)]
    docs, labels, names = [], [], []
    for c in range(8):
        names.append(f"class{c}")
        private = [f"c{c}w{i}" for i in range(n_private)]
        n_docs = per_large if c < 4 else per_rare
        for _ in range(n_docs):
            toks = list(rng.choice(private, size=doc_len - n_shared_tokens))
            toks += list(rng.choice(shared, size=n_shared_tokens))
            rng.shuffle(toks)
            docs.append(toks)
            labels.append(c)
    return docs, labels, names


# -------------------------------------------------------------- oracles

def naive_pair_counts(id_docs, window_size, mode="sliding"):
    """Reference co-occurrence counter: materialize every window and count
    each distinct-word position pair with nested loops."""
    counts: dict[tuple[int, int], int] = {}
    for doc in id_docs:
        n = len(doc)
        if n < 2:
            continue
        if mode == "document" or n <= window_size:
            spans = [(0, n)]
        else:
            spans = [(s, s + window_size) for s in range(n - window_size + 1)]
        for lo, hi in spans:
            for i in range(lo, hi):
                for j in range(i + 1, hi):
                    if doc[i] != doc[j]:
                        key = (min(doc[i], doc[j]), max(doc[i], doc[j]))
                        counts[key] = counts.get(key, 0) + 1
    return counts


def oracle_purity(pred, truth):
    clusters: dict = {}
    for p, t in zip(pred, truth):
        clusters.setdefault(p, []).append(t)
    correct = 0
    for members in clusters.values():
        correct += max(members.count(c) for c in set(members))
    return correct / len(list(pred))


def oracle_nmi(pred, truth):
    pred = list(pred)
    truth = list(truth)
    n = len(pred)
    classes = sorted(set(truth))
    clusters = sorted(set(pred))
    dh = {h: truth.count(h) for h in classes}
    cl = {l: pred.count(l) for l in clusters}
    num = 0.0
    for h in classes:
        for l in clusters:
            d = sum(1 for p, t in zip(pred, truth) if t == h and p == l)
            if d > 0:
                num += d * math.log(n * d / (dh[h] * cl[l]))
    eh = sum(dh[h] * math.log(dh[h] / n) for h in classes)
    el = sum(cl[l] * math.log(cl[l] / n) for l in clusters)
    if eh == 0.0 or el == 0.0:
        return 0.0
    return num / math.sqrt(eh * el)
