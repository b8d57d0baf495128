"""Corpus ingestion, preprocessing and imbalanced-subset construction.

Everything in this module is a pure function over immutable inputs: the
same input file and config always produce the same encoded corpus, so
downstream training is reproducible end to end.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyVocabulary,
    InsufficientClassSize,
    LabelMismatch,
    ParseError,
)
from .stopwords import ENGLISH_STOPWORDS

# A token is a maximal run of lowercase letters or digits; every other
# character (punctuation, symbols, whitespace) separates tokens.
_TOKEN_RE = re.compile(r"[a-z0-9]+")
_TOKEN_RE_CASED = re.compile(r"[A-Za-z0-9]+")


@dataclass(frozen=True)
class PreprocessConfig:
    """Knobs for tokenization and vocabulary filtering.

    min_count: minimum corpus frequency for a word to enter the vocabulary.
    lowercase: fold text to lowercase before tokenizing.
    stopwords: explicit stopword set; None selects the bundled English list.
    """

    min_count: int = 2
    lowercase: bool = True
    stopwords: frozenset[str] | None = None

    def stopword_set(self) -> frozenset[str]:
        return ENGLISH_STOPWORDS if self.stopwords is None else self.stopwords

    def manifest(self) -> dict:
        """JSON-friendly record of every parameter, for artifact manifests."""
        sw = self.stopword_set()
        digest = hashlib.sha256("\n".join(sorted(sw)).encode("utf-8")).hexdigest()
        return {
            "min_count": self.min_count,
            "lowercase": self.lowercase,
            "stopwords": "builtin" if self.stopwords is None else "custom",
            "stopwords_sha256": digest,
            "token_rule": _TOKEN_RE.pattern if self.lowercase else _TOKEN_RE_CASED.pattern,
        }


def tokenize(raw_text: str, config: PreprocessConfig = PreprocessConfig()) -> list[str]:
    """Split raw text into tokens: lowercase, punctuation-stripped,
    whitespace-separated, original order preserved. Empty input gives []."""
    if config.lowercase:
        return _TOKEN_RE.findall(raw_text.lower())
    return _TOKEN_RE_CASED.findall(raw_text)


@dataclass(frozen=True)
class Vocabulary:
    """Dense word <-> id mapping.

    Ids cover [0, size) with no gaps and `words[index[w]] == w` for every
    word. Construction order is first occurrence in the token stream.
    """

    words: tuple[str, ...]
    index: dict[str, int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.words[i] for i in ids]

    def sha256(self) -> str:
        return hashlib.sha256("\n".join(self.words).encode("utf-8")).hexdigest()


def build_vocabulary(
    docs: Sequence[Sequence[str]],
    min_count: int = 2,
    stopwords: frozenset[str] | set[str] = frozenset(),
) -> Vocabulary:
    """Collect the vocabulary: every token with corpus frequency >= min_count
    that is not a stopword, ids assigned in first-occurrence order.

    Stopword filtering happens before the frequency threshold; since the
    two filters act on independent words the order does not change the
    result, but it is fixed here for the record.

    Raises EmptyVocabulary when nothing survives.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    freq: Counter[str] = Counter()
    first_seen: dict[str, None] = {}
    for doc in docs:
        for tok in doc:
            if tok in stopwords:
                continue
            freq[tok] += 1
            if tok not in first_seen:
                first_seen[tok] = None
    words = tuple(w for w in first_seen if freq[w] >= min_count)
    if not words:
        raise EmptyVocabulary(
            f"no token met min_count={min_count} after stopword removal"
        )
    return Vocabulary(words=words, index={w: i for i, w in enumerate(words)})


@dataclass(frozen=True)
class Document:
    """One encoded document: a sequence of word ids over some vocabulary.

    Documents emptied by out-of-vocabulary filtering are kept (length 0)
    so label alignment never breaks; evaluation skips them.
    """

    tokens: np.ndarray  # int32, each value < vocabulary size

    @property
    def length(self) -> int:
        return int(self.tokens.shape[0])

    @property
    def is_empty(self) -> bool:
        return self.tokens.shape[0] == 0


@dataclass
class LabeledCorpus:
    """Encoded documents over a fixed vocabulary, optionally with gold labels.

    labels[i] < n_classes when labels are present; class_names gives the
    original names in order of first appearance.
    """

    docs: list[Document]
    vocab: Vocabulary
    labels: np.ndarray | None = None  # int32, aligned with docs
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int32)
            if len(self.labels) != len(self.docs):
                raise LabelMismatch(
                    f"{len(self.docs)} documents but {len(self.labels)} labels"
                )
            if len(self.labels) and int(self.labels.max()) >= len(self.class_names):
                raise LabelMismatch("label id outside class_names range")

    @property
    def n_docs(self) -> int:
        return len(self.docs)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def total_tokens(self) -> int:
        return sum(d.length for d in self.docs)

    def class_size(self, class_id: int) -> int:
        if self.labels is None:
            return 0
        return int(np.count_nonzero(self.labels == class_id))


def encode_corpus(
    docs: Sequence[Sequence[str]],
    labels: Sequence[int] | None,
    vocab: Vocabulary,
    class_names: Sequence[str] = (),
) -> LabeledCorpus:
    """Map token strings to word ids, dropping out-of-vocabulary tokens.

    Documents that lose every token are retained as empty documents so the
    label list stays aligned.
    """
    if labels is not None and len(labels) != len(docs):
        raise LabelMismatch(f"{len(docs)} documents but {len(labels)} labels")
    index = vocab.index
    encoded = [
        Document(np.array([index[t] for t in doc if t in index], dtype=np.int32))
        for doc in docs
    ]
    return LabeledCorpus(
        docs=encoded,
        vocab=vocab,
        labels=None if labels is None else np.asarray(labels, dtype=np.int32),
        class_names=tuple(class_names),
    )


def preprocess_corpus(
    raw_docs: Sequence[str],
    labels: Sequence[int] | None,
    class_names: Sequence[str],
    config: PreprocessConfig = PreprocessConfig(),
) -> LabeledCorpus:
    """Tokenize, build the vocabulary and encode in one step."""
    token_docs = [tokenize(text, config) for text in raw_docs]
    vocab = build_vocabulary(token_docs, config.min_count, config.stopword_set())
    return encode_corpus(token_docs, labels, vocab, class_names)


def make_imbalanced_subset(
    corpus: LabeledCorpus,
    large_classes: Sequence[int],
    per_large: int,
    rare_classes: Sequence[int],
    per_rare: int,
) -> LabeledCorpus:
    """Build the imbalanced evaluation subset: the first `per_large`
    documents of each large class and the first `per_rare` of each rare
    class, in original corpus order ("first" means file order; nothing is
    shuffled).

    Output size is exactly len(large)*per_large + len(rare)*per_rare.
    Raises InsufficientClassSize naming the first class that is too small.
    """
    if corpus.labels is None:
        raise LabelMismatch("imbalanced subset requires a labeled corpus")
    overlap = set(large_classes) & set(rare_classes)
    if overlap:
        raise ValueError(f"classes {sorted(overlap)} listed as both large and rare")

    picks: list[int] = []
    for class_id, quota in [(c, per_large) for c in large_classes] + [
        (c, per_rare) for c in rare_classes
    ]:
        members = np.flatnonzero(corpus.labels == class_id)
        if len(members) < quota:
            name = (
                corpus.class_names[class_id]
                if class_id < len(corpus.class_names)
                else str(class_id)
            )
            raise InsufficientClassSize(
                f"class {name!r} has {len(members)} documents, need {quota}"
            )
        picks.extend(int(i) for i in members[:quota])

    return LabeledCorpus(
        docs=[corpus.docs[i] for i in picks],
        vocab=corpus.vocab,
        labels=corpus.labels[picks],
        class_names=corpus.class_names,
    )


def load_labeled_corpus(
    path: str | Path, fmt: str = "labeled"
) -> tuple[list[str], list[int] | None, list[str]]:
    """Read a corpus file.

    fmt="labeled": one document per line, `<class-name>\\t<document text>`.
    fmt="plain":   one document per line, no labels.

    Returns (raw document texts, label ids or None, class names in order
    of first appearance). Raises ParseError with the 1-based line number
    on malformed lines.
    """
    if fmt not in ("labeled", "plain"):
        raise ValueError(f"unknown corpus format {fmt!r}")
    texts: list[str] = []
    labels: list[int] = []
    class_ids: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if fmt == "plain":
                texts.append(line)
                continue
            if "\t" not in line:
                raise ParseError(path, line_no, "expected '<class>\\t<text>'")
            name, text = line.split("\t", 1)
            if not name:
                raise ParseError(path, line_no, "empty class name")
            if name not in class_ids:
                class_ids[name] = len(class_ids)
            texts.append(text)
            labels.append(class_ids[name])
    if fmt == "plain":
        return texts, None, []
    return texts, labels, list(class_ids)


def corpus_stats(corpus: LabeledCorpus) -> dict:
    """Summary block for manifests: N, V, mean/max document length."""
    lengths = [d.length for d in corpus.docs]
    n = len(lengths)
    return {
        "n_documents": n,
        "vocabulary_size": corpus.vocab.size,
        "n_classes": corpus.n_classes,
        "len_mean": round(sum(lengths) / n, 2) if n else 0.0,
        "len_max": max(lengths) if n else 0,
        "n_empty_documents": sum(1 for length in lengths if length == 0),
        "total_tokens": sum(lengths),
    }
