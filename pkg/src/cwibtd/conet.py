"""Sliding-window word co-occurrence network with PMI edge scoring.

Construction: a window of fixed length slides over each document at
stride 1 and every unordered pair of positions holding *different* words
contributes one count to the pair's edge weight. Pairs at small positional
distance sit in more overlapping windows and therefore accumulate more
weight, which is what pushes adjacent words toward the same topic.

Scoring: each surviving edge gets a pointwise-mutual-information activity

    activity(x, y) = ln( p(x,y) / (p(x) p(y)) )

estimated from the pair distribution itself: p(x,y) = D(x,y)/T and
p(x) = m(x)/(2T), where D is the edge weight, m(x) the weight incident to
x and T the total pair weight. Edges whose activity is zero (independence)
or negative (avoidance) are pruned.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .corpus import Document, LabeledCorpus, Vocabulary
from .errors import UndefinedActivity

WINDOW_MODES = ("sliding", "document")


@dataclass
class RawCoNetwork:
    """Pre-pruning co-occurrence network.

    pair_weight maps (x, y) with x < y to the accumulated integer count
    D(x, y); node_weight[x] is m(x) = sum_y D(x, y); total_weight is
    T = sum_{x<y} D(x, y). Always: sum_x m(x) == 2T.
    """

    pair_weight: dict[tuple[int, int], int]
    node_weight: np.ndarray  # int64, length = vocabulary size
    total_weight: int
    window_size: int
    vocab_size: int

    def weight(self, x: int, y: int) -> int:
        if x == y:
            return 0
        key = (x, y) if x < y else (y, x)
        return self.pair_weight.get(key, 0)

    @property
    def n_edges(self) -> int:
        return len(self.pair_weight)

    @property
    def n_nodes(self) -> int:
        return int(np.count_nonzero(self.node_weight))

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for (x, y), d in self.pair_weight.items():
            yield x, y, d

    @classmethod
    def from_pair_weights(
        cls,
        pairs: Mapping[tuple[int, int], int],
        vocab_size: int,
        window_size: int = 10,
    ) -> "RawCoNetwork":
        """Build a network directly from an edge-weight map (test and
        debugging hook; normalizes key order, rejects self-edges)."""
        pair_weight: dict[tuple[int, int], int] = {}
        node_weight = np.zeros(vocab_size, dtype=np.int64)
        total = 0
        for (x, y), d in pairs.items():
            if x == y:
                raise ValueError(f"self-edge on word {x}")
            if d < 0:
                raise ValueError(f"negative weight on edge ({x}, {y})")
            if d == 0:
                continue
            key = (x, y) if x < y else (y, x)
            pair_weight[key] = pair_weight.get(key, 0) + d
            node_weight[x] += d
            node_weight[y] += d
            total += d
        return cls(pair_weight, node_weight, total, window_size, vocab_size)


@dataclass
class PrunedCoNetwork:
    """Post-pruning network: only edges with strictly positive activity,
    each carrying its PMI value. Nodes that lose every edge vanish."""

    activity: dict[tuple[int, int], float]
    source: RawCoNetwork = field(repr=False)

    @property
    def n_edges(self) -> int:
        return len(self.activity)

    @property
    def n_nodes(self) -> int:
        seen: set[int] = set()
        for x, y in self.activity:
            seen.add(x)
            seen.add(y)
        return len(seen)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for (x, y), a in self.activity.items():
            yield x, y, a


def enumerate_windows(doc: Document, window_size: int) -> list[tuple[int, int]]:
    """All stride-1 spans of length `window_size` over the document.

    A document no longer than the window is itself the single window; a
    document of 0 or 1 tokens yields nothing (no pair can form).
    """
    if window_size < 2:
        raise ValueError(f"window_size must be >= 2, got {window_size}")
    n = doc.length
    if n < 2:
        return []
    if n <= window_size:
        return [(0, n)]
    return [(s, s + window_size) for s in range(n - window_size + 1)]


def accumulate_pair_counts(
    corpus: LabeledCorpus,
    window_size: int = 10,
    mode: str = "sliding",
) -> RawCoNetwork:
    """Accumulate co-occurrence counts over every window of every document.

    Each window contributes +1 per unordered pair of positions with
    distinct word ids, so a pair of positions at distance < window_size
    is counted once per window that covers both. mode="document" treats
    each document as one window regardless of its length.

    Rather than materializing windows, the scan adds the closed-form
    window-coverage count for each position pair: positions i < j (with
    j - i < L) of an n-token document lie together in
    min(i, n-L) - max(j-L+1, 0) + 1 windows. The naive per-window
    enumeration is kept in the test suite as the oracle for this.

    Accumulation is per-document and purely additive, so documents can be
    counted in any order (or split across workers and merged by summing
    the integer pair maps) without changing the result.
    """
    if mode not in WINDOW_MODES:
        raise ValueError(f"unknown window mode {mode!r}")
    if window_size < 2:
        raise ValueError(f"window_size must be >= 2, got {window_size}")

    L = window_size
    counts: Counter[tuple[int, int]] = Counter()
    for doc in corpus.docs:
        toks = doc.tokens.tolist()
        n = len(toks)
        if n < 2:
            continue
        if mode == "document" or n <= L:
            # single window covering the document: every pair once
            for i in range(n - 1):
                wi = toks[i]
                for j in range(i + 1, n):
                    wj = toks[j]
                    if wi != wj:
                        counts[(wi, wj) if wi < wj else (wj, wi)] += 1
        else:
            for i in range(n):
                wi = toks[i]
                top = min(i + L, n)
                for j in range(i + 1, top):
                    wj = toks[j]
                    if wi != wj:
                        mult = min(i, n - L) - max(j - L + 1, 0) + 1
                        counts[(wi, wj) if wi < wj else (wj, wi)] += mult

    node_weight = np.zeros(corpus.vocab.size, dtype=np.int64)
    total = 0
    for (x, y), d in counts.items():
        node_weight[x] += d
        node_weight[y] += d
        total += d
    return RawCoNetwork(dict(counts), node_weight, total, L, corpus.vocab.size)


def pmi_degree(x: int, y: int, net: RawCoNetwork) -> float:
    """PMI activity of an existing edge.

    With the pair-distribution estimators the ratio collapses to
    4*T*D(x,y) / (m(x)*m(y)); numerator and denominator are exact
    integers, so independent pairs score exactly 0.0.
    """
    d = net.weight(x, y)
    if d == 0:
        raise UndefinedActivity(f"words {x} and {y} never co-occur")
    if net.total_weight <= 0:
        raise UndefinedActivity("network has no pair mass")
    mx = int(net.node_weight[x])
    my = int(net.node_weight[y])
    return math.log((4 * net.total_weight * d) / (mx * my))


def prune(net: RawCoNetwork) -> PrunedCoNetwork:
    """Drop every edge whose activity is zero or negative.

    Zero means the pair co-occurs exactly as often as independence
    predicts; negative means less often. Either way the link carries no
    topical attraction and is cancelled.
    """
    activity: dict[tuple[int, int], float] = {}
    for (x, y), _ in net.pair_weight.items():
        a = pmi_degree(x, y, net)
        if a > 0.0:
            activity[(x, y)] = a
    return PrunedCoNetwork(activity=activity, source=net)


def write_edge_dump(
    path,
    net: RawCoNetwork,
    vocab: Vocabulary,
    pruned: PrunedCoNetwork | None = None,
) -> None:
    """Dump edges as `word_x\\tword_y\\tD\\tactivity`, sorted by (x, y) id.

    With `pruned` given, only surviving edges are written; otherwise all
    raw edges with their (possibly non-positive) activity.
    """
    if pruned is not None:
        rows = [(x, y, net.weight(x, y), a) for (x, y), a in pruned.activity.items()]
    else:
        rows = [(x, y, d, pmi_degree(x, y, net)) for x, y, d in net.edges()]
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, d, a in rows:
            fh.write(f"{vocab.words[x]}\t{vocab.words[y]}\t{d}\t{a:.6f}\n")
