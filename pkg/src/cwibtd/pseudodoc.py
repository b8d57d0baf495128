"""Pseudo-documents: the co-occurrence network rendered back as text.

Every word with at least one surviving edge becomes one pseudo-document
holding its network neighbors with integer multiplicities. The Gibbs
sampler then runs on pseudo-documents exactly as it would on real ones,
which keeps a single sampler implementation across all model variants.

Two multiplicity modes:

  count:      neighbor j appears D(i, j) times in word i's pseudo-doc
              (the raw-count baseline).
  pmi-scaled: neighbor j appears max(1, round(s * activity(i, j))) times,
               quantizing the real-valued PMI activity onto token counts.
               An edge that survived pruning always contributes at least
               one token. Rounding is half-to-even for cross-platform
               determinism; the scale s trades quantization error against
               pseudo-corpus size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conet import PrunedCoNetwork, RawCoNetwork
from .errors import InvalidScale

PSEUDODOC_MODES = ("count", "pmi-scaled")


@dataclass
class PseudoDocumentSet:
    """One pseudo-document per network-connected word.

    neighbor_counts[i] maps neighbor word id -> multiplicity for the
    pseudo-document of word origin_word[i]. Mirror symmetry holds by
    construction: j appears in i's list exactly as often as i in j's.
    """

    neighbor_counts: list[dict[int, int]]
    origin_word: np.ndarray  # int32, pseudo-doc index -> word id
    vocab_size: int
    mode: str
    scale: float | None = None

    @property
    def n_docs(self) -> int:
        return len(self.neighbor_counts)

    @property
    def total_tokens(self) -> int:
        return sum(sum(c.values()) for c in self.neighbor_counts)

    def token_list(self, i: int) -> np.ndarray:
        """Expanded token sequence of pseudo-doc i, neighbors in ascending
        id order (fixed order keeps sampling deterministic)."""
        counts = self.neighbor_counts[i]
        if not counts:
            return np.empty(0, dtype=np.int32)
        return np.repeat(
            np.array(sorted(counts), dtype=np.int32),
            [counts[w] for w in sorted(counts)],
        )

    def token_lists(self) -> list[np.ndarray]:
        return [self.token_list(i) for i in range(self.n_docs)]


def build_pseudo_docs(
    net: RawCoNetwork | PrunedCoNetwork,
    mode: str = "pmi-scaled",
    scale: float = 10.0,
) -> PseudoDocumentSet:
    """Convert a network into pseudo-documents.

    count mode expects the raw network, pmi-scaled mode the pruned one
    (so every activity is strictly positive). Words without edges produce
    no pseudo-document.
    """
    if mode not in PSEUDODOC_MODES:
        raise ValueError(f"unknown pseudo-doc mode {mode!r}")
    if mode == "count":
        if not isinstance(net, RawCoNetwork):
            raise TypeError("count mode consumes the raw (unpruned) network")
        edge_mult = [(x, y, d) for x, y, d in net.edges()]
        vocab_size = net.vocab_size
        scale_out = None
    else:
        if not isinstance(net, PrunedCoNetwork):
            raise TypeError("pmi-scaled mode consumes the pruned network")
        if scale <= 0:
            raise InvalidScale(f"scale must be > 0, got {scale}")
        edge_mult = [
            (x, y, max(1, round(scale * a))) for x, y, a in net.edges()
        ]
        vocab_size = net.source.vocab_size
        scale_out = float(scale)

    by_word: dict[int, dict[int, int]] = {}
    for x, y, m in edge_mult:
        by_word.setdefault(x, {})[y] = m
        by_word.setdefault(y, {})[x] = m

    origin = sorted(by_word)
    return PseudoDocumentSet(
        neighbor_counts=[by_word[w] for w in origin],
        origin_word=np.array(origin, dtype=np.int32),
        vocab_size=vocab_size,
        mode=mode,
        scale=scale_out,
    )


def write_pseudodoc_dump(path, pds: PseudoDocumentSet, vocab) -> None:
    """One pseudo-document per line: `origin_word\\tneighbor:count ...`,
    neighbors sorted by id."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(pds.n_docs):
            word = vocab.words[int(pds.origin_word[i])]
            counts = pds.neighbor_counts[i]
            body = " ".join(f"{vocab.words[j]}:{counts[j]}" for j in sorted(counts))
            fh.write(f"{word}\t{body}\n")
