"""Clustering evaluation: Purity and NMI, over all classes or a rare subset.

Purity is the fraction of documents falling in their cluster's majority
class. NMI is mutual information between the cluster and class partitions,
normalized by the geometric mean of the two entropies; it is 1 for a
perfect match, near 0 for random partitions, and defined as 0 when either
partition is degenerate (single class or single cluster). Logs are
natural; any base cancels in the ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyInput, LengthMismatch, UnknownClass


@dataclass
class ContingencyTable:
    """Class-by-cluster document counts d_hl with marginals.

    Rows are gold classes, columns predicted clusters. Label values are
    remapped densely, so sparse or non-contiguous ids are fine.
    """

    counts: np.ndarray        # int64 (n_classes, n_clusters)
    class_totals: np.ndarray  # d_h
    cluster_totals: np.ndarray  # c_l
    total: int                # D

    @classmethod
    def from_labels(cls, truth: Sequence[int], pred: Sequence[int]) -> "ContingencyTable":
        truth = np.asarray(truth)
        pred = np.asarray(pred)
        if truth.shape[0] != pred.shape[0]:
            raise LengthMismatch(
                f"{truth.shape[0]} true labels vs {pred.shape[0]} predicted"
            )
        if truth.shape[0] == 0:
            raise EmptyInput("no documents to evaluate")
        _, row = np.unique(truth, return_inverse=True)
        _, col = np.unique(pred, return_inverse=True)
        counts = np.zeros((int(row.max()) + 1, int(col.max()) + 1), dtype=np.int64)
        np.add.at(counts, (row, col), 1)
        return cls(
            counts=counts,
            class_totals=counts.sum(axis=1),
            cluster_totals=counts.sum(axis=0),
            total=int(truth.shape[0]),
        )


def purity(pred: Sequence[int], truth: Sequence[int]) -> float:
    """(1/N) * sum over clusters of the largest class overlap."""
    table = ContingencyTable.from_labels(truth, pred)
    return float(table.counts.max(axis=0).sum()) / table.total


def nmi(pred: Sequence[int], truth: Sequence[int]) -> float:
    """Normalized mutual information of the two partitions.

    Computed as sum_hl d_hl*(ln(d_hl/D) - ln(d_h/D) - ln(c_l/D)) over the
    nonzero cells, divided by sqrt of the product of the marginal entropy
    sums. The decomposed form makes identical partitions score exactly
    1.0. Degenerate partitions (either entropy zero) score 0.
    """
    table = ContingencyTable.from_labels(truth, pred)
    d = float(table.total)
    dh = table.class_totals.astype(np.float64)
    cl = table.cluster_totals.astype(np.float64)
    log_h = np.log(dh / d)
    log_l = np.log(cl / d)
    s_h = float(np.sum(dh * log_h))
    s_l = float(np.sum(cl * log_l))
    if s_h == 0.0 or s_l == 0.0:
        return 0.0

    rows, cols = np.nonzero(table.counts)
    cells = table.counts[rows, cols].astype(np.float64)
    numerator = float(
        np.sum(cells * (np.log(cells / d) - log_h[rows] - log_l[cols]))
    )
    return numerator / math.sqrt(s_h * s_l)


@dataclass
class MetricReport:
    """Purity/NMI for one evaluation scope, possibly over several runs.

    An empty scope (no rare classes designated, or no document in scope)
    is an explicit marker, not a zero score.
    """

    scope: str
    n_documents: int = 0
    purity_runs: list[float] = field(default_factory=list)
    nmi_runs: list[float] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return self.n_documents == 0

    @property
    def runs(self) -> int:
        return len(self.purity_runs)

    @property
    def purity(self) -> float:
        return sum(self.purity_runs) / len(self.purity_runs)

    @property
    def nmi(self) -> float:
        return sum(self.nmi_runs) / len(self.nmi_runs)

    @classmethod
    def merge(cls, reports: Sequence["MetricReport"]) -> "MetricReport":
        """Concatenate per-run values of same-scope reports."""
        scopes = {r.scope for r in reports}
        if len(scopes) != 1:
            raise ValueError(f"cannot merge reports across scopes {scopes}")
        sizes = {r.n_documents for r in reports}
        if len(sizes) != 1:
            raise ValueError(f"scope size changed across runs: {sizes}")
        merged = cls(scope=scopes.pop(), n_documents=sizes.pop())
        for r in reports:
            merged.purity_runs.extend(r.purity_runs)
            merged.nmi_runs.extend(r.nmi_runs)
        return merged

    def to_dict(self) -> dict:
        if self.is_empty:
            return {"scope": self.scope, "empty": True}
        return {
            "scope": self.scope,
            "empty": False,
            "n_documents": self.n_documents,
            "runs": self.runs,
            "purity": {"mean": self.purity, "runs": list(self.purity_runs)},
            "nmi": {"mean": self.nmi, "runs": list(self.nmi_runs)},
        }


def scoped_metrics(
    pred: Sequence[int],
    truth: Sequence[int],
    rare_classes: Sequence[int] = (),
) -> tuple[MetricReport, MetricReport]:
    """Evaluate over all documents and over the rare-class restriction.

    The rare scope keeps the documents whose *true* class is rare, with
    their predicted labels as-is (clusters that only ever capture large
    classes simply have zero mass there). rare_classes must all appear in
    truth; an empty designation yields the empty-scope marker.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape[0] != truth.shape[0]:
        raise LengthMismatch(f"{truth.shape[0]} true labels vs {pred.shape[0]} predicted")
    if pred.shape[0] == 0:
        raise EmptyInput("no documents to evaluate")

    observed = set(np.unique(truth).tolist())
    rare = list(rare_classes)
    missing = [c for c in rare if c not in observed]
    if missing:
        raise UnknownClass(f"rare classes {missing} not present in the corpus")

    all_report = MetricReport(
        scope="all",
        n_documents=int(pred.shape[0]),
        purity_runs=[purity(pred, truth)],
        nmi_runs=[nmi(pred, truth)],
    )
    if not rare:
        return all_report, MetricReport(scope="rare")

    mask = np.isin(truth, rare)
    rare_report = MetricReport(
        scope="rare",
        n_documents=int(mask.sum()),
        purity_runs=[purity(pred[mask], truth[mask])],
        nmi_runs=[nmi(pred[mask], truth[mask])],
    )
    return all_report, rare_report
