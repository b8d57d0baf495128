"""Purity and NMI against brute-force oracles and frozen hand values."""

import itertools

import numpy as np
import pytest

from cwibtd.errors import EmptyInput, LengthMismatch, UnknownClass
from cwibtd.metrics import ContingencyTable, MetricReport, nmi, purity, scoped_metrics

from conftest import oracle_nmi, oracle_purity


class TestPurity:
    def test_perfect_clustering_up_to_renaming(self):
        truth = [0, 0, 1, 1, 2, 2]
        pred = [5, 5, 3, 3, 9, 9]
        assert purity(pred, truth) == 1.0

    def test_four_document_instance(self):
        # clusters {0,0} and {1,1} each split between both classes
        assert purity([0, 0, 1, 1], [0, 1, 0, 1]) == 0.5

    def test_single_cluster_takes_majority_share(self):
        truth = [0] * 6 + [1] * 4
        assert purity([0] * 10, truth) == 0.6

    def test_floor_is_largest_class_share(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            n = int(rng.integers(1, 12))
            truth = rng.integers(0, 3, size=n)
            pred = rng.integers(0, 3, size=n)
            value = purity(pred, truth)
            counts = np.bincount(truth)
            assert value >= counts.max() / n - 1e-15
            assert value == oracle_purity(pred.tolist(), truth.tolist())

    def test_duplicating_a_document_never_hurts_majority_consistency(self):
        rng = np.random.default_rng(32)
        for _ in range(100):
            n = int(rng.integers(2, 10))
            truth = rng.integers(0, 3, size=n).tolist()
            pred = rng.integers(0, 3, size=n).tolist()
            base = purity(pred, truth)
            # duplicate a document that is majority-consistent in its cluster
            for i in range(n):
                members = [t for p, t in zip(pred, truth) if p == pred[i]]
                if members.count(truth[i]) == max(members.count(c) for c in set(members)):
                    dup_pred = pred + [pred[i]]
                    dup_truth = truth + [truth[i]]
                    assert purity(dup_pred, dup_truth) >= base - 1e-15
                    assert purity(dup_pred, dup_truth) == oracle_purity(dup_pred, dup_truth)
                    break

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            purity([0, 1], [0])
        with pytest.raises(EmptyInput):
            purity([], [])


class TestNmi:
    def test_identical_partitions_exactly_one(self):
        truth = [0, 0, 1, 1, 2, 2, 2]
        assert nmi(truth, truth) == 1.0

    def test_four_document_instance_is_zero(self):
        # every contingency cell is 1: each log term is ln(4/(2*2)) = 0
        assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0

    def test_random_partitions_near_zero(self):
        rng = np.random.default_rng(33)
        pred = rng.integers(0, 8, size=10000)
        truth = rng.integers(0, 8, size=10000)
        assert nmi(pred, truth) < 0.05

    def test_degenerate_partitions_are_zero(self):
        assert nmi([0, 0, 0], [0, 1, 2]) == 0.0  # single cluster
        assert nmi([0, 1, 2], [0, 0, 0]) == 0.0  # single class
        assert nmi([0, 0], [0, 0]) == 0.0  # both degenerate

    def test_symmetric_in_arguments(self):
        rng = np.random.default_rng(34)
        for _ in range(100):
            n = int(rng.integers(2, 30))
            a = rng.integers(0, 4, size=n)
            b = rng.integers(0, 4, size=n)
            assert nmi(a, b) == pytest.approx(nmi(b, a), abs=1e-12)

    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(35)
        truth = rng.integers(0, 3, size=40)
        pred = rng.integers(0, 3, size=40)
        base_nmi = nmi(pred, truth)
        base_purity = purity(pred, truth)
        for perm in itertools.permutations(range(3)):
            renamed = np.array([perm[p] for p in pred])
            assert nmi(renamed, truth) == pytest.approx(base_nmi, abs=1e-12)
            assert purity(renamed, truth) == base_purity

    def test_document_order_invariance(self):
        rng = np.random.default_rng(36)
        truth = rng.integers(0, 3, size=50)
        pred = rng.integers(0, 3, size=50)
        order = rng.permutation(50)
        assert nmi(pred[order], truth[order]) == pytest.approx(nmi(pred, truth), abs=1e-12)
        assert purity(pred[order], truth[order]) == purity(pred, truth)

    def test_exhaustive_small_instances_match_oracle(self):
        # every contingency class reachable with <= 3 classes, <= 3
        # clusters and N <= 6 (the acceptance suite pushes N to 8)
        for n in range(1, 7):
            for truth in itertools.product(range(3), repeat=n):
                pred_iter = itertools.product(range(2), repeat=n)
                for pred in pred_iter:
                    assert purity(pred, truth) == oracle_purity(pred, truth)
                    assert nmi(pred, truth) == pytest.approx(
                        oracle_nmi(pred, truth), abs=1e-12
                    )


class TestContingencyTable:
    def test_marginals_consistent(self):
        table = ContingencyTable.from_labels([0, 0, 1, 2], [1, 1, 0, 0])
        assert table.total == 4
        assert table.counts.sum() == 4
        assert table.class_totals.tolist() == [2, 1, 1]
        assert table.cluster_totals.tolist() == [2, 2]

    def test_sparse_label_values_accepted(self):
        table = ContingencyTable.from_labels([10, 10, 99], [7, 3, 3])
        assert table.total == 3
        assert table.counts.shape == (2, 2)


class TestScopedMetrics:
    TRUTH = [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7]
    PRED = [0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 3, 3, 3, 3, 3, 3, 4, 4, 4, 5, 6, 0, 7, 7]
    RARE = [4, 5, 6, 7]

    def test_hand_built_eight_class_instance(self):
        # frozen from independent hand/brute-force evaluation
        all_rep, rare_rep = scoped_metrics(self.PRED, self.TRUTH, self.RARE)
        assert all_rep.n_documents == 24
        assert all_rep.purity == pytest.approx(19 / 24, abs=0)
        assert all_rep.nmi == pytest.approx(0.8067598252124387, abs=1e-12)
        assert rare_rep.n_documents == 8
        assert rare_rep.purity == pytest.approx(7 / 8, abs=0)
        assert rare_rep.nmi == pytest.approx(0.7973750531529612, abs=1e-12)

    def test_rare_equals_all_when_every_class_rare(self):
        all_rep, rare_rep = scoped_metrics(self.PRED, self.TRUTH, list(range(8)))
        assert rare_rep.purity == all_rep.purity
        assert rare_rep.nmi == all_rep.nmi
        assert rare_rep.n_documents == all_rep.n_documents

    def test_empty_designation_is_marker_not_zero(self):
        _, rare_rep = scoped_metrics(self.PRED, self.TRUTH, [])
        assert rare_rep.is_empty
        assert rare_rep.runs == 0

    def test_unknown_rare_class(self):
        with pytest.raises(UnknownClass):
            scoped_metrics(self.PRED, self.TRUTH, [42])

    def test_restriction_keeps_predicted_labels(self):
        # the rare scope restricts by true class only; a cluster that also
        # captured large-class docs keeps its label in the restricted view
        _, rare_rep = scoped_metrics(self.PRED, self.TRUTH, self.RARE)
        rare_pred = [p for p, t in zip(self.PRED, self.TRUTH) if t in self.RARE]
        rare_truth = [t for t in self.TRUTH if t in self.RARE]
        assert rare_rep.purity_runs[0] == oracle_purity(rare_pred, rare_truth)


class TestMetricReport:
    def test_merge_concatenates_runs(self):
        a = MetricReport("all", 10, [0.5], [0.4])
        b = MetricReport("all", 10, [0.7], [0.6])
        merged = MetricReport.merge([a, b])
        assert merged.runs == 2
        assert merged.purity == pytest.approx(0.6, abs=1e-12)
        assert merged.nmi == pytest.approx(0.5, abs=1e-12)

    def test_mean_is_arithmetic_mean(self):
        values = [0.1, 0.25, 0.4, 0.9]
        rep = MetricReport("all", 5, list(values), list(values))
        assert rep.purity == pytest.approx(sum(values) / len(values), abs=1e-12)

    def test_merge_rejects_mixed_scopes(self):
        with pytest.raises(ValueError):
            MetricReport.merge(
                [MetricReport("all", 5, [0.5], [0.5]), MetricReport("rare", 5, [1], [1])]
            )
