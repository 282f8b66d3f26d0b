from fractions import Fraction

import numpy as np
import pytest
from conftest import DATA, TRANSACTIONS, VECTORS

from posetinfo import (
    ClusteredDataset,
    IntVectorDataset,
    TransactionDataset,
    eta_from_p,
    learn_from_clusters,
    learn_from_int_vectors,
    learn_from_transactions,
)
from posetinfo.errors import EmptyModel, NoBottom, ValidationError
from posetinfo.learning import as_threshold


def test_transaction_example():
    m = learn_from_transactions(TRANSACTIONS, 0.2)
    assert m.poset.labels == ("⊥", "2", "4,5", "1,2,4,5")
    assert sorted(m.poset.covers) == sorted(
        [("⊥", "2"), ("⊥", "4,5"), ("2", "1,2,4,5"), ("4,5", "1,2,4,5")])
    assert list(m.phat.p) == [0.1, 0.3, 0.2, 0.4]
    assert sum(m.exact.values()) == 1
    assert m.n_samples == 10


def test_transaction_file_matches_list():
    from_file = learn_from_transactions(TransactionDataset.from_file(DATA / "transactions.txt"), 0.2)
    assert from_file.to_dict() == learn_from_transactions(TRANSACTIONS, 0.2).to_dict()


def test_transaction_file_errors(tmp_path):
    bad = tmp_path / "t.txt"
    bad.write_text("1 2\n3 x\n")
    with pytest.raises(ValidationError) as info:
        TransactionDataset.from_file(bad)
    assert info.value.source.endswith(":2")
    with pytest.raises(ValidationError):
        TransactionDataset([[0, 1]])
    with pytest.raises(ValidationError):
        TransactionDataset([[6]], n_events=5)


def test_thresholds():
    assert as_threshold(0.2) == Fraction(1, 5)
    assert as_threshold("2/25") == Fraction(2, 25)
    for bad in (0, 1.5, "abc", -0.1):
        with pytest.raises(ValidationError):
            as_threshold(bad)


def test_empty_model():
    with pytest.raises(EmptyModel):
        learn_from_transactions([[1], [2]], 1.0)


def test_positivity_repair_when_bottom_unseen():
    m = learn_from_transactions([[1]] * 4, 0.5)
    assert m.poset.labels == ("⊥", "1")
    assert m.repaired == ("⊥",)
    assert m.exact["⊥"] == Fraction(1, 41)
    assert m.phat.p.min() > 0


def test_frequency_invariants():
    m = learn_from_transactions(TRANSACTIONS, 0.2)
    counts = {}
    for t in TRANSACTIONS:
        counts[frozenset(t)] = counts.get(frozenset(t), 0) + 1
    kept = {m.keys[lab] for lab in m.poset.labels[1:]}
    for key, c in counts.items():
        assert (Fraction(c, 10) >= Fraction(1, 5)) == (key in kept)
    assert len(m.poset) - 1 <= len(counts) <= 10


def test_eta_equals_restricted_support():
    m = learn_from_transactions(TRANSACTIONS, 0.2)
    eta = eta_from_p(m.phat)
    for lab in m.poset.labels:
        key = m.keys[lab]
        retained_support = sum(m.exact[other] for other in m.poset.labels if key <= m.keys[other])
        assert eta[lab] == pytest.approx(float(retained_support), abs=1e-15)


def test_int_vector_example():
    m = learn_from_int_vectors(VECTORS, Fraction(2, 25))
    assert set(m.poset.labels) == {"(0,0)", "(0,1)", "(1,1)", "(1,2)", "(2,1)", "(3,3)"}
    assert m.exact["(0,0)"] == Fraction(1, 25)
    assert learn_from_int_vectors(IntVectorDataset.from_csv(DATA / "vectors.csv"),
                                  "2/25").to_dict() == m.to_dict()


def test_int_vector_small_cases():
    m = learn_from_int_vectors([(0, 0)] * 3, 0.5)
    assert m.poset.labels == ("(0,0)",) and list(m.phat.p) == [1.0]
    m = learn_from_int_vectors([(0, 1), (1, 0), (0, 0)], 0.3)
    assert m.poset.bottom == "(0,0)"
    assert not m.poset.leq("(0,1)", "(1,0)") and not m.poset.leq("(1,0)", "(0,1)")
    with pytest.raises(ValidationError):
        IntVectorDataset([(0, -1)])


def test_clusters_sizes():
    pts = np.zeros((20, 2))
    assign = ["a"] * 10 + ["b"] * 6 + ["c"] * 4
    reps = {"a": [0, 0], "b": [1, 0], "c": [1, 1]}
    m = learn_from_clusters(ClusteredDataset(pts, assign, reps), 0.2)
    assert m.poset.labels == ("a", "b", "c")
    assert list(m.phat.p) == [0.5, 0.3, 0.2]
    assert sorted(m.poset.covers) == [("a", "b"), ("b", "c")]
    with pytest.raises(EmptyModel):
        learn_from_clusters(ClusteredDataset(pts, assign, reps), 0.6)


def test_clusters_need_a_bottom():
    pts = np.zeros((4, 2))
    reps = {"a": [0, 1], "b": [1, 0]}
    data = ClusteredDataset(pts, ["a", "a", "b", "b"], reps)
    with pytest.raises(NoBottom):
        learn_from_clusters(data, 0.25)
    with_bottom = ClusteredDataset(pts, ["a", "a", "b", "b"], reps, bottom=[0, 0])
    m = learn_from_clusters(with_bottom, 0.25)
    assert m.poset.bottom == "⊥" and m.repaired == ("⊥",)


def test_cluster_files():
    data = ClusteredDataset.from_files(DATA / "points.csv", DATA / "clusters.json")
    m = learn_from_clusters(data, 0.2)
    assert m.poset.labels == ("a", "b", "c")
    assert np.allclose(m.phat.p, 1 / 3)
