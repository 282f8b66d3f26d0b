import numpy as np
import pytest
from conftest import JOINT_ROWS, TRANSACTIONS, VECTORS
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from posetinfo import JointTable, mutual_information
from posetinfo.errors import ValidationError
from posetinfo.estimators import MutualInformationDecomposer, PosetLogLinear


def test_params_and_clone():
    est = PosetLogLinear(sigma=0.2, theta_tol=1e-10)
    assert est.get_params()["sigma"] == 0.2
    copy = clone(est)
    assert copy.get_params() == est.get_params()
    assert not hasattr(copy, "model_")


def test_fit_transactions():
    est = PosetLogLinear(sigma=0.2).fit(TRANSACTIONS)
    assert list(est.get_feature_names_out()) == ["⊥", "2", "4,5", "1,2,4,5"]
    assert est.theta_ == pytest.approx([-2.303, 1.099, 0.693, -0.405], abs=5e-4)
    assert est.n_samples_ == 10
    assert est.information_gain(["2"]) == pytest.approx(0.0523, abs=1e-4)
    assert est.g_test(["2"]).lambda_ == pytest.approx(1.046, abs=2e-3)
    assert [r.gain for r in est.gain_scan()] == pytest.approx([0.0523, 0.0170, 0.0040], abs=1e-4)
    terms = est.decompose([[], ["2"], ["2", "4,5", "1,2,4,5"]])
    assert sum(t.kl_value for t in terms) == pytest.approx(0.1065, abs=1e-4)


def test_transform_and_scores():
    est = PosetLogLinear(sigma=0.2).fit(TRANSACTIONS)
    F = est.transform([[2], [1, 2, 4, 5], [3], [1, 2]])
    assert F.tolist() == [[1, 1, 0, 0], [1, 1, 1, 1], [1, 0, 0, 0], [1, 1, 0, 0]]
    scores = est.score_samples([[2], [4, 5], [1, 2, 4, 5]])
    assert scores == pytest.approx(np.log([0.3, 0.2, 0.4]))
    assert est.fit_transform(TRANSACTIONS).shape == (10, 4)
    assert est.transform([]).shape == (0, 4)


def test_int_vectors():
    est = PosetLogLinear(sigma="2/25", kind="int_vectors").fit(VECTORS)
    assert len(est.poset_) == 6
    assert est.score_samples([(2, 1)])[0] == pytest.approx(np.log(10 / 25))
    r = est.knockdown(["(1,1)"])
    assert r.p.sum() == pytest.approx(1.0)


def test_clusters():
    X = np.array([[0, 0]] * 5 + [[1, 1]] * 3 + [[2, 2]] * 2, dtype=float)
    y = ["a"] * 5 + ["b"] * 3 + ["c"] * 2
    est = PosetLogLinear(sigma=0.1, kind="clusters").fit(X, y)
    assert est.poset_.labels == ("a", "b", "c")
    assert est.distribution_.p == pytest.approx([0.5, 0.3, 0.2])
    with pytest.raises(ValidationError):
        PosetLogLinear(kind="clusters").fit(X)


def test_invalid_params():
    with pytest.raises(ValidationError):
        PosetLogLinear(sigma=2).fit(TRANSACTIONS)
    with pytest.raises(ValidationError):
        PosetLogLinear(kind="graphs").fit(TRANSACTIONS)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        PosetLogLinear().transform([[1]])


def test_mi_decomposer(chain4):
    table = JointTable(chain4, ["0", "1"], JOINT_ROWS)
    mi = MutualInformationDecomposer().fit_table(table)
    assert mi.mutual_information_ == pytest.approx(mutual_information(table))
    assert mi.decompose([[], ["2", "3"], ["1", "2", "3"]]) == pytest.approx([0.1219, 0.0343],
                                                                             abs=1e-3)
    assert [lab for lab, _ in mi.singleton_ranking()] == ["1", "3", "2"]


def test_mi_decomposer_from_samples(chain4):
    X = ["0", "1", "1", "2", "3", "0", "2", "3", "1", "2", "3", "0"]
    y = ["a", "a", "b", "b", "b", "a", "a", "b", "a", "b", "a", "b"]
    mi = MutualInformationDecomposer(poset=chain4).fit(X, y)
    assert mi.refined_mi([], ["1", "2", "3"]) == pytest.approx(mi.mutual_information_, abs=1e-8)
    with pytest.raises(ValidationError):
        MutualInformationDecomposer().fit(X, y)
