"""scikit-learn style wrappers over the functional API."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_is_fitted, check_kind, check_sigma, check_solver, check_subset
from .coordinates import Distribution, eta_from_p, theta_from_p
from .decomposition import chain_decompose, information_gain
from .errors import ValidationError
from .learning import (
    ClusteredDataset,
    IntVectorDataset,
    TransactionDataset,
    learn_from_clusters,
    learn_from_int_vectors,
    learn_from_transactions,
)
from .mutual_info import JointTable, mi_chain_decompose, mutual_information, refined_mi
from .poset import Poset
from .projection import e_project_knockdown
from .scan import gain_scan
from .significance import g_test


class PosetLogLinear(TransformerMixin, BaseEstimator):
    """Fit a log-linear model on the poset of frequent observations.

    Parameters
    ----------
    sigma : float, Fraction or str
        Frequency threshold in (0, 1].
    kind : {"transactions", "int_vectors", "clusters"}
    theta_tol : float
        Stopping tolerance on θ residuals for the projection solver.
    max_outer : int
        Sweep budget of the projection solver.
    n_jobs : int, optional
        Worker processes for :meth:`gain_scan`; all cores by default.

    Attributes
    ----------
    model_ : LearnedModel
    poset_ : Poset
    distribution_ : Distribution
    theta_, eta_ : ndarray of shape (n_elements,)
        Coordinates in canonical element order.
    n_samples_ : int
    feature_names_ : ndarray of str
    """

    def __init__(self, sigma=0.1, kind: str = "transactions", theta_tol: float = 1e-9,
                 max_outer: int = 10_000, n_jobs: int | None = None):
        self.sigma = sigma
        self.kind = kind
        self.theta_tol = theta_tol
        self.max_outer = max_outer
        self.n_jobs = n_jobs

    def fit(self, X, y=None, *, representatives=None, bottom=None):
        """Learn the model.

        For ``kind="clusters"``, ``y`` holds cluster assignments and
        ``representatives`` maps cluster ids to vectors (cluster means by default).
        """
        sigma = check_sigma(self.sigma)
        kind = check_kind(self.kind)
        self._cfg = check_solver(self.theta_tol, self.max_outer)
        if kind == "transactions":
            model = learn_from_transactions(
                X if isinstance(X, TransactionDataset) else TransactionDataset(X), sigma)
        elif kind == "int_vectors":
            model = learn_from_int_vectors(
                X if isinstance(X, IntVectorDataset) else IntVectorDataset(X), sigma)
        else:
            if isinstance(X, ClusteredDataset):
                data = X
            else:
                if y is None:
                    raise ValidationError("clustered data needs cluster assignments in y")
                pts = np.asarray(X, dtype=np.float64)
                ids = [str(c) for c in y]
                if representatives is None:
                    representatives = {
                        c: pts[[i for i, a in enumerate(ids) if a == c]].mean(axis=0)
                        for c in sorted(set(ids))
                    }
                data = ClusteredDataset(pts, ids, representatives, bottom)
            model = learn_from_clusters(data, sigma)
        self.model_ = model
        self.poset_ = model.poset
        self.distribution_ = model.phat
        self.theta_ = theta_from_p(model.phat).theta
        self.eta_ = eta_from_p(model.phat).eta
        self.n_samples_ = model.n_samples
        self.feature_names_ = np.array(self.poset_.labels, dtype=object)
        return self

    def _below(self, x) -> np.ndarray:
        keys = [self.model_.keys[lab] for lab in self.poset_.labels]
        if self.kind == "transactions":
            obs = frozenset(int(i) for i in x)
            return np.array([k <= obs for k in keys])
        obs = np.asarray(x, dtype=np.float64)
        return np.array([bool(np.all(np.asarray(k) <= obs)) for k in keys])

    def transform(self, X) -> np.ndarray:
        """Indicator features ``F[i, s] = 1`` when element ``s`` lies below observation ``i``.

        ``log p(x) = F(x) · θ`` for every observation that is itself an element.
        """
        check_is_fitted(self, "model_")
        rows = [self._below(x) for x in X]
        if not rows:
            return np.zeros((0, len(self.poset_)))
        return np.vstack(rows).astype(np.float64)

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "model_")
        return self.feature_names_.copy()

    def score_samples(self, X) -> np.ndarray:
        """Model log-probability ``F(x) · θ`` of each observation."""
        return self.transform(X) @ self.theta_

    def knockdown(self, subset):
        check_is_fitted(self, "model_")
        return e_project_knockdown(self.distribution_, check_subset(self.poset_, subset),
                                   self._cfg)[0]

    def information_gain(self, subset) -> float:
        check_is_fitted(self, "model_")
        return information_gain(self.distribution_, check_subset(self.poset_, subset), self._cfg)

    def g_test(self, subset, n_samples: int | None = None, dof: int | None = None):
        check_is_fitted(self, "model_")
        n = self.n_samples_ if n_samples is None else n_samples
        return g_test(self.distribution_, check_subset(self.poset_, subset), n, dof, self._cfg)

    def decompose(self, chain: Sequence[Iterable], q=None):
        """Split ``D(p̂, q)`` along ``chain``; ``q`` is uniform by default."""
        check_is_fitted(self, "model_")
        p = self.distribution_
        return chain_decompose(p, q if q is not None else Distribution.uniform(p.poset), chain,
                               self._cfg)

    def gain_scan(self, n_samples: int | None = None, dof: int | None = None):
        check_is_fitted(self, "model_")
        return gain_scan(self.model_, n_samples, self._cfg, dof, self.n_jobs)


class MutualInformationDecomposer(BaseEstimator):
    """Mutual information between a poset-valued variable and a class label.

    Parameters
    ----------
    poset : Poset
    smoothing : bool
        Add a tiny constant to empty joint cells instead of rejecting them.
    theta_tol, max_outer
        Solver settings, as for :class:`PosetLogLinear`.

    Attributes
    ----------
    joint_table_ : JointTable
    mutual_information_ : float
    classes_ : ndarray
    """

    def __init__(self, poset: Poset | None = None, smoothing: bool = False,
                 theta_tol: float = 1e-9, max_outer: int = 10_000):
        self.poset = poset
        self.smoothing = smoothing
        self.theta_tol = theta_tol
        self.max_outer = max_outer

    def fit(self, X, y):
        """``X`` holds element labels, ``y`` class labels; counts become the joint table."""
        if self.poset is None:
            raise ValidationError("a poset is required")
        self._cfg = check_solver(self.theta_tol, self.max_outer)
        xs = [str(x) for x in X]
        ys = [str(v) for v in y]
        if len(xs) != len(ys) or not xs:
            raise ValidationError("X and y must be nonempty and of equal length")
        classes = sorted(set(ys))
        counts = Counter(zip(ys, xs))
        table = np.zeros((len(classes), len(self.poset)))
        for (yv, xv), c in counts.items():
            table[classes.index(yv), self.poset.index(xv)] = c
        return self.fit_table(JointTable(self.poset, classes, table / len(xs),
                                         columns=self.poset.labels, smoothing=self.smoothing))

    def fit_table(self, table: JointTable):
        """Use a ready-made joint table instead of raw samples."""
        self._cfg = check_solver(self.theta_tol, self.max_outer)
        self.joint_table_ = table
        self.classes_ = np.array(table.y_labels, dtype=object)
        self.mutual_information_ = mutual_information(table)
        return self

    def refined_mi(self, I: Iterable, J: Iterable) -> float:
        check_is_fitted(self, "joint_table_")
        return refined_mi(self.joint_table_, I, J, self._cfg).value

    def decompose(self, chain: Sequence[Iterable]) -> list[float]:
        check_is_fitted(self, "joint_table_")
        return [t.value for t in mi_chain_decompose(self.joint_table_, chain, self._cfg)]

    def singleton_ranking(self) -> list[tuple[str, float]]:
        """``RI(∅, {x})`` for every non-bottom element, largest first."""
        check_is_fitted(self, "joint_table_")
        poset = self.joint_table_.poset
        scores = [(lab, self.refined_mi([], [lab])) for lab in poset.labels[1:]]
        return sorted(scores, key=lambda item: -item[1])

