"""Argument checks shared by the estimator wrappers."""

from __future__ import annotations

from numbers import Integral, Real

from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted as _sk_check_is_fitted

from .errors import ValidationError
from .learning import as_threshold
from .projection import SolverConfig

KINDS = ("transactions", "int_vectors", "clusters")


def check_sigma(sigma):
    return as_threshold(sigma)


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def check_solver(theta_tol, max_outer) -> SolverConfig:
    if not isinstance(theta_tol, Real) or not theta_tol > 0:
        raise ValidationError(f"theta_tol must be a positive number, got {theta_tol!r}")
    if not isinstance(max_outer, Integral) or max_outer < 1:
        raise ValidationError(f"max_outer must be a positive integer, got {max_outer!r}")
    return SolverConfig(theta_tol=float(theta_tol), max_outer=int(max_outer))


def check_subset(poset, subset) -> list[str]:
    """Element labels of ``subset``; a lone label is promoted to a singleton."""
    if isinstance(subset, (str, int)):
        subset = [subset]
    return [poset.label(poset.index(x)) for x in subset]


def check_is_fitted(estimator, attributes=None) -> None:
    """sklearn's check, with a hint about which method to call first."""
    try:
        _sk_check_is_fitted(estimator, attributes)
    except NotFittedError:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit before using it"
        ) from None
