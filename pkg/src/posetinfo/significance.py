"""Likelihood-ratio (G-) tests for knocked-down θ-coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .coordinates import Distribution
from .decomposition import kl
from .errors import InvalidDof, InvalidSubset, ValidationError
from .projection import DEFAULT_CONFIG, SolverConfig, e_project_knockdown, subset_indices

_EPS = 1e-16
_TINY = 1e-300
_MAX_TERMS = 10_000


def _lower_series(a: float, z: float) -> float:
    """Regularized lower incomplete gamma ``P(a, z)`` by its power series."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_TERMS):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-z + a * math.log(z) - math.lgamma(a))


def _upper_fraction(a: float, z: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, z)`` by modified Lentz."""
    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-z + a * math.log(z) - math.lgamma(a)) * h


def chi2_survival(x: float, k: int) -> float:
    """``P(χ²_k > x)``.

    Uses the series for the lower tail when ``x < k + 1`` and the
    continued fraction for the upper tail otherwise.
    """
    if k < 1 or int(k) != k:
        raise InvalidDof(f"degrees of freedom must be a positive integer, got {k!r}")
    if x < 0:
        raise ValidationError(f"chi-square statistic must be nonnegative, got {x!r}")
    if x == 0:
        return 1.0
    a, z = 0.5 * k, 0.5 * x
    if x < k + 1:
        return max(0.0, 1.0 - _lower_series(a, z))
    return min(1.0, _upper_fraction(a, z))


@dataclass(frozen=True)
class GTestResult:
    lambda_: float
    dof: int
    p_value: float
    knocked_down: tuple[str, ...]
    sample_size: int
    kl: float
    dof_convention: str = "|S|-1"

    def to_dict(self) -> dict:
        return {
            "lambda": self.lambda_,
            "dof": self.dof,
            "dof_convention": self.dof_convention,
            "p_value": self.p_value,
            "I": list(self.knocked_down),
            "N": self.sample_size,
            "kl": self.kl,
        }


def g_test(p: Distribution, subset: Iterable, n_samples: int, dof_override: int | None = None,
           cfg: SolverConfig = DEFAULT_CONFIG) -> GTestResult:
    """Test ``θ_p(x) = 0`` for all ``x`` in ``subset``.

    The null distribution knocks down ``subset``; the statistic is
    ``λ = 2 N D_KL(p, r)`` referred to a χ² law with ``|S| - 1`` degrees of
    freedom unless ``dof_override`` is given.
    """
    idx = subset_indices(p.poset, subset)
    if not idx:
        raise InvalidSubset("the knocked-down subset must be nonempty")
    if n_samples < 1 or int(n_samples) != n_samples:
        raise ValidationError(f"sample size must be a positive integer, got {n_samples!r}")
    if dof_override is not None:
        if int(dof_override) != dof_override or dof_override <= 0:
            raise InvalidDof(f"degrees of freedom must be a positive integer, got {dof_override!r}")
        dof, convention = int(dof_override), "override"
    else:
        dof, convention = len(p.poset) - 1, "|S|-1"
    r, _ = e_project_knockdown(p, idx, cfg)
    divergence = max(kl(p, r), 0.0)
    lam = 2.0 * n_samples * divergence
    return GTestResult(
        lambda_=lam,
        dof=dof,
        p_value=chi2_survival(lam, dof),
        knocked_down=tuple(p.poset.label(i) for i in idx),
        sample_size=int(n_samples),
        kl=divergence,
        dof_convention=convention,
    )
