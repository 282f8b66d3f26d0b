"""Probability distributions on a poset and their θ / η coordinates.

``log p(x)`` is the sum of ``θ(s)`` over the ideal of ``x`` and ``η(s)`` is
the mass of the filter of ``s``.  Natural logarithms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    InconsistentEta,
    NonPositiveProbability,
    NotNormalized,
    PosetMismatch,
    PosetTooLarge,
    ValidationError,
)
from .poset import Poset

SUM_TOL = 1e-12
THETA_SUM_TOL = 1e-10
MIN_PROB = 1e-300
MAX_ORTHOGONALITY_SIZE = 6


def _as_vector(poset: Poset, values, what: str) -> np.ndarray:
    if isinstance(values, Mapping):
        vec = np.full(len(poset), np.nan)
        for key, val in values.items():
            vec[poset.index(key)] = float(val)
        if np.isnan(vec).any():
            missing = [poset.label(i) for i in np.flatnonzero(np.isnan(vec))]
            raise ValidationError(f"{what} missing for elements {missing}")
        return vec
    vec = np.array(values, dtype=np.float64).ravel()
    if vec.size != len(poset):
        raise ValidationError(f"{what} has {vec.size} entries, poset has {len(poset)}")
    return vec


class Distribution:
    """Strictly positive probability mass function over a poset.

    ``p`` may be a mapping from labels to probabilities or an array indexed
    by the canonical order ``ω``.
    """

    __slots__ = ("poset", "p")

    def __init__(self, poset: Poset, p, *, check: bool = True):
        vec = _as_vector(poset, p, "probabilities")
        if check:
            bad = np.flatnonzero(~(vec >= MIN_PROB))
            if bad.size:
                raise NonPositiveProbability(
                    f"probability {vec[bad[0]]!r} is not strictly positive",
                    label=poset.label(bad[0]),
                )
            total = vec.sum()
            if abs(total - 1.0) > SUM_TOL:
                raise NotNormalized(f"probabilities sum to {total!r}")
        vec.setflags(write=False)
        self.poset = poset
        self.p = vec

    @classmethod
    def uniform(cls, poset: Poset) -> "Distribution":
        n = len(poset)
        return cls(poset, np.full(n, 1.0 / n), check=False)

    def __len__(self):
        return self.p.size

    def __getitem__(self, x) -> float:
        return float(self.p[self.poset.index(x)])

    def __repr__(self):
        body = ", ".join(f"{lab}: {v:.4g}" for lab, v in zip(self.poset.labels, self.p))
        return f"Distribution({{{body}}})"

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.poset.labels, self.p)}

    def to_dict(self) -> dict:
        return {"poset": self.poset.to_dict(), "p": self.as_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "Distribution":
        try:
            poset = Poset.from_dict(data["poset"])
            return cls(poset, data["p"])
        except (KeyError, TypeError):
            raise ValidationError("distribution JSON needs 'poset' and 'p'") from None


def same_poset(*dists: Distribution) -> Poset:
    poset = dists[0].poset
    for d in dists[1:]:
        if d.poset != poset:
            raise PosetMismatch("distributions live on different posets")
    return poset


@dataclass(frozen=True, eq=False)
class ThetaCoords:
    poset: Poset
    theta: np.ndarray

    @property
    def psi(self) -> float:
        """Log-partition normalizer, ``-θ(⊥)``."""
        return -float(self.theta[0])

    def __getitem__(self, x) -> float:
        return float(self.theta[self.poset.index(x)])

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.poset.labels, self.theta)}


@dataclass(frozen=True, eq=False)
class EtaCoords:
    poset: Poset
    eta: np.ndarray

    def __getitem__(self, x) -> float:
        return float(self.eta[self.poset.index(x)])

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.poset.labels, self.eta)}


def theta_vector(poset: Poset, p: np.ndarray) -> np.ndarray:
    logp = np.log(p)
    theta = np.empty_like(logp)
    for x in range(len(poset)):
        below = poset.down_indices(x)[:-1]
        theta[x] = logp[x] - theta[below].sum()
    return theta


def eta_vector(poset: Poset, p: np.ndarray) -> np.ndarray:
    return np.array([p[poset.up_indices(s)].sum() for s in range(len(poset))])


def theta_from_p(d: Distribution) -> ThetaCoords:
    """θ-coordinates by the bottom-up recursion ``θ(x) = log p(x) - Σ_{s<x} θ(s)``."""
    theta = theta_vector(d.poset, d.p)
    theta.setflags(write=False)
    return ThetaCoords(d.poset, theta)


def eta_from_p(d: Distribution) -> EtaCoords:
    """η-coordinates, ``η(s) = Pr(X >= s)``."""
    eta = eta_vector(d.poset, d.p)
    eta[0] = 1.0 if abs(eta[0] - 1.0) <= SUM_TOL else eta[0]
    eta.setflags(write=False)
    return EtaCoords(d.poset, eta)


def p_from_theta(poset: Poset, t, *, normalize: bool = False) -> Distribution:
    """Invert :func:`theta_from_p`.

    ``t`` is a :class:`ThetaCoords`, a label mapping or an ``ω``-indexed
    array.  With ``normalize`` set, the result is rescaled to sum to one;
    otherwise a sum off by more than 1e-10 raises :class:`NotNormalized`.
    """
    theta = t.theta if isinstance(t, ThetaCoords) else _as_vector(poset, t, "theta")
    logp = np.array([theta[poset.down_indices(x)].sum() for x in range(len(poset))])
    p = np.exp(logp)
    total = p.sum()
    if normalize:
        p = p / total
    elif abs(total - 1.0) > THETA_SUM_TOL:
        raise NotNormalized(f"exp(theta) sums to {total!r}")
    return Distribution(poset, p / p.sum())


def p_from_eta(poset: Poset, e) -> Distribution:
    """Invert :func:`eta_from_p` by peeling filters from the top down."""
    eta = e.eta if isinstance(e, EtaCoords) else _as_vector(poset, e, "eta")
    if abs(eta[0] - 1.0) > SUM_TOL:
        raise InconsistentEta(f"eta(bottom) must be 1, got {eta[0]!r}", label=poset.bottom)
    p = np.empty_like(eta)
    for x in range(len(poset) - 1, -1, -1):
        above = poset.up_indices(x)[1:]
        p[x] = eta[x] - p[above].sum()
        if not p[x] > 0:
            raise InconsistentEta(f"implied probability {p[x]:.6g} is not positive",
                                  label=poset.label(x))
    return Distribution(poset, p, check=False)


def check_orthogonality(d: Distribution, step: float = 1e-5) -> np.ndarray:
    """Finite-difference estimate of ``E[∂_θ(s) log p · ∂_η(s') log p]`` on ``S⁺``.

    Each coordinate is perturbed by ``±step`` (central differences) and the
    complementary representation is rederived before taking the log.  The
    result should be close to the identity matrix.
    """
    poset = d.poset
    n = len(poset)
    if n > MAX_ORTHOGONALITY_SIZE:
        raise PosetTooLarge(f"orthogonality check supports at most "
                            f"{MAX_ORTHOGONALITY_SIZE} elements, got {n}")
    theta = theta_vector(poset, d.p)
    eta = eta_vector(poset, d.p)
    eta[0] = 1.0
    dtheta = np.empty((n - 1, n))
    deta = np.empty((n - 1, n))
    for k, s in enumerate(range(1, n)):
        hi, lo = theta.copy(), theta.copy()
        hi[s] += step
        lo[s] -= step
        dtheta[k] = (np.log(p_from_theta(poset, hi, normalize=True).p)
                     - np.log(p_from_theta(poset, lo, normalize=True).p)) / (2 * step)
        hi, lo = eta.copy(), eta.copy()
        hi[s] += step
        lo[s] -= step
        deta[k] = (np.log(p_from_eta(poset, hi).p)
                   - np.log(p_from_eta(poset, lo).p)) / (2 * step)
    return (dtheta * d.p) @ deta.T
