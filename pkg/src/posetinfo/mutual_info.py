"""Mutual information between a poset-valued ``X`` and a plain label ``Y``,
refined along subsets of ``S⁺``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .coordinates import Distribution
from .decomposition import kl, validate_chain
from .errors import NonPositiveProbability, NotNormalized, ValidationError
from .poset import Poset
from .projection import DEFAULT_CONFIG, SolverConfig, mix, subset_indices

SMOOTHING_EPS = 1e-9


class JointTable:
    """Joint probabilities ``Pr(X = x, Y = y)``; rows are indexed by ``Y``.

    Parameters
    ----------
    poset : Poset
    y_labels : sequence of str
    joint : array-like, shape (n_y, |S|)
    columns : sequence of labels, optional
        Element order of the columns.  Defaults to the canonical order.
    smoothing : bool
        Add ``1e-9`` to every cell and renormalize instead of rejecting zeros.
    """

    def __init__(self, poset: Poset, y_labels: Sequence[str], joint, columns=None,
                 smoothing: bool = False):
        table = np.array(joint, dtype=np.float64)
        y_labels = [str(y) for y in y_labels]
        if table.ndim != 2 or table.shape != (len(y_labels), len(poset)):
            raise ValidationError(
                f"joint table must have shape ({len(y_labels)}, {len(poset)}), got {table.shape}"
            )
        if len(set(y_labels)) != len(y_labels):
            raise ValidationError("duplicate Y labels")
        if columns is not None:
            perm = [poset.index(c) for c in columns]
            if sorted(perm) != list(range(len(poset))):
                raise ValidationError("columns must list every poset element once")
            reordered = np.empty_like(table)
            reordered[:, perm] = table
            table = reordered
        if smoothing:
            table = table + SMOOTHING_EPS
            table /= table.sum()
        if not (table > 0).all():
            j, i = np.argwhere(~(table > 0))[0]
            raise NonPositiveProbability(
                f"joint cell (Y={y_labels[j]}) is not strictly positive",
                label=poset.label(i),
            )
        total = table.sum()
        if abs(total - 1.0) > 1e-12:
            raise NotNormalized(f"joint table sums to {total!r}")
        table.setflags(write=False)
        self.poset = poset
        self.y_labels = tuple(y_labels)
        self.joint = table
        self.p_y = table.sum(axis=1)
        marginal = table.sum(axis=0)
        self.marginal = Distribution(poset, marginal / marginal.sum(), check=False)
        self.conditionals = tuple(
            Distribution(poset, row / row.sum(), check=False) for row in table
        )

    @classmethod
    def from_dict(cls, data: dict, smoothing: bool = False) -> "JointTable":
        try:
            poset = Poset.from_dict(data["poset"])
            return cls(poset, data["y_labels"], data["joint"],
                       columns=data.get("columns", poset.input_labels), smoothing=smoothing)
        except (KeyError, TypeError):
            raise ValidationError("joint table JSON needs 'poset', 'y_labels' and 'joint'") from None

    def to_dict(self) -> dict:
        return {
            "poset": self.poset.to_dict(),
            "y_labels": list(self.y_labels),
            "columns": list(self.poset.labels),
            "joint": self.joint.tolist(),
        }


@dataclass(frozen=True)
class RefinedMI:
    I: tuple[str, ...]
    J: tuple[str, ...]
    value: float

    def to_dict(self) -> dict:
        return {"I": list(self.I), "J": list(self.J), "value": self.value}


def mutual_information(t: JointTable) -> float:
    """``MI(X, Y) = Σ_y p_Y(y) D_KL(p|y, p)``."""
    return math.fsum(py * kl(cond, t.marginal) for py, cond in zip(t.p_y, t.conditionals))


def mixed_conditionals(t: JointTable, subset: Iterable,
                       cfg: SolverConfig = DEFAULT_CONFIG) -> list[Distribution]:
    """``p|yI`` for every ``y``: ``η`` of the conditional off ``subset``, ``θ`` of the marginal on it."""
    idx = subset_indices(t.poset, subset)
    return [mix(cond, t.marginal, idx, cfg)[0] for cond in t.conditionals]


def _expected_kl(t: JointTable, left: Sequence[Distribution], right: Sequence[Distribution]) -> float:
    return math.fsum(py * kl(a, b) for py, a, b in zip(t.p_y, left, right))


def refined_mi(t: JointTable, I: Iterable, J: Iterable,
               cfg: SolverConfig = DEFAULT_CONFIG) -> RefinedMI:
    idx_i = subset_indices(t.poset, I)
    idx_j = subset_indices(t.poset, J)
    names_i = tuple(t.poset.label(x) for x in idx_i)
    names_j = tuple(t.poset.label(x) for x in idx_j)
    if idx_i == idx_j:
        return RefinedMI(names_i, names_j, 0.0)
    value = _expected_kl(t, mixed_conditionals(t, idx_i, cfg), mixed_conditionals(t, idx_j, cfg))
    return RefinedMI(names_i, names_j, value)


def mi_chain_decompose(t: JointTable, chain: Sequence[Iterable],
                       cfg: SolverConfig = DEFAULT_CONFIG) -> list[RefinedMI]:
    """Split ``MI(X, Y)`` along ``∅ = I_0 ⊆ ... ⊆ I_k = S⁺``."""
    levels = validate_chain(t.poset, chain)
    mixed = [mixed_conditionals(t, level, cfg) for level in levels]
    names = [tuple(t.poset.label(x) for x in level) for level in levels]
    return [
        RefinedMI(names[i - 1], names[i], _expected_kl(t, mixed[i - 1], mixed[i]))
        for i in range(1, len(levels))
    ]
