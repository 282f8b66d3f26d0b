"""Orthogonal decompositions of KL divergence and entropy on a poset.

All quantities are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .coordinates import Distribution, same_poset
from .errors import JoinDoesNotExist, NotAChain
from .poset import CoveringGraph
from .projection import DEFAULT_CONFIG, SolverConfig, e_project_knockdown, mix, subset_indices


def kl(p: Distribution, q: Distribution) -> float:
    """``D_KL(p, q) = Σ p log(p / q)``."""
    same_poset(p, q)
    return float(math.fsum(p.p * (np.log(p.p) - np.log(q.p))))


def entropy(p: Distribution) -> float:
    return float(-math.fsum(p.p * np.log(p.p)))


def pythagoras_split(p: Distribution, q: Distribution, subset: Iterable,
                     cfg: SolverConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Return ``(D(p, r), D(r, q))`` for the mixed distribution ``r`` of ``(p, q)``."""
    r, _ = mix(p, q, subset, cfg)
    return kl(p, r), kl(r, q)


@dataclass(frozen=True)
class DecompositionTerm:
    from_subset: tuple[str, ...]
    to_subset: tuple[str, ...]
    kl_value: float

    def to_dict(self) -> dict:
        return {"from": list(self.from_subset), "to": list(self.to_subset), "kl": self.kl_value}


def validate_chain(poset, chain: Sequence[Iterable]) -> list[tuple[int, ...]]:
    """Check ``∅ = I_0 ⊆ I_1 ⊆ ... ⊆ I_k = S⁺`` and return index tuples."""
    levels = [subset_indices(poset, level) for level in chain]
    if len(levels) < 2:
        raise NotAChain("a chain needs at least two levels")
    if levels[0]:
        raise NotAChain("a chain must start from the empty set")
    if levels[-1] != tuple(range(1, len(poset))):
        raise NotAChain("a chain must end at the full set S+")
    for prev, nxt in zip(levels, levels[1:]):
        if not set(prev) <= set(nxt):
            raise NotAChain("chain levels must be nested")
    return levels


def chain_decompose(p: Distribution, q: Distribution, chain: Sequence[Iterable],
                    cfg: SolverConfig = DEFAULT_CONFIG) -> list[DecompositionTerm]:
    """Split ``D(p, q)`` along a nested collection of θ-constrained subsets."""
    poset = same_poset(p, q)
    levels = validate_chain(poset, chain)
    mixed = [p]
    for level in levels[1:-1]:
        mixed.append(mix(p, q, level, cfg)[0])
    mixed.append(q)
    names = [tuple(poset.label(i) for i in level) for level in levels]
    return [
        DecompositionTerm(names[i - 1], names[i], kl(mixed[i - 1], mixed[i]))
        for i in range(1, len(levels))
    ]


def entropy_decompose(p: Distribution, subset: Iterable,
                      cfg: SolverConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """``H(X) = log|S| - (D(p, r) + D(r, p0))`` with ``r`` the knock-down of ``subset``."""
    return pythagoras_split(p, Distribution.uniform(p.poset), subset, cfg)


def information_gain(p: Distribution, subset: Iterable,
                     cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    r, _ = e_project_knockdown(p, subset, cfg)
    return kl(p, r)


def _filter_knockdown(p: Distribution, x: int, cfg: SolverConfig) -> Distribution:
    idx = [i for i in p.poset.up_indices(x) if i != 0]
    return e_project_knockdown(p, idx, cfg)[0]


class Subvaluation:
    """``v(x) = log|S| - D(p, p_{↑x})`` where ``p_{↑x}`` knocks down the filter of ``x``.

    Knock-down projections are computed lazily and cached per element.
    """

    def __init__(self, p: Distribution, cfg: SolverConfig = DEFAULT_CONFIG):
        self.p = p
        self.poset = p.poset
        self.cfg = cfg
        self._proj: dict[int, Distribution] = {}

    def projection(self, x) -> Distribution:
        i = self.poset.index(x)
        if i not in self._proj:
            self._proj[i] = _filter_knockdown(self.p, i, self.cfg)
        return self._proj[i]

    def __call__(self, x) -> float:
        return math.log(len(self.poset)) - kl(self.p, self.projection(x))

    def __getitem__(self, x) -> float:
        return self(x)

    @property
    def v(self) -> dict[str, float]:
        return {lab: self(lab) for lab in self.poset.labels}

    def distance(self, x, y) -> float:
        """``d_v(x, y) = 2 v(x ∨ y) - v(x) - v(y)``; requires the join to exist."""
        top = self.poset.join(x, y)
        if top is None:
            raise JoinDoesNotExist(f"{x!r} and {y!r} have no join", label=str(x))
        # fixed evaluation order keeps d(x, y) == d(y, x) bit for bit
        a, b = sorted((self.poset.index(x), self.poset.index(y)))
        return 2.0 * self(top) - self(a) - self(b)

    def edge_weight(self, lower, upper) -> float:
        """``D(p_{↑upper}, p_{↑lower})`` for a cover ``lower ⋖ upper``."""
        return kl(self.projection(upper), self.projection(lower))


def subvaluation(p: Distribution, cfg: SolverConfig = DEFAULT_CONFIG) -> Subvaluation:
    return Subvaluation(p, cfg)


def poset_distance(p: Distribution, x, y, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    return Subvaluation(p, cfg).distance(x, y)


def weighted_covering_graph(p: Distribution, cfg: SolverConfig = DEFAULT_CONFIG,
                            ) -> CoveringGraph:
    v = Subvaluation(p, cfg)
    graph = p.poset.covering_graph()
    weights = {(lo, up): v.edge_weight(lo, up) for lo, up in graph.edges}
    return CoveringGraph(graph.vertices, graph.edges, weights)
