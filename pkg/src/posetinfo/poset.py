"""Finite posets with a unique bottom element.

Elements are addressed by their string label or by their dense index ``ω``,
which is the element's position in the canonical topological order (the
bottom always has index 0).  All per-element numerical arrays elsewhere in
the package are indexed by ``ω``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DuplicateLabel,
    MultipleMinimalElements,
    RedundantCoverEdge,
    UnknownElement,
    UnknownLabel,
    ValidationError,
)


class Poset:
    """Immutable finite poset given by its cover relation.

    Parameters
    ----------
    labels : sequence of str
        Element labels.  Their order breaks ties in the topological sort.
    covers : iterable of (str, str)
        Pairs ``(child, parent)`` meaning ``child ⋖ parent``.

    Raises
    ------
    DuplicateLabel, UnknownLabel, CycleDetected, MultipleMinimalElements,
    RedundantCoverEdge
    """

    def __init__(self, labels: Sequence[str], covers: Iterable[tuple[str, str]]):
        labels = [str(lab) for lab in labels]
        if not labels:
            raise ValidationError("a poset needs at least one element")
        position: dict[str, int] = {}
        for i, lab in enumerate(labels):
            if lab in position:
                raise DuplicateLabel("duplicate element label", label=lab)
            position[lab] = i
        n = len(labels)

        lower: list[set[int]] = [set() for _ in range(n)]
        upper: list[set[int]] = [set() for _ in range(n)]
        for pair in covers:
            child, parent = (str(v) for v in pair)
            for lab in (child, parent):
                if lab not in position:
                    raise UnknownLabel("cover references an unknown element", label=lab)
            c, p = position[child], position[parent]
            if c == p:
                raise CycleDetected("self-loop in cover relation", label=child)
            if c in lower[p]:
                raise RedundantCoverEdge(f"cover edge ({child}, {parent}) given twice",
                                         label=child)
            lower[p].add(c)
            upper[c].add(p)

        # Kahn's method; ties broken by input position
        indegree = [len(lower[i]) for i in range(n)]
        heap = [i for i in range(n) if indegree[i] == 0]
        heapq.heapify(heap)
        order: list[int] = []
        while heap:
            i = heapq.heappop(heap)
            order.append(i)
            for j in sorted(upper[i]):
                indegree[j] -= 1
                if indegree[j] == 0:
                    heapq.heappush(heap, j)
        if len(order) != n:
            stuck = next(labels[i] for i in range(n) if indegree[i] > 0)
            raise CycleDetected("cover relation contains a cycle", label=stuck)

        minimal = [labels[i] for i in range(n) if not lower[i]]
        if len(minimal) != 1:
            raise MultipleMinimalElements(
                f"expected a unique minimal element, found {len(minimal)}: {minimal[:5]}"
            )

        omega = {old: new for new, old in enumerate(order)}
        self._labels = tuple(labels[i] for i in order)
        self._input_labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self._labels)}
        self._lower = tuple(tuple(sorted(omega[c] for c in lower[i])) for i in order)
        self._upper = tuple(tuple(sorted(omega[c] for c in upper[i])) for i in order)

        # down[x, s] <=> s <= x, filled in topological order
        down = np.zeros((n, n), dtype=bool)
        for x in range(n):
            down[x, x] = True
            for c in self._lower[x]:
                down[x] |= down[c]
        for x in range(n):
            lc = self._lower[x]
            if len(lc) < 2:
                continue
            for c in lc:
                for d in lc:
                    if c != d and down[d, c]:
                        raise RedundantCoverEdge(
                            f"cover ({self._labels[c]}, {self._labels[x]}) is implied "
                            f"through {self._labels[d]}",
                            label=self._labels[c],
                        )
        down.setflags(write=False)
        up = np.ascontiguousarray(down.T)
        up.setflags(write=False)
        self._down = down
        self._up = up
        self._down_idx: dict[int, np.ndarray] = {}
        self._up_idx: dict[int, np.ndarray] = {}
        self._mobius: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    @classmethod
    def from_order(cls, labels: Sequence[str], leq) -> "Poset":
        """Build a poset from its full order relation.

        ``leq`` is either a callable ``leq(i, j)`` on input positions or a
        boolean matrix with ``leq[i, j]`` true iff element ``i <= j``.  The
        cover relation is obtained by transitive reduction.
        """
        n = len(labels)
        if callable(leq):
            rel = np.array([[bool(leq(i, j)) for j in range(n)] for i in range(n)], dtype=bool)
        else:
            rel = np.array(leq, dtype=bool)
            if rel.shape != (n, n):
                raise ValidationError(f"order matrix must be {n}x{n}, got {rel.shape}")
        rel = rel.copy()
        np.fill_diagonal(rel, True)
        both = rel & rel.T
        np.fill_diagonal(both, False)
        if both.any():
            i, _ = np.argwhere(both)[0]
            raise CycleDetected("relation is not antisymmetric", label=str(labels[i]))
        strict = rel.copy()
        np.fill_diagonal(strict, False)
        # strict[:, x] lists elements below x
        covers = []
        for x in range(n):
            below = np.flatnonzero(strict[:, x])
            if below.size == 0:
                continue
            shadowed = strict[:, below].any(axis=1)
            for s in below[~shadowed[below]]:
                covers.append((labels[s], labels[x]))
        return cls(labels, covers)

    # basic accessors -------------------------------------------------

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __contains__(self, x) -> bool:
        try:
            self.index(x)
        except UnknownElement:
            return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self is other or (self._labels == other._labels and self._lower == other._lower)

    def __hash__(self) -> int:
        return hash((self._labels, self._lower))

    def __repr__(self) -> str:
        return f"Poset(n={len(self)}, bottom={self.bottom!r}, covers={self.n_covers})"

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_down_idx"], state["_up_idx"], state["_mobius"] = {}, {}, {}
        return state

    @property
    def labels(self) -> tuple[str, ...]:
        """Labels in canonical (topological) order."""
        return self._labels

    @property
    def input_labels(self) -> tuple[str, ...]:
        return self._input_labels

    @property
    def bottom(self) -> str:
        return self._labels[0]

    @property
    def n_covers(self) -> int:
        return sum(len(lc) for lc in self._lower)

    @property
    def covers(self) -> list[tuple[str, str]]:
        """Cover pairs ``(child, parent)`` ordered by the parent's then child's index."""
        return [(self._labels[c], self._labels[x])
                for x in range(len(self)) for c in self._lower[x]]

    @property
    def leq_matrix(self) -> np.ndarray:
        """Read-only boolean matrix ``M[s, x]`` true iff ``s <= x``."""
        return self._up

    def index(self, x) -> int:
        """Dense index ``ω(x)`` of a label (or a validated integer index)."""
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            if 0 <= x < len(self._labels):
                return int(x)
            raise UnknownElement(f"index {x} out of range for poset of size {len(self)}")
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise UnknownLabel("unknown element", label=x) from None

    def label(self, i: int) -> str:
        return self._labels[i]

    def lower_covers(self, x) -> tuple[str, ...]:
        return tuple(self._labels[c] for c in self._lower[self.index(x)])

    def upper_covers(self, x) -> tuple[str, ...]:
        return tuple(self._labels[c] for c in self._upper[self.index(x)])

    # order queries ---------------------------------------------------

    def leq(self, s, x) -> bool:
        return bool(self._up[self.index(s), self.index(x)])

    def down_indices(self, x) -> np.ndarray:
        """Indices of the principal ideal of ``x`` in increasing ``ω`` order."""
        i = self.index(x)
        idx = self._down_idx.get(i)
        if idx is None:
            idx = np.flatnonzero(self._down[i])
            idx.setflags(write=False)
            self._down_idx[i] = idx
        return idx

    def up_indices(self, x) -> np.ndarray:
        """Indices of the principal filter of ``x`` in increasing ``ω`` order."""
        i = self.index(x)
        idx = self._up_idx.get(i)
        if idx is None:
            idx = np.flatnonzero(self._up[i])
            idx.setflags(write=False)
            self._up_idx[i] = idx
        return idx

    def down_set(self, x) -> frozenset[str]:
        return frozenset(self._labels[i] for i in self.down_indices(x))

    def up_set(self, x) -> frozenset[str]:
        return frozenset(self._labels[i] for i in self.up_indices(x))

    def join(self, x, y) -> str | None:
        """Least upper bound of ``x`` and ``y``, or ``None`` when there is none."""
        common = np.flatnonzero(self._up[self.index(x)] & self._up[self.index(y)])
        if common.size == 0:
            return None
        z = common[0]
        if self._up[z, common].all():
            return self._labels[z]
        return None

    def meet(self, x, y) -> str | None:
        """Greatest lower bound of ``x`` and ``y``, or ``None`` when there is none."""
        common = np.flatnonzero(self._down[self.index(x)] & self._down[self.index(y)])
        z = common[-1]
        if self._down[z, common].all():
            return self._labels[z]
        return None

    def is_lattice(self) -> bool:
        n = len(self)
        return all(self.join(i, j) is not None for i in range(n) for j in range(i + 1, n))

    def mobius_column(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Möbius values ``μ(s, x)`` for ``s`` in the ideal of ``x``.

        Returns ``(idx, mu)`` where ``idx`` is :meth:`down_indices` and
        ``mu[k] = μ(idx[k], x)``.  Cached per element.
        """
        i = self.index(x)
        hit = self._mobius.get(i)
        if hit is not None:
            return hit
        idx = self.down_indices(i)
        m = idx.size
        # sum_{s <= u <= x} mu(u, x) = [s == x], solved from the top down
        sub = self._up[np.ix_(idx, idx)].astype(np.float64)
        mu = np.zeros(m)
        mu[m - 1] = 1.0
        for k in range(m - 2, -1, -1):
            mu[k] = -sub[k, k + 1:] @ mu[k + 1:]
        mu.setflags(write=False)
        self._mobius[i] = (idx, mu)
        return idx, mu

    def covering_graph(self) -> "CoveringGraph":
        return CoveringGraph(vertices=self._labels, edges=tuple(self.covers))

    # serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "elements": list(self._input_labels),
            "covers": [list(c) for c in self.covers],
            "bottom": self.bottom,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Poset":
        try:
            elements = data["elements"]
            covers = data.get("covers", [])
        except (KeyError, TypeError, AttributeError):
            raise ValidationError("poset JSON needs 'elements' and 'covers'") from None
        for c in covers:
            if len(c) != 2:
                raise ValidationError(f"cover entries must be pairs, got {c!r}")
        poset = cls(elements, [tuple(c) for c in covers])
        if data.get("bottom") is not None and str(data["bottom"]) != poset.bottom:
            raise MultipleMinimalElements(
                f"declared bottom {data['bottom']!r} differs from inferred {poset.bottom!r}"
            )
        return poset


def build_poset(labels: Sequence[str], covers: Iterable[tuple[str, str]]) -> Poset:
    """Validate a cover relation and return the resulting :class:`Poset`."""
    return Poset(labels, covers)


def chain(n: int) -> Poset:
    """Chain ``0 < 1 < ... < n-1`` labelled by the decimal digits."""
    labels = [str(i) for i in range(n)]
    return Poset(labels, list(zip(labels[:-1], labels[1:])))


@dataclass(frozen=True)
class CoveringGraph:
    """Undirected Hasse diagram; each edge is stored as ``(lower, upper)``."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    weights: dict[tuple[str, str], float] | None = field(default=None, compare=False)

    def weight(self, a: Hashable, b: Hashable) -> float:
        if self.weights is None:
            raise ValueError("graph is unweighted")
        if (a, b) in self.weights:
            return self.weights[(a, b)]
        return self.weights[(b, a)]

    def path_length(self, path: Sequence[str]) -> float:
        return sum(self.weight(a, b) for a, b in zip(path[:-1], path[1:]))
