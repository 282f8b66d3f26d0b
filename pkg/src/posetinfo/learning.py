"""Build a poset and its empirical distribution from raw observations.

Three kinds of data are supported: transactions (sets of item ids ordered by
inclusion), nonnegative integer vectors and clustered real vectors (both
ordered componentwise).  An observation is kept when its exact-match
frequency reaches ``sigma``; the bottom element absorbs the remaining mass.
Counting is done in exact rational arithmetic.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Hashable, Iterable, Sequence

import numpy as np

from .coordinates import Distribution
from .errors import EmptyModel, MultipleMinimalElements, NoBottom, ValidationError
from .poset import Poset

BOTTOM_LABEL = "⊥"


def as_threshold(sigma) -> Fraction:
    """Parse ``sigma`` (float, Fraction or a string such as ``"2/25"``) into (0, 1]."""
    if isinstance(sigma, Fraction):
        value = sigma
    elif isinstance(sigma, str):
        try:
            value = Fraction(sigma.strip())
        except ValueError:
            raise ValidationError(f"cannot parse threshold {sigma!r}") from None
    else:
        # floats such as 0.2 must compare equal to 1/5
        value = Fraction(float(sigma)).limit_denominator(10**12)
    if not 0 < value <= 1:
        raise ValidationError(f"threshold must lie in (0, 1], got {sigma!r}")
    return value


def itemset_label(items: Iterable[int]) -> str:
    items = sorted(items)
    return ",".join(str(i) for i in items) if items else BOTTOM_LABEL


def vector_label(vec: Sequence) -> str:
    return "(" + ",".join(_fmt(v) for v in vec) + ")"


def _fmt(v) -> str:
    f = float(v)
    return str(int(f)) if f.is_integer() else repr(f)


@dataclass(frozen=True)
class TransactionDataset:
    transactions: tuple[frozenset[int], ...]
    n_events: int

    def __init__(self, transactions: Iterable[Iterable[int]], n_events: int | None = None):
        ts = tuple(frozenset(int(i) for i in t) for t in transactions)
        if not ts:
            raise ValidationError("a dataset needs at least one transaction")
        largest = max((max(t) for t in ts if t), default=0)
        if n_events is None:
            n_events = max(largest, 1)
        for line, t in enumerate(ts, 1):
            if t and (min(t) < 1 or max(t) > n_events):
                raise ValidationError(f"item ids must lie in [1, {n_events}]",
                                      source=f"transaction {line}")
        object.__setattr__(self, "transactions", ts)
        object.__setattr__(self, "n_events", int(n_events))

    @property
    def n_samples(self) -> int:
        return len(self.transactions)

    @classmethod
    def from_file(cls, path, n_events: int | None = None) -> "TransactionDataset":
        """One transaction per line, whitespace-separated integer item ids.

        Blank lines are empty transactions; lines starting with ``#`` are skipped.
        """
        rows = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if line.lstrip().startswith("#"):
                continue
            try:
                rows.append([int(tok) for tok in line.split()])
            except ValueError:
                raise ValidationError("item ids must be integers",
                                      source=f"{path}:{lineno}") from None
        return cls(rows, n_events)


@dataclass(frozen=True)
class IntVectorDataset:
    points: np.ndarray

    def __init__(self, points):
        arr = np.asarray(points)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValidationError("integer vectors must form a nonempty 2-D array")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValidationError("vector coordinates must be integers")
            arr = arr.astype(np.int64)
        if (arr < 0).any():
            row = int(np.argwhere(arr < 0)[0, 0])
            raise ValidationError("vector coordinates must be nonnegative", source=f"row {row + 1}")
        object.__setattr__(self, "points", arr)

    @property
    def n_samples(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_csv(cls, path) -> "IntVectorDataset":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append([int(v) for v in row])
                except ValueError:
                    raise ValidationError("expected integer entries",
                                          source=f"{path}:{lineno}") from None
        return cls(rows)


@dataclass(frozen=True)
class ClusteredDataset:
    points: np.ndarray
    assignments: tuple[str, ...]
    representatives: dict[str, np.ndarray]
    bottom: np.ndarray | None = None

    def __init__(self, points, assignments, representatives, bottom=None):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValidationError("points must form a 2-D array")
        assign = tuple(str(a) for a in assignments)
        if len(assign) != pts.shape[0]:
            raise ValidationError(f"{len(assign)} assignments for {pts.shape[0]} points")
        if not assign:
            raise ValidationError("a dataset needs at least one point")
        reps = {str(k): np.asarray(v, dtype=np.float64) for k, v in representatives.items()}
        for cid in set(assign):
            if cid not in reps:
                raise ValidationError("cluster has no representative", label=cid)
        for cid, vec in reps.items():
            if vec.shape != (pts.shape[1],):
                raise ValidationError(f"representative has shape {vec.shape}", label=cid)
        if bottom is not None:
            bottom = np.asarray(bottom, dtype=np.float64)
            if bottom.shape != (pts.shape[1],):
                raise ValidationError(f"bottom vector has shape {bottom.shape}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "assignments", assign)
        object.__setattr__(self, "representatives", reps)
        object.__setattr__(self, "bottom", bottom)

    @property
    def n_samples(self) -> int:
        return len(self.assignments)

    @classmethod
    def from_files(cls, points_csv, clusters_json) -> "ClusteredDataset":
        """Points CSV plus JSON ``{assignments, representatives, bottom?}``."""
        pts = np.loadtxt(points_csv, delimiter=",", ndmin=2)
        meta = json.loads(Path(clusters_json).read_text(encoding="utf-8"))
        try:
            return cls(pts, meta["assignments"], meta["representatives"], meta.get("bottom"))
        except KeyError as exc:
            raise ValidationError(f"cluster JSON lacks {exc}", source=str(clusters_json)) from None


@dataclass
class LearnedModel:
    poset: Poset
    phat: Distribution
    sigma: Fraction
    n_samples: int
    exact: dict[str, Fraction]
    counts: dict[str, int]
    keys: dict[str, Hashable] = field(repr=False)
    repaired: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "poset": self.poset.to_dict(),
            "p": {lab: float(self.exact[lab]) for lab in self.poset.input_labels},
            "N": self.n_samples,
            "sigma": str(self.sigma),
            "counts": dict(self.counts),
            "positivity_repair": list(self.repaired),
        }


def _assemble(counts: Counter, n: int, sigma, bottom_key, bottom_label: str,
              label_of, order_matrix, sort_key) -> LearnedModel:
    threshold = as_threshold(sigma)
    freq = {k: Fraction(c, n) for k, c in counts.items()}
    if not any(f >= threshold for f in freq.values()):
        raise EmptyModel(f"no observation reaches the frequency threshold {threshold}")
    kept = sorted((k for k in freq if k != bottom_key and freq[k] >= threshold), key=sort_key)
    keys = [bottom_key] + kept
    labels = [bottom_label] + [label_of(k) for k in kept]
    if len(set(labels)) != len(labels):
        raise ValidationError("distinct observations share a label")
    mass = {lab: freq[k] for lab, k in zip(labels[1:], kept)}
    mass[bottom_label] = 1 - sum(mass.values(), Fraction(0))
    repaired = []
    for lab in labels:
        if mass[lab] == 0:
            mass[lab] = Fraction(1, 10 * n)
            repaired.append(lab)
    if repaired:
        total = sum(mass.values(), Fraction(0))
        mass = {lab: m / total for lab, m in mass.items()}
    try:
        poset = Poset.from_order(labels, order_matrix(keys))
    except MultipleMinimalElements:
        raise NoBottom("designated bottom is not below every retained element") from None
    if poset.bottom != bottom_label:
        raise NoBottom("designated bottom is not below every retained element")
    # floats of the exact masses, so a saved model reloads bit-for-bit
    phat = Distribution(poset, np.array([float(mass[lab]) for lab in poset.labels]))
    return LearnedModel(
        poset=poset,
        phat=phat,
        sigma=threshold,
        n_samples=n,
        exact={lab: mass[lab] for lab in poset.labels},
        counts={lab: counts.get(k, 0) for lab, k in zip(labels, keys)},
        keys=dict(zip(labels, keys)),
        repaired=tuple(repaired),
    )


def _componentwise(vectors) -> np.ndarray:
    arr = np.asarray(vectors, dtype=np.float64)
    return np.all(arr[:, None, :] <= arr[None, :, :], axis=2)


def _inclusion(sets: Sequence[frozenset]) -> np.ndarray:
    items = sorted(set().union(*sets))
    pos = {it: i for i, it in enumerate(items)}
    ind = np.zeros((len(sets), max(len(items), 1)), dtype=bool)
    for r, s in enumerate(sets):
        ind[r, [pos[i] for i in s]] = True
    return np.all(~ind[:, None, :] | ind[None, :, :], axis=2)


def learn_from_transactions(data, sigma) -> LearnedModel:
    """Itemset poset ordered by inclusion; ``∅`` is the bottom."""
    if not isinstance(data, TransactionDataset):
        data = TransactionDataset(data)
    counts = Counter(data.transactions)
    return _assemble(counts, data.n_samples, sigma, frozenset(), BOTTOM_LABEL,
                     itemset_label, _inclusion, lambda s: (len(s), sorted(s)))


def learn_from_int_vectors(data, sigma) -> LearnedModel:
    """Poset of integer vectors under the componentwise order; the zero vector is the bottom."""
    if not isinstance(data, IntVectorDataset):
        data = IntVectorDataset(data)
    counts = Counter(tuple(int(v) for v in row) for row in data.points)
    zero = (0,) * data.dim
    return _assemble(counts, data.n_samples, sigma, zero, vector_label(zero),
                     vector_label, _componentwise, lambda v: (sum(v), v))


def learn_from_clusters(data: ClusteredDataset, sigma) -> LearnedModel:
    """Poset of cluster representatives with ``p̂(c) = |cluster| / N``.

    The bottom is the supplied bottom vector, or else the retained
    representative lying below all other retained ones.
    """
    threshold = as_threshold(sigma)
    n = data.n_samples
    sizes = Counter(data.assignments)
    seen = {}
    for cid, vec in data.representatives.items():
        key = tuple(vec.tolist())
        if key in seen:
            raise ValidationError(f"clusters {seen[key]} and {cid} share a representative",
                                  label=cid)
        seen[key] = cid
    kept = [cid for cid in sorted(sizes) if Fraction(sizes[cid], n) >= threshold]
    if not kept:
        raise EmptyModel(f"no cluster reaches the frequency threshold {threshold}")
    vecs = {cid: tuple(data.representatives[cid].tolist()) for cid in data.representatives}
    counts = Counter({vecs[cid]: sizes[cid] for cid in sizes})
    names = {vecs[cid]: cid for cid in data.representatives}

    if data.bottom is not None:
        bottom_key = tuple(data.bottom.tolist())
        bottom_label = names.get(bottom_key, BOTTOM_LABEL)
    else:
        kept_vecs = np.array([vecs[cid] for cid in kept])
        below_all = np.all(kept_vecs[:, None, :] <= kept_vecs[None, :, :], axis=(1, 2))
        if not below_all.any():
            raise NoBottom("no representative lies below all others and no bottom was supplied")
        bottom_key = vecs[kept[int(np.flatnonzero(below_all)[0])]]
        bottom_label = names[bottom_key]
    # excluded clusters only contribute residual mass to the bottom
    kept_keys = {vecs[cid] for cid in kept}
    counts = Counter({k: c for k, c in counts.items() if k in kept_keys or k == bottom_key})
    return _assemble(counts, n, threshold, bottom_key, bottom_label,
                     lambda k: names[k], _componentwise, lambda v: (sum(v), v))
