"""Mixed distributions: match ``η_p`` off a subset ``I`` and ``θ_q`` on ``I``.

The multi-element case is solved by cyclic single-element updates.  A
single-element update for ``x*`` keeps every ``η`` except ``η(x*)`` fixed,
which leaves ``r`` unchanged outside the ideal of ``x*`` and moves it along
the Möbius column there::

    r(s) = p(s) - δ · μ(s, x*),   s <= x*

so ``θ_r(x*) = Σ_s μ(s, x*) log r(s)`` is strictly decreasing in ``δ``.  The
residual tends to ``∓∞`` at the two ends of the interval on which ``r``
stays positive, so that interval is a guaranteed bracket; the root is
refined by Newton steps with a bisection fallback.

Cyclic sweeps can crawl when the constraints are strongly coupled.  With
``r = r_0 - M δ`` (``M`` holding the Möbius columns of ``I``) the solution
minimizes the strictly convex ``Ψ(δ) = Σ (r log r - r) + δ · θ_q(I)``, whose
Hessian is ``Mᵀ diag(1/r) M``.  After ``newton_after`` sweeps the solver
switches to damped Newton on ``Ψ``; since ``Ψ - min Ψ = D_KL(r, r*)``, the
line search keeps the divergence to the limit non-increasing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .coordinates import Distribution, same_poset
from .errors import (
    InvalidSubset,
    MaxIterations,
    MaxOuterIterations,
    NoFeasibleBracket,
    SolverError,
)
from .poset import Poset


@dataclass(frozen=True)
class SolverConfig:
    theta_tol: float = 1e-9
    eta_tol: float = 1e-9
    max_bisect: int = 200
    max_outer: int = 10_000
    # absolute θ residual at which a single-element solve stops
    singleton_tol: float = 1e-12
    # sweeps before switching to joint Newton steps; >= max_outer disables it
    newton_after: int = 50
    newton_max: int = 100

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


DEFAULT_CONFIG = SolverConfig()


@dataclass
class SolverStats:
    outer_iterations: int = 0
    per_target_iterations: dict[str, int] = field(default_factory=dict)
    final_residual: float = 0.0
    eta_residual: float = 0.0
    newton_iterations: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def subset_indices(poset: Poset, subset: Iterable) -> tuple[int, ...]:
    """Validate a subset of ``S⁺`` and return its sorted ``ω`` indices."""
    if isinstance(subset, str):
        raise InvalidSubset("subset must be an iterable of elements, not a string",
                            label=subset)
    idx = sorted({poset.index(x) for x in subset})
    if idx and idx[0] == 0:
        raise InvalidSubset("the bottom element cannot carry a θ constraint",
                            label=poset.bottom)
    return tuple(idx)


class _Target:
    """Per-element data reused across sweeps."""

    __slots__ = ("x", "idx", "mu", "mu_pos", "mu_neg", "pos", "neg", "theta", "iterations")

    def __init__(self, poset: Poset, x: int, theta: float):
        self.x = x
        self.idx, self.mu = poset.mobius_column(x)
        self.pos = self.mu > 0
        self.neg = self.mu < 0
        self.mu_pos = self.mu[self.pos]
        self.mu_neg = self.mu[self.neg]
        self.theta = theta
        self.iterations = 0

    def residual(self, r: np.ndarray) -> float:
        return float(self.mu.dot(np.log(r[self.idx]))) - self.theta


def _solve_singleton(t: _Target, r: np.ndarray, cfg: SolverConfig) -> int:
    """Update ``r`` in place so that ``θ_r(t.x) = t.theta``; returns iterations used."""
    mu = t.mu
    base = r[t.idx]
    f = float(mu.dot(np.log(base))) - t.theta
    if abs(f) <= cfg.singleton_tol:
        return 0
    # positivity of r bounds delta; f -> -inf at hi and +inf at lo
    hi = float((base[t.pos] / t.mu_pos).min())
    lo = float((base[t.neg] / t.mu_neg).max())
    if not lo < 0.0 < hi:
        raise NoFeasibleBracket("empty positivity interval", label=str(t.x))
    delta = 0.0
    vals = base
    for it in range(1, cfg.max_bisect + 1):
        if f > 0:
            lo = delta
        else:
            hi = delta
        # df/ddelta = -Σ μ²/r
        step = delta + f / float(mu.dot(mu / vals))
        if not lo < step < hi:
            step = 0.5 * (lo + hi)
        trial = base - step * mu
        if trial.min() <= 0:
            # rounding at the positivity edge
            if step > delta:
                hi = step
            else:
                lo = step
            continue
        delta, vals = step, trial
        f = float(mu.dot(np.log(vals))) - t.theta
        if abs(f) <= cfg.singleton_tol or hi - lo <= 1e-15 * max(abs(lo), abs(hi)):
            r[t.idx] = vals
            return it
    raise MaxIterations(f"single-element solve did not converge in {cfg.max_bisect} steps")


def _newton(r: np.ndarray, items: list[_Target], cfg: SolverConfig,
            callback: Callable[[np.ndarray], None] | None) -> tuple[int, bool]:
    """Damped Newton on ``Ψ`` starting from ``r``; updates ``r`` in place."""
    rows = np.unique(np.concatenate([t.idx for t in items]))
    M = np.zeros((rows.size, len(items)))
    for k, t in enumerate(items):
        M[np.searchsorted(rows, t.idx), k] = t.mu
    target = np.array([t.theta for t in items])
    v = r[rows].copy()
    d = np.zeros(len(items))

    def potential(vals, delta):
        return float(np.sum(vals * np.log(vals) - vals) + delta @ target)

    f = M.T @ np.log(v) - target
    for it in range(1, cfg.newton_max + 1):
        H = (M / v[:, None]).T @ M
        try:
            step = np.linalg.solve(H, f)
        except np.linalg.LinAlgError:
            return it - 1, False
        dv = M @ step
        t = 1.0
        grow = dv > 0
        if grow.any():
            t = min(1.0, 0.99 * float(np.min(v[grow] / dv[grow])))
        cur = potential(v, d)
        slope = -float(f @ step)
        res = np.max(np.abs(f))
        for _ in range(60):
            nv = v - t * dv
            if nv.min() > 0:
                nf = M.T @ np.log(nv) - target
                if potential(nv, d + t * step) <= cur + 1e-4 * t * slope or \
                        np.max(np.abs(nf)) < res:
                    break
            t *= 0.5
        else:
            return it, False
        d += t * step
        v, f = nv, nf
        r[rows] = v
        if callback is not None:
            callback(r.copy())
        if np.max(np.abs(f)) < cfg.theta_tol:
            return it, True
    return cfg.newton_max, False


def _solve(p: Distribution, targets: dict[int, float], cfg: SolverConfig,
           order: Sequence[int] | None = None,
           callback: Callable[[np.ndarray], None] | None = None,
           ) -> tuple[np.ndarray, SolverStats]:
    poset = p.poset
    r = np.array(p.p, dtype=np.float64)
    stats = SolverStats()
    if not targets:
        return r, stats
    sweep = list(order) if order is not None else sorted(targets)
    if sorted(sweep) != sorted(targets):
        raise InvalidSubset("sweep order must be a permutation of the θ-constrained set")
    items = [_Target(poset, x, targets[x]) for x in sweep]

    res = max(abs(t.residual(r)) for t in items)
    h = 0
    while res >= cfg.theta_tol:
        if h >= cfg.max_outer:
            raise MaxOuterIterations(
                f"mixed distribution not converged after {h} sweeps (residual {res:.3g})"
            )
        if h == cfg.newton_after and len(items) > 1:
            used, _ = _newton(r, items, cfg, callback)
            stats.newton_iterations += used
            res = max(abs(t.residual(r)) for t in items)
            if res < cfg.theta_tol:
                break
        for t in items:
            try:
                t.iterations += _solve_singleton(t, r, cfg)
            except SolverError as exc:
                exc.label = poset.label(t.x)
                raise
        h += 1
        res = max(abs(t.residual(r)) for t in items)
        if callback is not None:
            callback(r.copy())
    r /= r.sum()
    stats.outer_iterations = h
    stats.per_target_iterations = {poset.label(t.x): t.iterations
                                   for t in sorted(items, key=lambda t: t.x)}
    stats.final_residual = res
    return r, stats


def _check_eta(p: Distribution, r: np.ndarray, fixed: Sequence[int], cfg: SolverConfig,
               stats: SolverStats) -> None:
    """Verify η is unchanged off ``fixed``; only ideals of ``fixed`` can move."""
    if not fixed:
        return
    poset = p.poset
    touched = np.unique(np.concatenate([poset.down_indices(x) for x in fixed]))
    diff = r[touched] - p.p[touched]
    drift_all = poset.leq_matrix[np.ix_(touched, touched)] @ diff
    free = ~np.isin(touched, fixed) & (touched != 0)
    drift = float(np.max(np.abs(drift_all[free]))) if free.any() else 0.0
    stats.eta_residual = drift
    if drift > cfg.eta_tol:
        raise SolverError(f"η constraints drifted by {drift:.3g}")


def mix(p: Distribution, q: Distribution, subset: Iterable, cfg: SolverConfig = DEFAULT_CONFIG,
        *, order: Sequence | None = None,
        callback: Callable[[np.ndarray], None] | None = None,
        ) -> tuple[Distribution, SolverStats]:
    """Mixed distribution of ``(p, q)`` with respect to ``subset``.

    Parameters
    ----------
    p, q : Distribution
        ``η_p`` is kept off ``subset``; ``θ_q`` is imposed on it.
    subset : iterable of elements
        Subset of ``S⁺``.
    cfg : SolverConfig
    order : sequence of elements, optional
        Sweep order over ``subset``; ascending ``ω`` by default.
    callback : callable, optional
        Called with a copy of the current iterate after every sweep.

    Returns
    -------
    r : Distribution
    stats : SolverStats
    """
    poset = same_poset(p, q)
    idx = subset_indices(poset, subset)
    if idx and len(idx) == len(poset) - 1:
        # every θ fixed: normalization alone determines r = q
        stats = SolverStats(per_target_iterations={poset.label(x): 0 for x in idx})
        return Distribution(poset, q.p.copy(), check=False), stats
    logq = np.log(q.p)
    targets = {}
    for x in idx:
        cols, mu = poset.mobius_column(x)
        targets[x] = float(mu @ logq[cols])
    sweep = None if order is None else [poset.index(x) for x in order]
    r, stats = _solve(p, targets, cfg, sweep, callback)
    _check_eta(p, r, idx, cfg, stats)
    return Distribution(poset, r, check=False), stats


def mix_singleton(p: Distribution, q: Distribution, xstar, cfg: SolverConfig = DEFAULT_CONFIG,
                  ) -> tuple[Distribution, SolverStats]:
    """Mixed distribution for a one-element subset ``{xstar}``."""
    return mix(p, q, [xstar], cfg)


def e_project_knockdown(p: Distribution, subset: Iterable, cfg: SolverConfig = DEFAULT_CONFIG,
                        **kwargs) -> tuple[Distribution, SolverStats]:
    """Set ``θ(x) = 0`` on ``subset`` while keeping ``η_p`` elsewhere."""
    return mix(p, Distribution.uniform(p.poset), subset, cfg, **kwargs)
