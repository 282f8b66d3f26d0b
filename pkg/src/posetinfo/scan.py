"""Batch scans over independent knock-down projections.

Each element's projection is independent of the others, so scans may be
spread over worker processes.  Rows are always returned in ``ω`` order and
computed by the same code path, so the output does not depend on the
degree of parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .coordinates import Distribution
from .errors import PosetInfoError, ValidationError
from .projection import DEFAULT_CONFIG, SolverConfig
from .significance import g_test


@dataclass(frozen=True)
class GainRow:
    element: str
    gain: float | None
    lambda_: float | None
    p_value: float | None
    dof: int | None
    error: str | None = None

    def to_dict(self) -> dict:
        row = {"element": self.element, "gain": self.gain, "lambda": self.lambda_,
               "p_value": self.p_value, "dof": self.dof}
        if self.error is not None:
            row["error"] = self.error
        return row


def _scan_chunk(p: Distribution, indices, n_samples, dof, cfg) -> list[GainRow]:
    rows = []
    for i in indices:
        label = p.poset.label(i)
        try:
            res = g_test(p, [i], n_samples, dof, cfg)
        except PosetInfoError as exc:
            rows.append(GainRow(label, None, None, None, None, f"{type(exc).__name__}: {exc}"))
            continue
        rows.append(GainRow(label, res.kl, res.lambda_, res.p_value, res.dof))
    return rows


def default_parallelism() -> int:
    return os.cpu_count() or 1


def gain_scan(model, n_samples: int | None = None, cfg: SolverConfig = DEFAULT_CONFIG,
              dof: int | None = None, parallel: int | None = None) -> list[GainRow]:
    """Information gain, G statistic and p-value of every singleton knock-down.

    ``model`` is a :class:`Distribution` or a fitted model exposing ``phat``
    and ``n_samples``; an explicit ``n_samples`` wins.  Failures are recorded
    per element instead of aborting the scan.  ``parallel`` defaults to the
    number of available cores.
    """
    if isinstance(model, Distribution):
        p = model
    else:
        p = model.phat
        if n_samples is None:
            n_samples = model.n_samples
    if n_samples is None:
        raise ValidationError("a sample size is required to scan a bare distribution")
    workers = default_parallelism() if parallel is None else max(1, int(parallel))
    elements = list(range(1, len(p.poset)))
    if workers == 1 or len(elements) < 2:
        return _scan_chunk(p, elements, n_samples, dof, cfg)
    n_chunks = min(len(elements), 4 * workers)
    chunks = [elements[k::n_chunks] for k in range(n_chunks)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_scan_chunk, p, c, n_samples, dof, cfg) for c in chunks]
        rows = [row for fut in futures for row in fut.result()]
    order = {lab: i for i, lab in enumerate(p.poset.labels)}
    return sorted(rows, key=lambda row: order[row.element])
