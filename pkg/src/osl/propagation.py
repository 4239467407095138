"""Incremental belief propagation and the full-sweep rebuild."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import _kernels
from .belief_base import BeliefBase, BeliefRecord, Literal

Notify = Callable[[Literal, int, float], None]

DEFAULT_EPSILON = 1e-12
DEFAULT_MAX_ITERATIONS = 20


@dataclass(frozen=True)
class AffectedSet:
    """Nodes whose cached credibility strictly increased, ascending.

    ``visited`` counts the nodes the update loop touched; it always equals the
    size of the insertion node's upward closure.
    """

    nodes: tuple[int, ...]
    visited: int
    record: Optional[BeliefRecord] = None

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __contains__(self, node):
        return node in self.nodes


@dataclass
class SweepReport:
    iterations: int = 0
    deltas: list[float] = field(default_factory=list)


def propagate(base: BeliefBase, record: BeliefRecord, notify: Notify | None = None,
              kernels=None) -> AffectedSet:
    """Push one stored record through its upward closure.

    New values are ``max(old, w)`` on every node above the record, which is
    exactly the credibility after the insertion; nothing else is touched.
    """
    k = kernels or _kernels.active
    carrier = base.carrier
    o, s = divmod(record.node, carrier.n_sit)
    fresh = base.cache.row(record.literal) is None
    row = base.cache.writable_row(record.literal)
    count, visited = k.rbp_update(row, carrier.observers.up_index[o],
                                  carrier.situations.up_index[s], carrier.n_sit,
                                  record.weight, base._scratch)
    base.visits += visited
    if count == 0:
        if fresh:
            base.cache.drop_if_empty(record.literal)
        nodes = ()
    else:
        # the kernels emit ids in ascending order
        nodes = tuple(base._scratch[:count].tolist())
        if notify is not None:
            for x in nodes:
                notify(record.literal, x, record.weight)
    return AffectedSet(nodes, int(visited), record)


def rbp_insert(base: BeliefBase, literal: Literal, node: int, weight: float,
               notify: Notify | None = None, kernels=None) -> AffectedSet:
    """Insert ``<literal, node, weight>`` and update the cache over its upward closure."""
    record = base.insert_raw(literal, node, weight)
    return propagate(base, record, notify, kernels)


def credibility_row(base: BeliefBase, literal: Literal, kernels=None) -> np.ndarray:
    """Credibility of ``literal`` at every node, recomputed from the live records."""
    k = kernels or _kernels.active
    carrier = base.carrier
    recs = base.literal_records(literal)
    out = np.zeros(carrier.n, dtype=np.float64)
    if recs:
        nodes = np.fromiter((r.node for r in recs), dtype=np.int64, count=len(recs))
        weights = np.fromiter((r.weight for r in recs), dtype=np.float64, count=len(recs))
        k.scatter_max(carrier.n_sit, nodes // carrier.n_sit, nodes % carrier.n_sit, weights,
                      carrier.observers.leq_matrix, carrier.situations.leq_matrix, out)
    return out


def full_sweep(base: BeliefBase, epsilon: float = DEFAULT_EPSILON,
               max_iterations: int = DEFAULT_MAX_ITERATIONS,
               literals: Iterable[Literal] | None = None,
               from_zero: bool = False, kernels=None) -> SweepReport:
    """Recompute cached credibility until the per-sweep change drops below ``epsilon``.

    Only literals with live records (or stale cache rows) are swept; every other
    entry is zero by definition. The sweep starts from the current cache, or
    from all zeros when ``from_zero`` is set.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    if literals is None:
        targets = sorted(set(base.by_formula) | set(base.cache.rows))
    else:
        targets = sorted(set(literals))
    if from_zero:
        base.cache.clear(targets)

    report = SweepReport()
    zero = np.zeros(base.carrier.n, dtype=np.float64)
    while True:
        delta = 0.0
        for lit in targets:
            old = base.cache.row(lit)
            new = credibility_row(base, lit, kernels)
            diff = float(np.max(np.abs(new - (zero if old is None else old)))) if new.size else 0.0
            delta = max(delta, diff)
            base.cache.set_row(lit, new)
        report.iterations += 1
        report.deltas.append(delta)
        if delta < epsilon or report.iterations >= max_iterations:
            return report
