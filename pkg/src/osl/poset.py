"""Finite complete lattices built from Hasse-diagram specifications."""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import (
    CycleDetected,
    DuplicateLabel,
    IndexOutOfRange,
    NoUniqueBound,
    NotALattice,
    PosetSpecError,
    UnknownLabel,
)


@dataclass(frozen=True)
class PosetSpec:
    """Labels plus (lower, upper) pairs; pairs may be covers or any order pairs."""

    elements: tuple[str, ...]
    covers: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "covers", tuple(tuple(p) for p in self.covers))

    @classmethod
    def from_dict(cls, data) -> "PosetSpec":
        if not isinstance(data, dict) or "elements" not in data:
            raise PosetSpecError("poset spec needs an 'elements' list")
        covers = data.get("covers", [])
        for pair in covers:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise PosetSpecError(f"cover must be a [lower, upper] pair, got {pair!r}")
        return cls(tuple(data["elements"]), tuple((p[0], p[1]) for p in covers))

    def to_dict(self) -> dict:
        return {"elements": list(self.elements), "covers": [list(p) for p in self.covers]}

    @classmethod
    def chain(cls, labels: Sequence[str]) -> "PosetSpec":
        return cls(tuple(labels), tuple(zip(labels[:-1], labels[1:])))


def _check_labels(spec: PosetSpec) -> dict[str, int]:
    index: dict[str, int] = {}
    for label in spec.elements:
        if not isinstance(label, str) or not label:
            raise PosetSpecError(f"labels must be non-empty strings, got {label!r}")
        if label in index:
            raise DuplicateLabel(f"duplicate label {label!r}")
        index[label] = len(index)
    for lo, hi in spec.covers:
        for label in (lo, hi):
            if label not in index:
                raise PosetSpecError(f"cover references unknown label {label!r}")
        if lo == hi:
            raise CycleDetected((lo, hi))
    return index


def _topological_order(adj: np.ndarray, labels: Sequence[str]) -> np.ndarray:
    """Kahn's algorithm (smallest index first); raises CycleDetected."""
    n = adj.shape[0]
    indeg = adj.sum(axis=0).astype(np.int64)
    ready = [v for v in range(n) if indeg[v] == 0]
    out = []
    while ready:
        v = min(ready)
        ready.remove(v)
        out.append(v)
        for c in np.flatnonzero(adj[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(int(c))
    if len(out) < n:
        left = set(range(n)) - set(out)
        # walk predecessors inside the leftover set until a vertex repeats
        v = min(left)
        seen: list[int] = []
        while v not in seen:
            seen.append(v)
            v = next(int(u) for u in np.flatnonzero(adj[:, v]) if int(u) in left)
        cyc = seen[seen.index(v):][::-1]
        raise CycleDetected([labels[i] for i in cyc + [cyc[0]]])
    return np.asarray(out, dtype=np.int64)


class ComponentLattice:
    """An immutable finite lattice with dense order, join and meet tables.

    Elements are addressed by index in the order given by the PosetSpec. ``leq_matrix[a, b]``
    is true iff ``a`` is below ``b``; ``up_index[a]`` lists the indices above ``a`` in
    ascending order.
    """

    def __init__(self, labels, leq_matrix, joins, meets, topo):
        self.labels: tuple[str, ...] = tuple(labels)
        self.size = len(self.labels)
        self.leq_matrix = leq_matrix
        self.joins = joins
        self.meets = meets
        self.topo = topo
        self.bottom = int(topo[0])
        self.top = int(topo[-1])
        strict = leq_matrix & ~np.eye(self.size, dtype=np.bool_)
        two_step = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
        self.cover_matrix = strict & ~two_step
        self.up_index = [np.flatnonzero(r).astype(np.int64) for r in leq_matrix]
        self.down_index = [np.flatnonzero(c).astype(np.int64) for c in leq_matrix.T]
        self._sorted_labels = sorted((lab, i) for i, lab in enumerate(self.labels))
        self._sorted_keys = [lab for lab, _ in self._sorted_labels]
        for arr in (leq_matrix, joins, meets):
            arr.setflags(write=False)

    def __repr__(self):
        return f"ComponentLattice(size={self.size}, bottom={self.labels[self.bottom]!r}, top={self.labels[self.top]!r})"

    def _check(self, *idx):
        for i in idx:
            if not (isinstance(i, (int, np.integer)) and 0 <= i < self.size):
                raise IndexOutOfRange(f"element index {i!r} not in [0, {self.size})")

    def index_of(self, label: str) -> int:
        k = bisect.bisect_left(self._sorted_keys, label)
        if k < len(self._sorted_keys) and self._sorted_keys[k] == label:
            return self._sorted_labels[k][1]
        raise UnknownLabel(f"unknown label {label!r}")

    def leq(self, a: int, b: int) -> bool:
        self._check(a, b)
        return bool(self.leq_matrix[a, b])

    def join(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.joins[a, b])

    def meet(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.meets[a, b])

    def join_set(self, elements: Iterable[int]) -> int:
        """Join of a set of indices; the empty join is ``bottom``."""
        acc = self.bottom
        for x in elements:
            self._check(x)
            acc = int(self.joins[acc, x])
        return acc

    def meet_set(self, elements: Iterable[int]) -> int:
        """Meet of a set of indices; the empty meet is ``top``."""
        acc = self.top
        for x in elements:
            self._check(x)
            acc = int(self.meets[acc, x])
        return acc

    def up_set(self, a: int) -> frozenset[int]:
        self._check(a)
        return frozenset(int(x) for x in self.up_index[a])

    def covers(self) -> list[tuple[str, str]]:
        lo, hi = np.nonzero(self.cover_matrix)
        return [(self.labels[a], self.labels[b]) for a, b in zip(lo, hi)]

    def to_spec(self) -> PosetSpec:
        return PosetSpec(self.labels, tuple(self.covers()))


def build_lattice(spec: PosetSpec | dict, kernels=None) -> ComponentLattice:
    """Validate ``spec`` and build its lattice.

    Checks run in a fixed order so every invalid spec maps to one error class:
    labels, self-covers and cycles, unique bottom and top, then pairwise bounds.
    """
    if isinstance(spec, dict):
        spec = PosetSpec.from_dict(spec)
    k = kernels or _kernels.active
    index = _check_labels(spec)
    labels = spec.elements
    n = len(labels)
    adj = np.zeros((n, n), dtype=np.bool_)
    for lo, hi in spec.covers:
        adj[index[lo], index[hi]] = True
    topo = _topological_order(adj, labels)
    leq = np.ascontiguousarray(k.reflexive_closure(adj, topo))

    bottoms = np.flatnonzero(leq.all(axis=1))
    if bottoms.size != 1:
        minimal = np.flatnonzero(leq.sum(axis=0) == 1)
        raise NoUniqueBound("bottom", [labels[i] for i in minimal])
    tops = np.flatnonzero(leq.all(axis=0))
    if tops.size != 1:
        maximal = np.flatnonzero(leq.sum(axis=1) == 1)
        raise NoUniqueBound("top", [labels[i] for i in maximal])

    joins = k.bound_table(leq, topo)
    geq = np.ascontiguousarray(leq.T)
    meets = k.bound_table(geq, topo[::-1].copy())
    for table, order, kind in ((joins, leq, "join"), (meets, geq, "meet")):
        bad = np.argwhere(table < 0)
        if bad.size:
            a, b = (int(v) for v in bad[0])
            ub = order[a] & order[b]
            minimal = [u for u in np.flatnonzero(ub) if not (ub & order[:, u]).sum() > 1]
            raise NotALattice((labels[a], labels[b]), kind, [labels[u] for u in minimal])
    # topo[0] / topo[-1] are the bottom and top once both are unique
    return ComponentLattice(labels, leq, joins, meets, topo)


def load_poset_spec(text: str) -> PosetSpec:
    return PosetSpec.from_dict(json.loads(text))
