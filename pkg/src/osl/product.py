"""The observer x situation product lattice and its node ids."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import IndexOutOfRange, PosetSpecError
from .poset import ComponentLattice, PosetSpec, build_lattice


class OslCarrier:
    """Product of an observer lattice and a situation lattice.

    Node ids pack ``(o, s)`` row-major by observer: ``id = o * n_sit + s``. The
    product order is never materialised; every test goes through the two
    component tables.
    """

    def __init__(self, observers: ComponentLattice, situations: ComponentLattice):
        self.observers = observers
        self.situations = situations
        self.n_obs = observers.size
        self.n_sit = situations.size
        self.n = self.n_obs * self.n_sit
        self.bottom = self.node(observers.bottom, situations.bottom)
        self.top = self.node(observers.top, situations.top)
        # per-node component coordinates, handy for vectorised callers
        self.obs_of = np.repeat(np.arange(self.n_obs, dtype=np.int64), self.n_sit)
        self.sit_of = np.tile(np.arange(self.n_sit, dtype=np.int64), self.n_obs)

    def __repr__(self):
        return f"OslCarrier(n_obs={self.n_obs}, n_sit={self.n_sit})"

    def node(self, o: int, s: int) -> int:
        return int(o) * self.n_sit + int(s)

    def split(self, e: int) -> tuple[int, int]:
        self.check(e)
        return divmod(int(e), self.n_sit)

    def check(self, *nodes):
        for e in nodes:
            if not (isinstance(e, (int, np.integer)) and 0 <= e < self.n):
                raise IndexOutOfRange(f"node id {e!r} not in [0, {self.n})")

    def node_of(self, observer: str, situation: str) -> int:
        """Resolve labels to a node id (raises UnknownLabel)."""
        return self.node(self.observers.index_of(observer), self.situations.index_of(situation))

    def labels_of(self, e: int) -> tuple[str, str]:
        o, s = self.split(e)
        return self.observers.labels[o], self.situations.labels[s]

    def leq(self, e1: int, e2: int) -> bool:
        o1, s1 = self.split(e1)
        o2, s2 = self.split(e2)
        return bool(self.observers.leq_matrix[o1, o2] and self.situations.leq_matrix[s1, s2])

    def comparable(self, e1: int, e2: int) -> bool:
        return self.leq(e1, e2) or self.leq(e2, e1)

    def join(self, e1: int, e2: int) -> int:
        o1, s1 = self.split(e1)
        o2, s2 = self.split(e2)
        return self.node(self.observers.joins[o1, o2], self.situations.joins[s1, s2])

    def meet(self, e1: int, e2: int) -> int:
        o1, s1 = self.split(e1)
        o2, s2 = self.split(e2)
        return self.node(self.observers.meets[o1, o2], self.situations.meets[s1, s2])

    def join_set(self, nodes: Iterable[int]) -> int:
        """Componentwise join; the empty join is the carrier bottom."""
        o, s = self.observers.bottom, self.situations.bottom
        for e in nodes:
            eo, es = self.split(e)
            o = self.observers.joins[o, eo]
            s = self.situations.joins[s, es]
        return self.node(o, s)

    def meet_set(self, nodes: Iterable[int]) -> int:
        """Componentwise meet; the empty meet is the carrier top."""
        o, s = self.observers.top, self.situations.top
        for e in nodes:
            eo, es = self.split(e)
            o = self.observers.meets[o, eo]
            s = self.situations.meets[s, es]
        return self.node(o, s)

    def _fold_rows(self, rows, o_table, s_table, o_start, s_start):
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim != 2:
            raise ValueError("expected a 2-d array of node ids")
        if rows.size and (rows.min() < 0 or rows.max() >= self.n):
            raise IndexOutOfRange("node id out of range")
        o = np.full(rows.shape[0], o_start, dtype=np.int64)
        s = np.full(rows.shape[0], s_start, dtype=np.int64)
        for k in range(rows.shape[1]):
            o = o_table[o, self.obs_of[rows[:, k]]]
            s = s_table[s, self.sit_of[rows[:, k]]]
        return o * self.n_sit + s

    def join_rows(self, rows) -> np.ndarray:
        """Join of every row of an ``(m, k)`` id array; vectorised ``join_set``."""
        return self._fold_rows(rows, self.observers.joins, self.situations.joins,
                               self.observers.bottom, self.situations.bottom)

    def meet_rows(self, rows) -> np.ndarray:
        return self._fold_rows(rows, self.observers.meets, self.situations.meets,
                               self.observers.top, self.situations.top)

    def upward_closure(self, e: int) -> np.ndarray:
        """All nodes above ``e`` as an ascending id array."""
        o, s = self.split(e)
        obs_up = self.observers.up_index[o]
        sit_up = self.situations.up_index[s]
        return (obs_up[:, None] * self.n_sit + sit_up[None, :]).ravel()

    def upclosure_size(self, e: int) -> int:
        o, s = self.split(e)
        return self.observers.up_index[o].size * self.situations.up_index[s].size

    def to_dict(self) -> dict:
        return {
            "observers": self.observers.to_spec().to_dict(),
            "situations": self.situations.to_spec().to_dict(),
        }


def build_carrier(observers, situations) -> OslCarrier:
    """Accepts built lattices, PosetSpecs or their JSON dicts."""
    if not isinstance(observers, ComponentLattice):
        observers = build_lattice(observers)
    if not isinstance(situations, ComponentLattice):
        situations = build_lattice(situations)
    return OslCarrier(observers, situations)


def carrier_from_dict(data) -> OslCarrier:
    if not isinstance(data, dict) or "observers" not in data or "situations" not in data:
        raise PosetSpecError("carrier spec needs 'observers' and 'situations'")
    return build_carrier(PosetSpec.from_dict(data["observers"]),
                         PosetSpec.from_dict(data["situations"]))
