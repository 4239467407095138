"""Belief records, the credibility cache, and read-only queries over them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidNode, WeightOutOfRange
from .product import OslCarrier

_NEGATION_PREFIXES = ("~", "¬", "!", "-")


@dataclass(frozen=True, order=True)
class Literal:
    atom: str
    negated: bool = False

    def __post_init__(self):
        if not isinstance(self.atom, str) or not self.atom:
            raise ValueError("literal atom must be a non-empty string")

    def __neg__(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    def __str__(self):
        return ("~" if self.negated else "") + self.atom

    @classmethod
    def parse(cls, text: str) -> "Literal":
        """``"p"`` or a negated form such as ``"~p"`` / ``"¬p"`` / ``"!p"``."""
        text = text.strip()
        negated = False
        while text[:1] in _NEGATION_PREFIXES and len(text) > 1:
            text = text[1:].strip()
            negated = not negated
        return cls(text, negated)


@dataclass(frozen=True)
class BeliefRecord:
    id: int
    literal: Literal
    node: int
    weight: float


class CredibilityCache:
    """Map ``(literal, node) -> weight`` where absent means 0.

    Storage is one float row over the carrier per literal that currently has
    positive credibility somewhere; zero entries are never enumerated.
    """

    def __init__(self, n: int):
        self.n = n
        self.rows: dict[Literal, np.ndarray] = {}

    def get(self, literal: Literal, node: int) -> float:
        row = self.rows.get(literal)
        return 0.0 if row is None else float(row[node])

    def row(self, literal: Literal) -> np.ndarray | None:
        return self.rows.get(literal)

    def writable_row(self, literal: Literal) -> np.ndarray:
        row = self.rows.get(literal)
        if row is None:
            row = self.rows[literal] = np.zeros(self.n, dtype=np.float64)
        return row

    def set_row(self, literal: Literal, row: np.ndarray):
        if row.any():
            self.rows[literal] = row
        else:
            self.rows.pop(literal, None)

    def drop_if_empty(self, literal: Literal):
        row = self.rows.get(literal)
        if row is not None and not row.any():
            del self.rows[literal]

    def clear(self, literals=None):
        if literals is None:
            self.rows.clear()
        else:
            for lit in literals:
                self.rows.pop(lit, None)

    def literals(self) -> list[Literal]:
        return sorted(self.rows)

    def entries(self) -> Iterator[tuple[Literal, int, float]]:
        for lit in sorted(self.rows):
            row = self.rows[lit]
            for node in np.flatnonzero(row):
                yield lit, int(node), float(row[node])

    def __len__(self):
        return sum(int(np.count_nonzero(r)) for r in self.rows.values())

    def snapshot(self) -> dict[Literal, np.ndarray]:
        return {lit: row.copy() for lit, row in self.rows.items()}


class BeliefBase:
    """Records indexed by literal plus the credibility cache.

    Single writer: mutation needs exclusive access, reads may run concurrently
    between mutations. Removed records keep their id and stay readable through
    :meth:`record` but are excluded from every query.
    """

    def __init__(self, carrier: OslCarrier):
        self.carrier = carrier
        self.cache = CredibilityCache(carrier.n)
        self._records: list[BeliefRecord] = []
        self._live: list[bool] = []
        self.by_formula: dict[Literal, list[int]] = {}
        self.visits = 0  # cumulative propagation node visits
        self._scratch = np.empty(carrier.n, dtype=np.int64)

    def __len__(self):
        return sum(self._live)

    def check_node(self, node) -> int:
        if isinstance(node, bool) or not isinstance(node, (int, np.integer)) or not 0 <= node < self.carrier.n:
            raise InvalidNode(f"node {node!r} is not in the carrier (n={self.carrier.n})")
        return int(node)

    @staticmethod
    def check_weight(weight) -> float:
        try:
            w = float(weight)
        except (TypeError, ValueError):
            raise WeightOutOfRange(f"weight {weight!r} is not a number") from None
        if math.isnan(w) or not 0.0 <= w <= 1.0:
            raise WeightOutOfRange(f"weight {weight!r} not in [0, 1]")
        return w

    def insert_raw(self, literal: Literal, node: int, weight: float) -> BeliefRecord:
        """Store a record without touching the cache."""
        w = self.check_weight(weight)
        node = self.check_node(node)
        rec = BeliefRecord(len(self._records), literal, node, w)
        self._records.append(rec)
        self._live.append(True)
        self.by_formula.setdefault(literal, []).append(rec.id)
        return rec

    def remove(self, record_ids) -> list[Literal]:
        """Mark records deleted; returns the literals whose support changed.

        The cache is left stale for those literals.
        """
        touched = set()
        for rid in record_ids:
            rec = self._records[rid]
            if not self._live[rid]:
                continue
            self._live[rid] = False
            ids = self.by_formula[rec.literal]
            ids.remove(rid)
            if not ids:
                del self.by_formula[rec.literal]
            touched.add(rec.literal)
        return sorted(touched)

    def record(self, rid: int) -> BeliefRecord:
        return self._records[rid]

    def is_live(self, rid: int) -> bool:
        return 0 <= rid < len(self._records) and self._live[rid]

    def records(self) -> list[BeliefRecord]:
        """Live records in id order."""
        return [r for r, live in zip(self._records, self._live) if live]

    def all_records(self) -> list[BeliefRecord]:
        return list(self._records)

    def literal_records(self, literal: Literal) -> list[BeliefRecord]:
        return [self._records[i] for i in self.by_formula.get(literal, ())]

    def atoms(self) -> list[str]:
        return sorted({lit.atom for lit in self.by_formula})

    def cred(self, literal: Literal, node: int) -> float:
        return self.cache.get(literal, self.check_node(node))

    def support_set(self, literal: Literal, node: int) -> set[int]:
        node = self.check_node(node)
        leq = self.carrier.leq
        return {r.id for r in self.literal_records(literal) if leq(r.node, node)}

    def supported_theory(self, node: int) -> set[Literal]:
        node = self.check_node(node)
        return {lit for lit, row in self.cache.rows.items() if row[node] > 0}
