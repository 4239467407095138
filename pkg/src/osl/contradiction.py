"""Contradiction components over comparable records, and their resolution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import _kernels
from .belief_base import BeliefBase, Literal
from .errors import StaleComponents

MAX_EXHAUSTIVE_ATOMS = 20


def contradict(l1: Literal, l2: Literal) -> bool:
    """Literal clash: same atom, opposite polarity."""
    return l1.atom == l2.atom and l1.negated != l2.negated


# -- small general formulas -------------------------------------------------
# A formula is an atom name, a Literal, or a tuple ("not", f), ("and", f, ...),
# ("or", f, ...), ("implies", f, g).

def formula_atoms(f) -> set[str]:
    if isinstance(f, str):
        return {f}
    if isinstance(f, Literal):
        return {f.atom}
    return set().union(*(formula_atoms(g) for g in f[1:]))


def evaluate(f, assignment: dict[str, bool]) -> bool:
    if isinstance(f, str):
        return assignment.get(f, False)
    if isinstance(f, Literal):
        return assignment.get(f.atom, False) != f.negated
    op, args = f[0], f[1:]
    if op == "not":
        return not evaluate(args[0], assignment)
    if op == "and":
        return all(evaluate(g, assignment) for g in args)
    if op == "or":
        return any(evaluate(g, assignment) for g in args)
    if op == "implies":
        return (not evaluate(args[0], assignment)) or evaluate(args[1], assignment)
    raise ValueError(f"unknown connective {op!r}")


def contradict_exhaustive(f1, f2) -> bool:
    """True iff ``f1 and f2`` has no model, by truth-table enumeration.

    Desk-scale only: refuses more than 20 distinct atoms.
    """
    atoms = sorted(formula_atoms(f1) | formula_atoms(f2))
    if len(atoms) > MAX_EXHAUSTIVE_ATOMS:
        raise ValueError(f"{len(atoms)} atoms exceeds the exhaustive limit of {MAX_EXHAUSTIVE_ATOMS}")
    for bits in itertools.product((False, True), repeat=len(atoms)):
        env = dict(zip(atoms, bits))
        if evaluate(f1, env) and evaluate(f2, env):
            return False
    return True


# -- union-find ---------------------------------------------------------------

class UnionFind:
    """Disjoint sets over hashable keys; union by rank with path compression."""

    def __init__(self, items: Iterable = ()):
        self.parent: dict = {}
        self.rank: dict = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


# -- decomposition ------------------------------------------------------------

@dataclass(frozen=True)
class ContradictionComponent:
    record_ids: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __len__(self):
        return len(self.record_ids)

    def to_dict(self) -> dict:
        return {"members": list(self.record_ids), "edges": [list(e) for e in self.edges]}


@dataclass
class ResolutionReport:
    removed: list[int] = field(default_factory=list)
    survivors: list[list[int]] = field(default_factory=list)

    def __bool__(self):
        return bool(self.removed or self.survivors)

    def to_dict(self) -> dict:
        return {"removed": list(self.removed), "survivors": [list(s) for s in self.survivors]}


def _edges_between(base: BeliefBase, ids_a, ids_b, kernels) -> list[tuple[int, int]]:
    carrier = base.carrier
    na = np.asarray([base.record(i).node for i in ids_a], dtype=np.int64)
    nb = np.asarray([base.record(i).node for i in ids_b], dtype=np.int64)
    ia, ib = kernels.comparable_pairs(na // carrier.n_sit, na % carrier.n_sit,
                                      nb // carrier.n_sit, nb % carrier.n_sit,
                                      carrier.observers.leq_matrix, carrier.situations.leq_matrix)
    out = []
    for i, j in zip(ia.tolist(), ib.tolist()):
        x, y = ids_a[i], ids_b[j]
        out.append((x, y) if x < y else (y, x))
    return out


def contradiction_edges(base: BeliefBase, atoms: Iterable[str] | None = None,
                        kernels=None) -> list[tuple[int, int]]:
    """Every (lower id, higher id) pair of live, comparable, clashing records."""
    k = kernels or _kernels.active
    if atoms is None:
        atoms = base.atoms()
    edges = []
    for atom in sorted(set(atoms)):
        pos = base.by_formula.get(Literal(atom, False))
        neg = base.by_formula.get(Literal(atom, True))
        if pos and neg:
            edges.extend(_edges_between(base, list(pos), list(neg), k))
    edges.sort()
    return edges


def mcc(base: BeliefBase, atoms: Iterable[str] | None = None,
        kernels=None) -> list[ContradictionComponent]:
    """Non-singleton connected components of the contradiction graph.

    Candidate pairs come from the literal index (same atom, opposite polarity),
    so only those are tested for comparability. ``atoms`` restricts the scan.
    Components are ordered by their smallest member id.
    """
    return _components(contradiction_edges(base, atoms, kernels))


def _joined_pairs(base: BeliefBase, ids_a, ids_b) -> list[tuple[int, int]]:
    # every pair whose supports meet at the join of the two nodes
    pa = [i for i in ids_a if base.record(i).weight > 0]
    pb = [i for i in ids_b if base.record(i).weight > 0]
    return [(x, y) if x < y else (y, x) for x in pa for y in pb]


def joined_edges(base: BeliefBase, atoms: Iterable[str] | None = None) -> list[tuple[int, int]]:
    """Clashing pairs of live, positive-weight records, comparable or not.

    In a lattice any two nodes have a join, and the join inherits both
    records, so each such pair is a conflict at some node.
    """
    if atoms is None:
        atoms = base.atoms()
    edges = []
    for atom in sorted(set(atoms)):
        pos = base.by_formula.get(Literal(atom, False))
        neg = base.by_formula.get(Literal(atom, True))
        if pos and neg:
            edges.extend(_joined_pairs(base, pos, neg))
    edges.sort()
    return edges


def _components(edges) -> list[ContradictionComponent]:
    uf = UnionFind()
    for a, b in edges:
        uf.union(a, b)
    by_root: dict = {}
    for a, b in edges:
        by_root.setdefault(uf.find(a), []).append((a, b))
    comps = [ContradictionComponent(tuple(sorted(m)), tuple(sorted(by_root[uf.find(m[0])])))
             for m in uf.groups()]
    comps.sort(key=lambda c: c.record_ids[0])
    return comps


def joined_conflicts(base: BeliefBase, atoms: Iterable[str] | None = None) -> list[ContradictionComponent]:
    """Components of the clash graph without the comparability filter."""
    return _components(joined_edges(base, atoms))


def resolve(base: BeliefBase, components: Iterable[ContradictionComponent],
            predicate: Callable[[Literal, Literal], bool] = contradict,
            kernels=None, relation: str = "comparable") -> ResolutionReport:
    """Remove lower-weight endpoints edge by edge until no clash is left.

    Edges are re-enumerated from the live members and visited in ascending
    ``(min id, max id)`` order. For an edge with both ends live the strictly
    lighter record goes; on a weight tie the later insertion (larger id) goes.
    One ordered pass leaves every edge with a dead endpoint.

    ``relation`` picks the edge set: ``"comparable"`` for decomposition
    components, ``"joined"`` for :func:`joined_conflicts` components.
    """
    if relation not in ("comparable", "joined"):
        raise ValueError(f"unknown relation {relation!r}")
    k = kernels or _kernels.active
    components = list(components)
    for comp in components:
        for rid in comp.record_ids:
            if not base.is_live(rid):
                raise StaleComponents(f"record {rid} is not a live record of this base")

    report = ResolutionReport()
    for comp in components:
        groups: dict[Literal, list[int]] = {}
        for rid in comp.record_ids:
            groups.setdefault(base.record(rid).literal, []).append(rid)
        lits = sorted(groups)
        edges = []
        for i, la in enumerate(lits):
            for lb in lits[i + 1:]:
                if predicate(la, lb):
                    if relation == "comparable":
                        edges.extend(_edges_between(base, groups[la], groups[lb], k))
                    else:
                        edges.extend(_joined_pairs(base, groups[la], groups[lb]))
        edges.sort()
        dead: set[int] = set()
        for a, b in edges:
            if a in dead or b in dead:
                continue
            wa, wb = base.record(a).weight, base.record(b).weight
            loser = b if wa > wb else a if wb > wa else max(a, b)
            dead.add(loser)
            report.removed.append(loser)
        base.remove(sorted(dead))
        report.survivors.append([r for r in comp.record_ids if r not in dead])
    return report
