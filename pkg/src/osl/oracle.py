"""Brute-force reference implementations for tests and acceptance runs.

Nothing in the engine imports this module. Every function here is a direct
transcription of a definition (max over eligible records, enumerate all
bounds, all pairs, all assignments) and avoids the engine's tables, caches,
indexes and kernels; only component order matrices are shared.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import CycleDetected, DuplicateLabel, NoUniqueBound, NotALattice, PosetSpecError
from .manager import SatReport


def _order_matrix(order) -> np.ndarray:
    if hasattr(order, "leq_matrix"):
        return np.asarray(order.leq_matrix, dtype=np.bool_)
    return np.asarray(order, dtype=np.bool_)


def product_order(carrier) -> np.ndarray:
    """Full n x n product order, built straight from the componentwise definition."""
    lo = carrier.observers.leq_matrix
    ls = carrier.situations.leq_matrix
    n_sit = carrier.n_sit
    out = np.zeros((carrier.n, carrier.n), dtype=np.bool_)
    for e1 in range(carrier.n):
        o1, s1 = divmod(e1, n_sit)
        for o2 in range(carrier.n_obs):
            if lo[o1, o2]:
                out[e1, o2 * n_sit:(o2 + 1) * n_sit] = ls[s1]
    return out


def _below(carrier, e1, e2) -> bool:
    n_sit = carrier.n_sit
    o1, s1 = divmod(e1, n_sit)
    o2, s2 = divmod(e2, n_sit)
    return bool(carrier.observers.leq_matrix[o1, o2] and carrier.situations.leq_matrix[s1, s2])


# -- credibility ----------------------------------------------------------------

def cred_brute(records: Iterable, carrier, literal, node: int) -> float:
    """Max weight over records of ``literal`` placed below ``node``; 0 if none."""
    best = 0.0
    for r in records:
        if r.literal == literal and _below(carrier, r.node, node) and r.weight > best:
            best = r.weight
    return best


def cred_table_brute(records: Sequence, carrier) -> dict:
    """``cred_brute`` at every (literal, node), computed all at once.

    Returns literal -> length-n row, with rows only for literals whose
    credibility is positive somewhere.
    """
    groups: dict = {}
    for r in records:
        groups.setdefault(r.literal, []).append(r)
    lo = carrier.observers.leq_matrix
    ls = carrier.situations.leq_matrix
    obs_of = np.repeat(np.arange(carrier.n_obs), carrier.n_sit)
    sit_of = np.tile(np.arange(carrier.n_sit), carrier.n_obs)
    out = {}
    for lit, recs in groups.items():
        nodes = np.array([r.node for r in recs])
        w = np.array([r.weight for r in recs], dtype=np.float64)
        ro, rs = nodes // carrier.n_sit, nodes % carrier.n_sit
        eligible = lo[ro][:, obs_of] & ls[rs][:, sit_of]
        row = np.where(eligible, w[:, None], 0.0).max(axis=0)
        if row.any():
            out[lit] = row
    return out


# -- bounds ---------------------------------------------------------------------

def bounds_brute(order, subset: Iterable[int]) -> tuple[int, int]:
    """(lub, glb) of ``subset`` by enumerating every upper and lower bound.

    ``order`` is a lattice object or an n x n boolean order matrix. Raises
    NotALattice with the minimal upper (maximal lower) bounds as evidence
    when either bound is not unique. The empty set yields (bottom, top).
    """
    leq = _order_matrix(order)
    n = leq.shape[0]
    s = list(subset)
    ub = leq[s].all(axis=0) if s else np.ones(n, dtype=np.bool_)
    lb = leq[:, s].all(axis=1) if s else np.ones(n, dtype=np.bool_)
    # u is least iff it is below every upper bound
    least = np.flatnonzero(ub & leq[:, ub].all(axis=1))
    greatest = np.flatnonzero(lb & leq[lb].all(axis=0))
    if least.size != 1:
        strict = leq & ~np.eye(n, dtype=np.bool_)
        minimal = [int(u) for u in np.flatnonzero(ub) if not (strict[:, u] & ub).any()]
        raise NotALattice(tuple(s), "join", minimal)
    if greatest.size != 1:
        strict = leq & ~np.eye(n, dtype=np.bool_)
        maximal = [int(u) for u in np.flatnonzero(lb) if not (strict[u] & lb).any()]
        raise NotALattice(tuple(s), "meet", maximal)
    return int(least[0]), int(greatest[0])


def closure_brute(n: int, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    """Reflexive-transitive closure by repeated relational squaring."""
    r = np.eye(n, dtype=np.bool_)
    for a, b in pairs:
        r[a, b] = True
    while True:
        nxt = r | ((r.astype(np.int64) @ r.astype(np.int64)) > 0)
        if (nxt == r).all():
            return r
        r = nxt


def validate_poset_brute(spec) -> type | None:
    """Error class a correct validator must raise for ``spec``, or None.

    Mirrors the documented check order: labels, cycles, unique bottom/top,
    then every pair's bounds.
    """
    seen = set()
    for lab in spec.elements:
        if not isinstance(lab, str) or not lab:
            return PosetSpecError
        if lab in seen:
            return DuplicateLabel
        seen.add(lab)
    idx = {lab: i for i, lab in enumerate(spec.elements)}
    pairs = []
    for a, b in spec.covers:
        if a not in idx or b not in idx:
            return PosetSpecError
        if a == b:
            return CycleDetected
        pairs.append((idx[a], idx[b]))
    n = len(spec.elements)
    r = closure_brute(n, pairs)
    for a in range(n):
        for b in range(n):
            if a != b and r[a, b] and r[b, a]:
                return CycleDetected
    if sum(1 for x in range(n) if r[x].all()) != 1:
        return NoUniqueBound
    if sum(1 for x in range(n) if r[:, x].all()) != 1:
        return NoUniqueBound
    for a in range(n):
        for b in range(a + 1, n):
            try:
                bounds_brute(r, (a, b))
            except NotALattice:
                return NotALattice
    return None


# -- contradiction components -----------------------------------------------------

def mcc_brute(records: Sequence, carrier) -> list[frozenset[int]]:
    """Every pair of records, then breadth-first components; singletons dropped.

    The pairwise test is evaluated on full b x b matrices rather than a Python
    double loop, but it still inspects every pair and uses no literal index.
    """
    b = len(records)
    if b < 2:
        return []
    ids = [r.id for r in records]
    nodes = np.array([r.node for r in records])
    atoms = np.array([r.literal.atom for r in records], dtype=object)
    neg = np.array([r.literal.negated for r in records])
    lo = carrier.observers.leq_matrix
    ls = carrier.situations.leq_matrix
    o, s = nodes // carrier.n_sit, nodes % carrier.n_sit
    below = lo[o][:, o] & ls[s][:, s]
    comparable = below | below.T
    _, atom_code = np.unique(atoms.astype(str), return_inverse=True)
    clash = (atom_code[:, None] == atom_code[None, :]) & (neg[:, None] != neg[None, :])
    adj = comparable & clash
    seen = [False] * b
    comps = []
    for start in range(b):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        members = []
        while queue:
            v = queue.popleft()
            members.append(ids[v])
            for u in np.flatnonzero(adj[v]):
                if not seen[u]:
                    seen[u] = True
                    queue.append(int(u))
        if len(members) > 1:
            comps.append(frozenset(members))
    return comps


def mcc_pairs_loop(records: Sequence, carrier, predicate) -> list[frozenset[int]]:
    """Literal double loop over record pairs; for small bases and odd predicates."""
    adj: dict[int, set[int]] = {r.id: set() for r in records}
    for r1, r2 in itertools.combinations(records, 2):
        if (_below(carrier, r1.node, r2.node) or _below(carrier, r2.node, r1.node)) \
                and predicate(r1.literal, r2.literal):
            adj[r1.id].add(r2.id)
            adj[r2.id].add(r1.id)
    seen: set[int] = set()
    comps = []
    for start in adj:
        if start in seen:
            continue
        stack, members = [start], set()
        while stack:
            v = stack.pop()
            if v in members:
                continue
            members.add(v)
            stack.extend(adj[v] - members)
        seen |= members
        if len(members) > 1:
            comps.append(frozenset(members))
    return comps


# -- satisfiability -----------------------------------------------------------------

def sat_brute(theory: Iterable) -> SatReport:
    """Try all 2^k assignments of the theory's atoms (k <= 20)."""
    theory = list(theory)
    atoms = sorted({lit.atom for lit in theory})
    if len(atoms) > 20:
        raise ValueError("sat_brute handles at most 20 atoms")
    for bits in itertools.product((False, True), repeat=len(atoms)):
        env = dict(zip(atoms, bits))
        if all(env[lit.atom] != lit.negated for lit in theory):
            return SatReport(True, env, None)
    clashing = sorted({l.atom for l in theory if any(m.atom == l.atom and m.negated != l.negated
                                                      for m in theory)})
    return SatReport(False, {}, clashing[0] if clashing else None)
