import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from osl.belief_base import BeliefBase, Literal
from osl.contradiction import (UnionFind, contradict, contradict_exhaustive, contradiction_edges,
                               evaluate, formula_atoms, joined_conflicts, mcc, resolve)
from osl.errors import StaleComponents
from osl.generators import chain_spec, diamond_spec
from osl.oracle import mcc_brute, mcc_pairs_loop
from osl.product import build_carrier

from conftest import random_carrier, random_stream

P, NP, NQ = Literal("p"), Literal("p", True), Literal("q", True)


def test_contradict_literals():
    assert contradict(P, NP) and contradict(NP, P)
    assert not contradict(P, P)
    assert not contradict(P, NQ)


@pytest.mark.parametrize("f1, f2, expect", [
    ("p", ("not", "p"), True),
    (("and", "p", "q"), ("or", ("not", "p"), ("not", "q")), True),
    (("implies", "p", "q"), ("and", "p", ("not", "q")), True),
    ("p", "q", False),
    (("or", "p", "q"), ("not", "p"), False),
    (P, NP, True),
])
def test_contradict_exhaustive(f1, f2, expect):
    assert contradict_exhaustive(f1, f2) is expect


def test_formula_helpers():
    f = ("implies", ("and", "a", "b"), ("not", "c"))
    assert formula_atoms(f) == {"a", "b", "c"}
    assert evaluate(f, {"a": True, "b": True, "c": False})
    assert not evaluate(f, {"a": True, "b": True, "c": True})


def test_union_find():
    uf = UnionFind(range(5))
    assert uf.union(0, 1) and uf.union(3, 4) and not uf.union(1, 0)
    uf.union(1, 4)
    assert sorted(sorted(g) for g in uf.groups()) == [[0, 1, 3, 4], [2]]


def _base(carrier, items):
    base = BeliefBase(carrier)
    for lit, node, w in items:
        base.insert_raw(lit, node, w)
    return base


def test_bottom_top_pair_any_carrier(sally_carrier):
    c = sally_carrier
    base = _base(c, [(P, c.bottom, 0.9), (NP, c.top, 0.4)])
    comps = mcc(base)
    assert [comp.record_ids for comp in comps] == [(0, 1)]
    rep = resolve(base, comps)
    assert rep.removed == [1]
    assert mcc(base) == []


def test_incomparable_pair_has_no_edge():
    c = build_carrier(diamond_spec(2), chain_spec(1))
    e1, e2 = c.node(c.observers.index_of("a0"), 0), c.node(c.observers.index_of("a1"), 0)
    assert mcc(_base(c, [(P, e1, 0.5), (NP, e2, 0.5)])) == []


def test_chain_of_three():
    c = build_carrier(chain_spec(3), chain_spec(3))
    base = _base(c, [(P, c.bottom, 0.9), (NP, c.node(1, 1), 0.5), (P, c.top, 0.2)])
    comps = mcc(base)
    assert len(comps) == 1
    assert comps[0].record_ids == (0, 1, 2)
    assert comps[0].edges == ((0, 1), (1, 2))
    rep = resolve(base, comps)
    assert rep.removed == [1] and rep.survivors == [[0, 2]]


def test_tie_rule_later_record_loses():
    c = build_carrier(chain_spec(2), chain_spec(2))
    base = BeliefBase(c)
    for i in range(8):
        base.insert_raw(Literal(f"x{i}"), 0, 0.5)
    base.remove(range(8))
    base.insert_raw(Literal("x"), 0, 0.5)  # id 8
    ids = [base.insert_raw(Literal("p", neg), e, 0.5).id for neg, e in ((False, 0), (True, 3))]
    assert ids == [9, 10]
    rep = resolve(base, mcc(base))
    assert rep.removed == [10]


def test_stale_components_rejected():
    c = build_carrier(chain_spec(2), chain_spec(2))
    base = _base(c, [(P, 0, 0.9), (NP, 3, 0.4)])
    comps = mcc(base)
    resolve(base, comps)
    with pytest.raises(StaleComponents):
        resolve(base, comps)


def test_scoped_mcc():
    c = build_carrier(chain_spec(2), chain_spec(2))
    base = _base(c, [(P, 0, 0.9), (NP, 3, 0.4), (Literal("q"), 0, 0.3), (NQ, 1, 0.2)])
    assert [x.record_ids for x in mcc(base, atoms=["q"])] == [(2, 3)]
    assert len(mcc(base)) == 2
    assert contradiction_edges(base) == [(0, 1), (2, 3)]


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.5))
def test_mcc_matches_oracles(seed, neg_rate):
    rng = np.random.default_rng(seed)
    c = random_carrier(rng, max_nodes=100)
    base = _base(c, random_stream(rng, c, int(rng.integers(0, 60)), atoms=4, neg_rate=neg_rate))
    got = {frozenset(x.record_ids) for x in mcc(base)}
    assert got == set(mcc_brute(base.records(), c))
    assert got == set(mcc_pairs_loop(base.records(), c, contradict))


@given(st.integers(0, 2**32 - 1))
def test_mcc_ignores_insertion_order(seed):
    rng = np.random.default_rng(seed)
    c = random_carrier(rng, max_nodes=80)
    items = random_stream(rng, c, 40, atoms=3)
    perm = rng.permutation(len(items))
    a = _base(c, items)
    b = _base(c, [items[i] for i in perm])
    comps_a = {frozenset(x.record_ids) for x in mcc(a)}
    # map b's ids back to positions in the original stream
    comps_b = {frozenset(int(perm[i]) for i in x.record_ids) for x in mcc(b)}
    assert comps_a == comps_b


@given(st.integers(0, 2**32 - 1))
def test_resolution_leaves_no_edges(seed):
    rng = np.random.default_rng(seed)
    c = random_carrier(rng, max_nodes=100)
    base = _base(c, random_stream(rng, c, int(rng.integers(2, 80)), atoms=3, neg_rate=0.5))
    comps = mcc(base)
    live_before = len(base)
    rep = resolve(base, comps)
    assert mcc(base) == [] and mcc_brute(base.records(), c) == []
    assert len(base) == live_before - len(rep.removed)
    assert len(rep.removed) <= sum(len(x) for x in comps)
    # no component is emptied: each keeps its heaviest record
    for comp, surv in zip(comps, rep.survivors):
        assert surv
        best = max(base.record(r).weight for r in comp.record_ids)
        assert any(base.record(r).weight == best for r in surv)


def test_joined_conflicts_ignore_comparability():
    c = build_carrier(diamond_spec(2), chain_spec(1))
    e1, e2 = c.node(c.observers.index_of("a0"), 0), c.node(c.observers.index_of("a1"), 0)
    base = _base(c, [(P, e1, 0.5), (NP, e2, 0.5), (NP, e2, 0.0)])
    assert mcc(base) == []
    comps = joined_conflicts(base)
    assert [x.record_ids for x in comps] == [(0, 1)]
    rep = resolve(base, comps, relation="joined")
    assert rep.removed == [1]
    with pytest.raises(ValueError):
        resolve(base, [], relation="other")
