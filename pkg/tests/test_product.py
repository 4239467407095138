import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from osl.errors import IndexOutOfRange, PosetSpecError, UnknownLabel
from osl.generators import chain_spec, diamond_spec
from osl.oracle import bounds_brute, product_order
from osl.poset import PosetSpec
from osl.product import build_carrier, carrier_from_dict

from conftest import random_carrier


def test_sizes():
    assert build_carrier(chain_spec(3), chain_spec(3)).n == 9
    assert build_carrier(chain_spec(4), chain_spec(4)).n == 16
    one = build_carrier(chain_spec(1), chain_spec(1))
    assert one.n == 1 and one.bottom == one.top == 0


def test_row_major_ids(chain_carrier_3x3):
    c = chain_carrier_3x3
    assert c.node(1, 2) == 5
    assert c.split(5) == (1, 2)
    assert c.labels_of(5) == ("o1", "s2")
    assert c.node_of("o2", "s0") == 6


def test_two_by_two_order():
    c = build_carrier(chain_spec(2, "o"), chain_spec(2, "s"))
    assert c.leq(c.node(0, 0), c.node(0, 1))
    assert c.leq(c.node(0, 0), c.node(1, 1))
    assert set(c.upward_closure(c.bottom).tolist()) == {0, 1, 2, 3}


def test_incomparable_across_diamonds():
    c = build_carrier(diamond_spec(2), diamond_spec(2))
    a0, a1 = c.observers.index_of("a0"), c.observers.index_of("a1")
    s0, s1 = c.situations.index_of("a0"), c.situations.index_of("a1")
    e1, e2 = c.node(a0, s1), c.node(a1, s0)
    assert not c.leq(e1, e2) and not c.leq(e2, e1)
    assert not c.comparable(e1, e2)
    assert c.comparable(c.bottom, e1) and c.comparable(e1, e1)


def test_join_meet_componentwise():
    c = build_carrier(diamond_spec(2), chain_spec(3))
    a0, a1 = c.observers.index_of("a0"), c.observers.index_of("a1")
    e1, e2 = c.node(a0, 0), c.node(a1, 2)
    assert c.join(e1, e2) == c.node(c.observers.top, 2)
    assert c.meet(e1, e2) == c.node(c.observers.bottom, 0)
    assert c.join_set([]) == c.bottom
    assert c.meet_set([]) == c.top
    assert c.join_set([e1, e2]) == c.join(e1, e2)


def test_upward_closure_extremes(chain_carrier_3x3):
    c = chain_carrier_3x3
    assert c.upward_closure(c.top).tolist() == [c.top]
    assert c.upward_closure(c.bottom).tolist() == list(range(9))
    assert c.upclosure_size(c.node(1, 1)) == 4


def test_errors(chain_carrier_3x3):
    c = chain_carrier_3x3
    with pytest.raises(IndexOutOfRange):
        c.leq(0, 9)
    with pytest.raises(IndexOutOfRange):
        c.upward_closure(-1)
    with pytest.raises(IndexOutOfRange):
        c.join_rows([[0, 99]])
    with pytest.raises(UnknownLabel):
        c.node_of("o0", "nope")
    with pytest.raises(PosetSpecError):
        carrier_from_dict({"observers": {"elements": ["a"]}})


def test_dict_roundtrip(sally_carrier):
    again = carrier_from_dict(sally_carrier.to_dict())
    assert again.n == sally_carrier.n
    assert again.observers.labels == sally_carrier.observers.labels
    assert (product_order(again) == product_order(sally_carrier)).all()


@given(st.integers(0, 2**32 - 1))
def test_closure_and_order_against_product_order(seed):
    c = random_carrier(np.random.default_rng(seed), max_nodes=120)
    order = product_order(c)
    for e in range(c.n):
        up = c.upward_closure(e)
        assert up.tolist() == np.flatnonzero(order[e]).tolist()  # ascending and exact
        o, s = c.split(e)
        assert up.size == len(c.observers.up_set(o)) * len(c.situations.up_set(s))
    for e1, e2 in itertools.product(range(c.n), repeat=2):
        if order[e1, e2]:
            assert set(c.upward_closure(e2).tolist()) <= set(c.upward_closure(e1).tolist())


@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_join_rows_match_oracle(seed, k):
    rng = np.random.default_rng(seed)
    c = random_carrier(rng, max_nodes=80)
    order = product_order(c)
    rows = rng.integers(0, c.n, size=(12, k))
    joins, meets = c.join_rows(rows), c.meet_rows(rows)
    for r, j, m in zip(rows.tolist(), joins.tolist(), meets.tolist()):
        assert (j, m) == bounds_brute(order, r)
        assert j == c.join_set(r) and m == c.meet_set(r)


def test_sally_lattice_has_shared_bottom(sally_carrier):
    obs = sally_carrier.observers
    assert obs.labels[obs.bottom] == "Shared"
    assert obs.labels[obs.top] == "Reality"
    sally, anne = obs.index_of("Sally"), obs.index_of("Anne")
    assert not obs.leq(sally, anne) and not obs.leq(anne, sally)


def test_chain_spec_labels():
    assert chain_spec(2, "x") == PosetSpec(("x0", "x1"), (("x0", "x1"),))
