import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from osl import _kernels
from osl.belief_base import BeliefBase, Literal
from osl.oracle import cred_table_brute
from osl.propagation import credibility_row, full_sweep, rbp_insert

from conftest import random_carrier, random_stream

P = Literal("p")
BACKENDS = [k for k in (_kernels.numba_kernels, _kernels.numpy_kernels) if k is not None]


def test_insert_at_top(chain_carrier_3x3):
    base = BeliefBase(chain_carrier_3x3)
    aff = rbp_insert(base, P, chain_carrier_3x3.top, 0.7)
    assert aff.nodes == (chain_carrier_3x3.top,) and aff.visited == 1


def test_insert_dominated_is_noop(chain_carrier_3x3):
    c = chain_carrier_3x3
    base = BeliefBase(c)
    rbp_insert(base, P, c.bottom, 0.9)
    aff = rbp_insert(base, P, c.node(1, 1), 0.2)
    assert aff.nodes == () and aff.visited == 4


def test_insert_at_bottom_reaches_everything(chain_carrier_3x3):
    base = BeliefBase(chain_carrier_3x3)
    aff = rbp_insert(base, P, 0, 0.9)
    assert aff.nodes == tuple(range(9)) and aff.visited == 9


def test_zero_weight_leaves_no_row(chain_carrier_3x3):
    base = BeliefBase(chain_carrier_3x3)
    aff = rbp_insert(base, P, 0, 0.0)
    assert aff.nodes == () and P not in base.cache.rows


def test_notify_sees_every_change(chain_carrier_3x3):
    seen = []
    base = BeliefBase(chain_carrier_3x3)
    rbp_insert(base, P, 4, 0.5, notify=lambda lit, e, w: seen.append((lit, e, w)))
    assert seen == [(P, e, 0.5) for e in (4, 5, 7, 8)]


def test_full_sweep_empty(chain_carrier_3x3):
    rep = full_sweep(BeliefBase(chain_carrier_3x3), from_zero=True)
    assert rep.iterations == 1 and rep.deltas == [0.0]


def test_full_sweep_two_records(chain_carrier_3x3):
    c = chain_carrier_3x3
    base = BeliefBase(c)
    base.insert_raw(P, c.bottom, 0.3)
    base.insert_raw(P, c.node(1, 1), 0.8)
    rep = full_sweep(base, from_zero=True)
    assert rep.iterations == 2 and rep.deltas[0] > 0 and rep.deltas[1] == 0
    truth = cred_table_brute(base.records(), c)[P]
    assert (base.cache.row(P) == truth).all()
    again = full_sweep(base)
    assert again.iterations == 1 and again.deltas == [0.0]


def test_full_sweep_argument_checks(chain_carrier_3x3):
    base = BeliefBase(chain_carrier_3x3)
    with pytest.raises(ValueError):
        full_sweep(base, epsilon=0)
    with pytest.raises(ValueError):
        full_sweep(base, max_iterations=0)


@given(st.integers(0, 2**32 - 1))
def test_frame_and_exactness(seed):
    rng = np.random.default_rng(seed)
    c = random_carrier(rng, max_nodes=150)
    base = BeliefBase(c)
    for lit, node, w in random_stream(rng, c, int(rng.integers(1, 40)), atoms=3):
        before = base.cache.snapshot()
        aff = rbp_insert(base, lit, node, w)
        up = c.upward_closure(node)
        assert aff.visited == up.size
        after = base.cache.snapshot()
        for other in set(before) | set(after):
            old = before.get(other, np.zeros(c.n))
            new = after.get(other, np.zeros(c.n))
            if other != lit:
                assert (old == new).all()
                continue
            outside = np.ones(c.n, dtype=bool)
            outside[up] = False
            assert (old[outside] == new[outside]).all()
            assert (new[up] == np.maximum(old[up], w)).all()
            changed = np.flatnonzero(new != old)
            assert tuple(changed.tolist()) == aff.nodes


@given(st.integers(0, 2**32 - 1))
def test_sweep_rebuilds_oracle_table(seed):
    rng = np.random.default_rng(seed)
    c = random_carrier(rng, max_nodes=150)
    base = BeliefBase(c)
    for lit, node, w in random_stream(rng, c, int(rng.integers(1, 60)), atoms=4):
        base.insert_raw(lit, node, w)
    rep = full_sweep(base, from_zero=True)
    truth = cred_table_brute(base.records(), c)
    assert rep.iterations == (2 if truth else 1)
    assert set(base.cache.rows) == set(truth)
    for lit, row in truth.items():
        assert (base.cache.row(lit) == row).all()
        assert (credibility_row(base, lit) == row).all()


@pytest.mark.skipif(len(BACKENDS) < 2, reason="numba unavailable")
@given(st.integers(0, 2**32 - 1))
def test_backends_give_identical_updates(seed):
    rng = np.random.default_rng(seed)
    c = random_carrier(rng, max_nodes=200)
    stream = random_stream(rng, c, 50, atoms=3)
    outs = []
    for k in BACKENDS:
        base = BeliefBase(c)
        reports = [rbp_insert(base, lit, node, w, kernels=k) for lit, node, w in stream]
        outs.append(([(r.nodes, r.visited) for r in reports],
                     {l: r.tolist() for l, r in base.cache.rows.items()}))
    assert outs[0] == outs[1]


@pytest.mark.skipif(len(BACKENDS) < 2, reason="numba unavailable")
def test_comparable_pairs_backends_agree(rng):
    c = random_carrier(rng, max_nodes=300)
    a, b = rng.integers(0, c.n, 80), rng.integers(0, c.n, 60)
    args = (a // c.n_sit, a % c.n_sit, b // c.n_sit, b % c.n_sit,
            c.observers.leq_matrix, c.situations.leq_matrix)
    res = [k.comparable_pairs(*args) for k in BACKENDS]
    pairs = [sorted(zip(ia.tolist(), ib.tolist())) for ia, ib in res]
    assert pairs[0] == pairs[1]
    expect = sorted((i, j) for i in range(80) for j in range(60)
                    if c.comparable(int(a[i]), int(b[j])))
    assert pairs[0] == expect


def test_backend_flag(monkeypatch):
    for v in ("0", "false", "no", "off"):
        monkeypatch.setenv("OSL_NUMBA", v)
        assert not _kernels._numba_requested()
    monkeypatch.setenv("OSL_NUMBA", "1")
    assert _kernels._numba_requested()
    assert _kernels.BACKEND in ("numba", "numpy")
