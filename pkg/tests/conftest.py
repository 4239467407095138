import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from osl.belief_base import Literal
from osl.generators import boolean_spec, chain_spec, diamond_spec, grid_spec, random_lattice_spec
from osl.poset import PosetSpec
from osl.product import build_carrier

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_component(rng, max_size, prefix):
    kind = rng.integers(0, 4)
    if kind == 0:
        return chain_spec(int(rng.integers(1, max_size + 1)), prefix)
    if kind == 1:
        return grid_spec(int(rng.integers(1, max_size + 1)), prefix)
    if kind == 2 and max_size >= 4:
        k = int(min(3, np.log2(max_size)))
        return boolean_spec(int(rng.integers(1, k + 1)), prefix)
    return random_lattice_spec(rng, max_size, prefix=prefix)


def random_carrier(rng, max_nodes=400):
    a = int(rng.integers(1, min(max_nodes, 40) + 1))
    obs = random_component(rng, a, "o")
    n_obs = len(obs.elements)
    sit = random_component(rng, max(1, max_nodes // n_obs), "s")
    return build_carrier(obs, sit)


def random_stream(rng, carrier, count, atoms=5, neg_rate=0.35, tie_rate=0.1):
    """(literal, node, weight) triples; some weights are drawn from a coarse grid to force ties."""
    out = []
    for _ in range(count):
        lit = Literal(f"a{int(rng.integers(0, atoms))}", bool(rng.random() < neg_rate))
        node = int(rng.integers(0, carrier.n))
        if rng.random() < tie_rate:
            w = float(rng.integers(1, 5)) / 4
        else:
            w = float(rng.random())
        out.append((lit, node, w))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def diamond():
    return diamond_spec(2)


@pytest.fixture
def chain3():
    return PosetSpec.chain(["a", "b", "c"])


@pytest.fixture
def chain_carrier_3x3():
    return build_carrier(chain_spec(3, "o"), chain_spec(3, "s"))


@pytest.fixture
def sally_carrier():
    obs = PosetSpec(("Shared", "Sally", "Anne", "Reality"),
                    (("Shared", "Sally"), ("Shared", "Anne"), ("Sally", "Reality"), ("Anne", "Reality")))
    return build_carrier(obs, PosetSpec.chain(["t0", "t1"]))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one summary line; printed at the end of the run whatever the outcome."""
    def emit(criterion, ok, detail):
        line = f"[criterion {criterion:>2}] {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
