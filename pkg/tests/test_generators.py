import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from osl.errors import UnknownShape
from osl.generators import boolean_spec, component_spec, diamond_spec, grid_spec, random_lattice_spec
from osl.oracle import bounds_brute
from osl.poset import build_lattice


@pytest.mark.parametrize("n", [1, 2, 5, 17, 64])
@pytest.mark.parametrize("shape", ["chain", "grid"])
def test_component_sizes(shape, n):
    lat = build_lattice(component_spec(n, shape))
    assert lat.size == n


def test_unknown_shape():
    with pytest.raises(UnknownShape):
        component_spec(4, "tree")


def test_fixed_shapes():
    assert build_lattice(boolean_spec(3)).size == 8
    assert build_lattice(diamond_spec(3)).size == 5
    assert build_lattice(grid_spec(9)).size == 9


@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_random_lattice_is_a_lattice(seed, max_size):
    spec = random_lattice_spec(np.random.default_rng(seed), max_size)
    lat = build_lattice(spec)
    assert 1 <= lat.size <= max_size
    leq = lat.leq_matrix
    for a in range(lat.size):
        for b in range(a, lat.size):
            assert bounds_brute(leq, (a, b)) == (lat.join(a, b), lat.meet(a, b))
