"""Component-lattice generators for benchmarks, scenarios and tests."""

from __future__ import annotations

import math

import numpy as np

from .errors import UnknownShape
from .poset import PosetSpec

SHAPES = ("chain", "grid")


def chain_spec(n: int, prefix: str = "c") -> PosetSpec:
    return PosetSpec.chain([f"{prefix}{i}" for i in range(n)])


def grid_spec(n: int, prefix: str = "g") -> PosetSpec:
    """An ``n``-element lattice made from a near-square grid.

    Takes a staircase-shaped down-set of ``n - 1`` grid points (closed under
    componentwise min) and puts a fresh top over it, so joins that leave the
    down-set land on the top.
    """
    if n <= 2:
        return chain_spec(n, prefix)
    m = n - 1
    width = max(1, math.isqrt(m))
    cells = [(i // width, i % width) for i in range(m)]
    labels = [f"{prefix}{r}_{c}" for r, c in cells]
    present = set(cells)
    covers = []
    for (r, c), lab in zip(cells, labels):
        if (r + 1, c) in present:
            covers.append((lab, f"{prefix}{r + 1}_{c}"))
        if (r, c + 1) in present:
            covers.append((lab, f"{prefix}{r}_{c + 1}"))
    top = f"{prefix}top"
    for (r, c), lab in zip(cells, labels):
        if (r + 1, c) not in present and (r, c + 1) not in present:
            covers.append((lab, top))
    return PosetSpec(tuple(labels) + (top,), tuple(covers))


def component_spec(n: int, shape: str = "chain", prefix: str = "c") -> PosetSpec:
    if shape == "chain":
        return chain_spec(n, prefix)
    if shape == "grid":
        return grid_spec(n, prefix)
    raise UnknownShape(f"unknown component shape {shape!r}; expected one of {SHAPES}")


def diamond_spec(k: int = 2, prefix: str = "") -> PosetSpec:
    """Bottom, ``k`` pairwise incomparable atoms, top."""
    bot, top = f"{prefix}bot", f"{prefix}top"
    atoms = [f"{prefix}a{i}" for i in range(k)]
    covers = [(bot, a) for a in atoms] + [(a, top) for a in atoms]
    return PosetSpec((bot, *atoms, top), tuple(covers))


def bowtie_spec() -> PosetSpec:
    """Bounded poset where {a, b} has two minimal upper bounds: not a lattice."""
    return PosetSpec(("bot", "a", "b", "c", "d", "top"),
                     (("bot", "a"), ("bot", "b"), ("a", "c"), ("a", "d"),
                      ("b", "c"), ("b", "d"), ("c", "top"), ("d", "top")))


def boolean_spec(k: int, prefix: str = "s") -> PosetSpec:
    labels = [f"{prefix}{m:0{k}b}" if k else f"{prefix}" for m in range(2 ** k)]
    covers = [(labels[m], labels[m | (1 << i)]) for m in range(2 ** k) for i in range(k)
              if not m & (1 << i)]
    return PosetSpec(tuple(labels), tuple(covers))


def random_lattice_spec(rng: np.random.Generator, max_size: int, ground: int | None = None,
                        prefix: str = "x") -> PosetSpec:
    """Random closure system (intersection-closed family with the full set).

    The family ordered by inclusion is a lattice with meet = intersection.
    Order pairs are emitted in full (not reduced to covers) and in shuffled
    element order.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    if ground is None:
        ground = int(rng.integers(1, 8))
    full = (1 << ground) - 1
    family = {full}
    target = int(rng.integers(1, max_size + 1))
    for _ in range(8 * target + 8):
        if len(family) >= target:
            break
        s = int(rng.integers(0, full + 1))
        grown = set(family)
        frontier = {s}
        while frontier:
            x = frontier.pop()
            if x in grown:
                continue
            grown.add(x)
            frontier.update(x & f for f in grown if (x & f) not in grown)
        if len(grown) <= max_size:
            family = grown
    members = sorted(family)
    order = rng.permutation(len(members))
    members = [members[i] for i in order]
    labels = [f"{prefix}{m:0{ground}b}" for m in members]
    pairs = [(labels[i], labels[j]) for i, a in enumerate(members) for j, b in enumerate(members)
             if a != b and a & b == a]
    return PosetSpec(tuple(labels), tuple(pairs))
