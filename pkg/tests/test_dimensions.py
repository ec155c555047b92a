import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from samplecomp.core import FiniteClass
from samplecomp.dimensions import (
    ShatterWitness,
    graph_dimension,
    shatters,
    shatters_graph,
    verify_witness,
    vc_dimension,
)
from samplecomp.errors import PreconditionError

from conftest import random_class


def brute_vc(H):
    """Largest C shattered, by trying every subset of the domain."""
    best = 0
    for r in range(H.domain_size + 1):
        for C in itertools.combinations(range(H.domain_size), r):
            patterns = {tuple(h(x) for x in C) for h in H}
            if len(patterns) == 2**r:
                best = r
    return best


def brute_graph(H):
    """Graph dimension with f ranging over all of Y^C."""
    best = 0
    Y = range(len(H.labels))
    for r in range(1, H.domain_size + 1):
        for C in itertools.combinations(range(H.domain_size), r):
            for f in itertools.product(Y, repeat=r):
                patterns = {tuple(int(h(x) == fx) for x, fx in zip(C, f)) for h in H}
                if len(patterns) == 2**r:
                    best = max(best, r)
    return best


def test_full_cube():
    for n in range(1, 5):
        H = FiniteClass(n, [0, 1], itertools.product([0, 1], repeat=n))
        assert vc_dimension(H)[0] == n
        assert graph_dimension(H)[0] == n


def test_singletons_and_zero():
    for n in range(2, 6):
        tables = [tuple(int(x == i) for x in range(n)) for i in range(n)] + [(0,) * n]
        assert vc_dimension(FiniteClass(n, [0, 1], tables))[0] == 1


def test_thresholds(thresholds):
    d, w = vc_dimension(thresholds)
    assert d == 1 and verify_witness(thresholds, w)


def test_constant_functions_graph_dim_one():
    for n_points, n_labels in [(2, 2), (3, 3), (4, 5)]:
        H = FiniteClass(n_points, list(range(n_labels)), [(y,) * n_points for y in range(n_labels)])
        d, w = graph_dimension(H)
        assert d == 1 and verify_witness(H, w)


def test_single_hypothesis():
    H = FiniteClass(3, [0, 1, 2], [(0, 1, 2)])
    assert graph_dimension(H)[0] == 0
    assert vc_dimension(FiniteClass(3, [0, 1], [(0, 1, 1)]))[0] == 0


def test_vc_needs_binary():
    with pytest.raises(PreconditionError):
        vc_dimension(FiniteClass(1, [0, 1, 2], [(0,), (1,)]))


def test_shatters_graph_constant_pair():
    H = FiniteClass(2, [0, 1, 2], [(0, 0), (1, 1), (2, 2)])
    # agreeing with f on exactly one of two points is impossible for constants
    assert not any(shatters_graph(H, f, (0, 1)) for f in itertools.product(range(3), repeat=2))
    assert shatters_graph(H, (0,), (0,))
    assert shatters(FiniteClass(2, [0, 1], [(0, 0), (1, 0)]), (0,))


def test_witness_checker_catches_lies():
    H = FiniteClass(3, [0, 1], [(0, 0, 0), (1, 0, 0)])
    assert not verify_witness(H, ShatterWitness((0, 1)))
    assert verify_witness(H, ShatterWitness((0,)))


def test_multiclass_graph_vs_brute(rng):
    for _ in range(150):
        H = random_class(rng, int(rng.integers(1, 5)), 3, int(rng.integers(1, 10)))
        d, w = graph_dimension(H)
        assert d == brute_graph(H)
        assert verify_witness(H, w)
        assert 2**d <= len(H)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_binary_graph_equals_vc(n, seed):
    rng = np.random.default_rng(seed)
    H = random_class(rng, n, 2, int(rng.integers(1, 2**n + 1)))
    v, vw = vc_dimension(H)
    g, gw = graph_dimension(H)
    assert v == g == brute_vc(H)
    assert verify_witness(H, vw) and verify_witness(H, gw)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_monotone_under_adding_and_restricting(seed):
    rng = np.random.default_rng(seed)
    H = random_class(rng, 5, 3, 8)
    extra = FiniteClass(5, H.labels, list(H) + [tuple(rng.integers(0, 3, size=5))])
    assert graph_dimension(extra)[0] >= graph_dimension(H)[0]
    restricted = FiniteClass(4, H.labels, [h.table[:4] for h in H])
    assert graph_dimension(restricted)[0] <= graph_dimension(H)[0]
