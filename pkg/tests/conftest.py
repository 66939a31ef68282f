import functools

import pytest

from bisem.boolean import certify
from bisem.core import (boolean_algebra, chain_semilattice, cyclic_group, direct_sum, example_a,
                        group_with_zero, symmetric_inverse_semigroup)
from bisem.graph import DirectedGraph, fork, tight_booleanization
from bisem.structure import rook_semigroup


def sym(n):
    return symmetric_inverse_semigroup(n)[0]


def chain_graph():
    return DirectedGraph.from_edges(["v", "u", "w"], [("e", "v", "u"), ("f", "u", "w")])


GRAPHS = {
    "isolated": lambda: DirectedGraph.from_edges(["v"], []),
    "edge": lambda: DirectedGraph.from_edges(["v", "w"], [("e", "v", "w")]),
    "fork": fork,
    "chain": chain_graph,
    "double": lambda: DirectedGraph.from_edges(["v", "w"], [("e", "v", "w"), ("f", "v", "w")]),
    "diamond": lambda: DirectedGraph.from_edges(
        ["a", "b", "c", "d"], [("e1", "a", "b"), ("e2", "a", "c"), ("e3", "b", "d"), ("e4", "c", "d")]),
    "two_sources": lambda: DirectedGraph.from_edges(
        ["x", "y", "w1", "w2"], [("e", "x", "w1"), ("f", "y", "w1"), ("g", "y", "w2")]),
    "triple_fork": lambda: DirectedGraph.from_edges(
        ["v", "a", "b", "c"], [("e", "v", "a"), ("f", "v", "b"), ("g", "v", "c")]),
}


# name -> (builder, is Boolean)
CORPUS = {
    "I1": (lambda: sym(1), True),
    "I2": (lambda: sym(2), True),
    "I3": (lambda: sym(3), True),
    "I4": (lambda: sym(4), True),
    "2^1": (lambda: boolean_algebra(1), True),
    "2^2": (lambda: boolean_algebra(2), True),
    "2^3": (lambda: boolean_algebra(3), True),
    "Z2": (lambda: group_with_zero(cyclic_group(2)), True),
    "Z3": (lambda: group_with_zero(cyclic_group(3)), True),
    "ex_a": (example_a, False),
    "chain3": (lambda: chain_semilattice(3), False),
    "I2+Z2": (lambda: direct_sum(sym(2), group_with_zero(cyclic_group(2))), True),
    "M2(Z2)": (lambda: rook_semigroup(2, cyclic_group(2))[0].base, True),
    "fork_tight": (lambda: tight_booleanization(fork()).B.base, True),
    "chain_tight": (lambda: tight_booleanization(chain_graph()).B.base, True),
}

BOOLEAN_NAMES = [k for k, (_, ok) in CORPUS.items() if ok]
SMALL_BOOLEAN = [k for k in BOOLEAN_NAMES if k not in ("I4", "chain_tight", "fork_tight")]


@functools.lru_cache(maxsize=None)
def semigroup(name):
    return CORPUS[name][0]()


@functools.lru_cache(maxsize=None)
def bis(name):
    return certify(semigroup(name))


@pytest.fixture(params=list(CORPUS))
def corpus_name(request):
    return request.param


@pytest.fixture(params=BOOLEAN_NAMES)
def boolean_name(request):
    return request.param
