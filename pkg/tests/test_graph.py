from itertools import product
from math import comb, factorial

import numpy as np
import pytest

from bisem.core import direct_sum, is_isomorphic, verify_inverse_semigroup
from bisem.boolean import check_bis
from bisem.graph import (DirectedGraph, GraphHasCycle, GraphISElement, GraphPath, all_paths,
                         check_against_words, check_graph_relations, concat, gis_multiply,
                         graph_inverse_semigroup, graph_monoid, path_count_matrix, reduce_word,
                         strip_suffix, tight_booleanization, verify_graph_theorem)
from bisem.typemonoid import decide_equal

from conftest import GRAPHS, sym

SMALL = ["isolated", "edge", "fork", "chain", "double", "two_sources", "triple_fork"]


def rook_count(n):
    return sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))


def brute_paths(G, max_len=6):
    """Edge sequences e_n ... e_1 with s(e_{i+1}) = r(e_i), found by trying every word."""
    out = [(v, v) for v in range(G.num_vertices)]
    m = len(G.edges)
    for length in range(1, max_len + 1):
        for word in product(range(m), repeat=length):
            # word[0] is traversed last
            if all(G.smap[word[i]] == G.rmap[word[i + 1]] for i in range(length - 1)):
                out.append((G.smap[word[-1]], G.rmap[word[0]]))
    return out


@pytest.mark.parametrize("name", list(GRAPHS))
def test_path_counts_match_brute_force(name):
    G = GRAPHS[name]()
    N = path_count_matrix(G)
    want = np.zeros_like(N)
    for s, r in brute_paths(G):
        want[s, r] += 1
    assert np.array_equal(N, want)
    assert len(all_paths(G)) == N.sum()


def test_double_edge_counts_two():
    G = GRAPHS["double"]()
    assert path_count_matrix(G)[0, 1] == 2
    assert graph_monoid(G).normal_form == {0: (2,), 1: (1,)}


@pytest.mark.parametrize("name,size", [("isolated", 2), ("edge", 6), ("fork", 10), ("chain", 15),
                                       ("double", 11), ("diamond", 35)])
def test_gis_sizes(name, size):
    # [DERIVED] one zero plus pairs of paths with a common range
    G = GRAPHS[name]()
    N = path_count_matrix(G)
    assert 1 + int((N.sum(axis=0) ** 2).sum()) == size
    assert graph_inverse_semigroup(G).semigroup.size == size


@pytest.mark.parametrize("name", SMALL)
def test_gis_is_inverse_and_satisfies_relations(name):
    I = graph_inverse_semigroup(GRAPHS[name]())
    assert verify_inverse_semigroup(I.semigroup) == []
    report = check_graph_relations(I)
    assert all(report.values()), report


@pytest.mark.parametrize("name", SMALL)
def test_gis_matches_word_rewriting(name):
    assert check_against_words(graph_inverse_semigroup(GRAPHS[name]()))


def test_reduce_word_rules():
    G = GRAPHS["fork"]()
    e1, e2 = 0, 1
    assert reduce_word(G, [("e", e1), ("*", e1)]) == (("v", 1),)
    assert reduce_word(G, [("e", e1), ("*", e2)]) is None
    assert reduce_word(G, [("*", e1), ("e", e1)]) == (("*", e1), ("e", e1))
    assert reduce_word(G, [("v", 0), ("*", e1)]) == (("*", e1),)
    assert reduce_word(G, [("v", 1), ("*", e1)]) is None


def test_multiplication_by_hand():
    G = GRAPHS["chain"]()
    e, f = 0, 1
    pe, pf = GraphPath.edge(G, e), GraphPath.edge(G, f)
    fe = concat(pf, pe)
    assert fe.label(G) == "f.e" and pe.then(pf) == fe
    w = GraphPath.vertex(2)
    assert strip_suffix(fe, pe) == pf and strip_suffix(pe, fe) is None
    # (w* f)(u* e) = w* f e
    u = GraphPath.vertex(1)
    got = gis_multiply(GraphISElement(w, pf), GraphISElement(u, pe))
    assert got == GraphISElement(w, fe)
    # f* f is idempotent, and (f* w)(w* f) = f* f
    ff = GraphISElement(pf, pf)
    assert gis_multiply(ff, ff) == ff
    assert gis_multiply(GraphISElement(pf, w), GraphISElement(w, pf)) == ff
    assert gis_multiply(GraphISElement(w, pf), GraphISElement(w, pf)).is_zero
    with pytest.raises(ValueError):
        GraphISElement(pe, pf)


def test_cycles_are_rejected():
    loop = DirectedGraph.from_edges(["v"], [("e", "v", "v")])
    assert not loop.is_acyclic
    for fn in (all_paths, graph_inverse_semigroup, tight_booleanization, verify_graph_theorem,
               path_count_matrix):
        with pytest.raises(GraphHasCycle):
            fn(loop)


def test_graph_monoid_with_loop():
    # a_v = a_v + a_w: v absorbs w
    G = DirectedGraph.from_edges(["v", "w"], [("e", "v", "v"), ("f", "v", "w")])
    gm = graph_monoid(G)
    assert gm.normal_form is None
    assert decide_equal(gm.presentation, (1, 0), (1, 3)).equal


@pytest.mark.parametrize("name", list(GRAPHS))
def test_tight_sizes(name):
    # [DERIVED] product over sinks of |I_n| with n the number of paths into the sink
    G = GRAPHS[name]()
    N = path_count_matrix(G)
    want = int(np.prod([rook_count(int(N[:, w].sum())) for w in G.sinks]))
    T = tight_booleanization(G)
    assert T.B.base.size == want
    assert check_bis(T.B.base)


def test_tight_isomorphism_types():
    assert is_isomorphic(tight_booleanization(GRAPHS["fork"]()).B.base, direct_sum(sym(2), sym(2)))
    assert is_isomorphic(tight_booleanization(GRAPHS["chain"]()).B.base, sym(3))
    assert is_isomorphic(tight_booleanization(GRAPHS["edge"]()).B.base, sym(2))


def test_normal_form_agrees_with_word_problem():
    G = GRAPHS["diamond"]()
    gm = graph_monoid(G)
    n = G.num_vertices
    for u, v in product(range(n), repeat=2):
        a = tuple(int(i == u) for i in range(n))
        b = tuple(int(i == v) for i in range(n))
        assert decide_equal(gm.presentation, a, b).equal == (gm.normal_form[u] == gm.normal_form[v])


@pytest.mark.parametrize("name", list(GRAPHS))
def test_graph_theorem(name):
    G = GRAPHS[name]()
    report = verify_graph_theorem(G)
    assert report, report.checks
    assert report.rank == len(G.sinks)


@pytest.mark.parametrize("name,summary", [
    ("isolated", "VERIFIED (ℕ₀)"), ("fork", "VERIFIED (ℕ₀², a_v ↦ (1,1))"),
    ("double", "VERIFIED (ℕ₀, a_v ↦ (2))"), ("chain", "VERIFIED (ℕ₀, a_v ↦ (1), a_u ↦ (1))"),
])
def test_theorem_summaries(name, summary):
    assert verify_graph_theorem(GRAPHS[name]()).summary() == summary
