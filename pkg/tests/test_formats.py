import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bisem.core import FiniteInverseSemigroup, PartialPermutation, example_a
from bisem.formats import (ParseError, detect_format, dump_cayley, dump_congruence, dump_generators,
                           dump_graph, dump_presentation, parse_cayley, parse_congruence,
                           parse_generators, parse_graph, parse_presentation)
from bisem.graph import DirectedGraph
from bisem.typemonoid import MonoidPresentation

from conftest import CORPUS, bis, semigroup

names = st.text("abcdefghxyz0123456789_", min_size=1, max_size=4)


def same_table(S, T):
    return (np.array_equal(S.mul, T.mul) and np.array_equal(S.inv, T.inv)
            and tuple(S.labels) == tuple(T.labels))


@pytest.mark.parametrize("name", [n for n in CORPUS if n not in ("I4", "fork_tight", "chain_tight")])
def test_cayley_round_trip_on_corpus(name):
    S = semigroup(name)
    back = parse_cayley(dump_cayley(S))
    assert same_table(S, back.semigroup) and not back.boolean_certified
    if CORPUS[name][1]:
        back = parse_cayley(dump_cayley(bis(name)))
        assert back.boolean_certified and same_table(S, back.semigroup)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(st.characters(blacklist_categories=("Cs",),
                                      blacklist_characters="#\n\r\v\f\x1c\x1d\x1e\x85\u2028\u2029"), max_size=5),
                min_size=7, max_size=7, unique=True))
def test_cayley_labels_round_trip(labels):
    S = semigroup("I2")
    T = FiniteInverseSemigroup(S.mul, S.inv, 0, labels)
    assert same_table(T, parse_cayley(dump_cayley(T)).semigroup)


def test_cayley_rejects_reserved_labels():
    S = semigroup("I1")
    with pytest.raises(ValueError):
        dump_cayley(FiniteInverseSemigroup(S.mul, S.inv, 0, ["0", "a#b"]))
    with pytest.raises(ValueError):
        dump_cayley(FiniteInverseSemigroup(S.mul, S.inv, 0, ["0", "a\nb"]))


def test_cayley_zero_elsewhere():
    text = "semigroup 2\nzero 1\n0 1\n1 1\ninv 0 1\nlabels g z\n"
    S = parse_cayley(text).semigroup
    assert S.labels == ("z", "g")


@pytest.mark.parametrize("text,line,col", [
    ("semigroup x\n", 1, 11),
    ("semigroup 2\nzero 0\n0 0\n0\ninv 0 1\n", 4, 1),
    ("semigroup 2\nzero 0\n0 0\n0 5\ninv 0 1\n", 4, 3),
    ("semigroup 2\nzero 0\n0 0\n0 1\ninv 0\n", 5, 1),
    ("semigroup 2\nzero 3\n", 2, 6),
    ("# header\nboolean maybe\n", 2, 1),
    ("semigroup 2\nzero 0\n0 0\n0 1\ninv 0 1\nlabels a\n", 6, 1),
    ("semigroup 2\nzero 0\n0 0\n0 1\ninv 0 1\nextra\n", 6, 1),
])
def test_cayley_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_cayley(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"line {line}, col {col}")


partial_maps = st.dictionaries(st.integers(1, 4), st.integers(1, 4), max_size=4).filter(
    lambda m: len(set(m.values())) == len(m))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(names, partial_maps), min_size=1, max_size=4))
def test_generators_round_trip(items):
    gens = [PartialPermutation.from_dict(m, range(1, 5)) for _, m in items]
    nm = [n for n, _ in items]
    n, nm2, gens2 = parse_generators(dump_generators(4, nm, gens))
    assert n == 4 and nm2 == nm and gens2 == gens


@pytest.mark.parametrize("text,line,col", [
    ("points 3\na: 1->2 2->2\n", 2, 9),
    ("points 3\na: 1->4\n", 2, 4),
    ("points 3\na 1->2\n", 2, 1),
    ("points 3\na: 1-2\n", 2, 4),
    ("points 3\n", 2, 1),
])
def test_generator_errors(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_generators(text)
    assert (info.value.line, info.value.col) == (line, col)


@st.composite
def graphs(draw):
    vs = draw(st.lists(names, min_size=1, max_size=5, unique=True))
    n = len(vs)
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=6))
    edges = [(f"e{i}", vs[s], vs[r]) for i, (s, r) in enumerate(pairs)]
    return DirectedGraph.from_edges(vs, edges)


@settings(max_examples=80, deadline=None)
@given(graphs())
def test_graph_round_trip(G):
    assert parse_graph(dump_graph(G)) == G


@pytest.mark.parametrize("text,line,col", [
    ("vertex v\nedge e: v -> w\n", 2, 14),
    ("vertex v\nvertex v\n", 2, 8),
    ("vertex v\nedge e v w\n", 2, 1),
    ("vertex v\nloop e\n", 2, 1),
    ("# nothing\n", 1, 1),
])
def test_graph_errors(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_graph(text)
    assert (info.value.line, info.value.col) == (line, col)


@st.composite
def presentations(draw):
    k = draw(st.integers(0, 4))
    vec = st.tuples(*[st.integers(0, 5)] * k)
    rels = draw(st.lists(st.tuples(vec, vec).filter(lambda r: r[0] != r[1]), max_size=4))
    labels = draw(st.lists(names, min_size=k, max_size=k, unique=True))
    return MonoidPresentation(k, tuple(rels), tuple(labels))


@settings(max_examples=80, deadline=None)
@given(presentations())
def test_presentation_round_trip(P):
    assert parse_presentation(dump_presentation(P)) == P


@pytest.mark.parametrize("text,line,col", [
    ("monoid 2\na b\n1 0 = 0\n", 3, 1),
    ("monoid 2\na b\n1 0 0 1\n", 3, 1),
    ("monoid 2\na b\n1 -1 = 0 1\n", 3, 3),
    ("monoid 2\na b\n1 0 = 1 0\n", 3, 1),
    ("monoid 2\n", 2, 1),
])
def test_presentation_errors(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_presentation(text)
    assert (info.value.line, info.value.col) == (line, col)


@settings(max_examples=60, deadline=None)
@given(st.permutations(range(8)), st.lists(st.integers(1, 7), max_size=4, unique=True))
def test_congruence_round_trip(perm, cuts):
    bounds = [0] + sorted(cuts) + [8]
    classes = [tuple(perm[a:b]) for a, b in zip(bounds, bounds[1:]) if a < b]
    assert parse_congruence(dump_congruence(classes)) == classes


def test_congruence_errors():
    with pytest.raises(ParseError) as info:
        parse_congruence("congruence\n0 1\n1 2\n")
    assert (info.value.line, info.value.col) == (3, 1)
    with pytest.raises(ParseError):
        parse_congruence("congruence\n0 2\n")


@pytest.mark.parametrize("text,kind", [
    (dump_cayley(example_a()), "cayley"), ("# c\nboolean certified\n", "cayley"),
    ("points 2\na: 1->2\n", "generators"), ("vertex v\n", "graph"),
    ("monoid 0\n-\n", "presentation"), ("congruence\n0\n", "congruence"),
])
def test_detect_format(text, kind):
    assert detect_format(text) == kind


def test_detect_format_unknown():
    with pytest.raises(ParseError) as info:
        detect_format("\n\n  hello\n")
    assert (info.value.line, info.value.col) == (3, 3)
