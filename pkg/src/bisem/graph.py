"""Graph inverse semigroups, graph monoids and tight Booleanizations of acyclic graphs.

Paths are written right to left: ``e1 e2 ... en`` has ``s(e_i) = r(e_{i+1})``,
source ``s(en)`` and range ``r(e1)``.  An edge ``e: u -> w`` has ``s(e) = u``
and ``r(e) = w``.  The element ``x* y`` is stored as the pair ``(x, y)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .boolean import BooleanInverseSemigroup
from .core import Check, DEFAULT_MAX_ELEMENTS, FiniteInverseSemigroup, verify_inverse_semigroup
from .structure import FiniteGroupoid, disjoint_union, local_bisection_semigroup, pair_groupoid
from .typemonoid import (Budget, Inconclusive, MonoidPresentation, decide_equal, int_monoid,
                         reduce_presentation, typ)


class GraphHasCycle(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    vertices: tuple
    edges: tuple
    smap: tuple
    rmap: tuple

    def __post_init__(self):
        if len(self.edges) != len(self.smap) or len(self.edges) != len(self.rmap):
            raise ValueError("every edge needs a source and a range")
        if len(set(self.vertices)) != len(self.vertices) or len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate names")
        for v in self.smap + self.rmap:
            if not 0 <= v < len(self.vertices):
                raise ValueError(f"edge endpoint {v} out of range")

    @classmethod
    def from_edges(cls, vertices, edges) -> "DirectedGraph":
        """``edges`` is a list of ``(name, source name, range name)``."""
        pos = {v: i for i, v in enumerate(vertices)}
        return cls(tuple(vertices), tuple(e for e, _, _ in edges),
                   tuple(pos[s] for _, s, _ in edges), tuple(pos[r] for _, _, r in edges))

    def __eq__(self, other):
        return (isinstance(other, DirectedGraph) and self.vertices == other.vertices
                and self.edges == other.edges and self.smap == other.smap and self.rmap == other.rmap)

    def __hash__(self):
        return hash((self.vertices, self.edges, self.smap, self.rmap))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def emitted(self, v: int) -> list[int]:
        return [e for e, s in enumerate(self.smap) if s == v]

    @property
    def sinks(self) -> list[int]:
        return [v for v in range(self.num_vertices) if not self.emitted(v)]

    @cached_property
    def topological_order(self) -> list[int] | None:
        """Vertices with every edge going from earlier to later; ``None`` if there is a cycle."""
        indeg = [0] * self.num_vertices
        for r in self.rmap:
            indeg[r] += 1
        queue = deque(v for v in range(self.num_vertices) if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for e in self.emitted(v):
                indeg[self.rmap[e]] -= 1
                if indeg[self.rmap[e]] == 0:
                    queue.append(self.rmap[e])
        return order if len(order) == self.num_vertices else None

    @property
    def is_acyclic(self) -> bool:
        return self.topological_order is not None

    def require_acyclic(self):
        if not self.is_acyclic:
            raise GraphHasCycle("the graph has a cycle")


@dataclass(frozen=True, order=True)
class GraphPath:
    """Edges ``e1 ... en`` read right to left; a trivial path carries only its vertex."""

    source: int
    range: int
    edges: tuple = ()

    @classmethod
    def vertex(cls, v: int) -> "GraphPath":
        return cls(v, v, ())

    @classmethod
    def edge(cls, G: DirectedGraph, e: int) -> "GraphPath":
        return cls(G.smap[e], G.rmap[e], (e,))

    def __len__(self):
        return len(self.edges)

    def then(self, p: "GraphPath") -> "GraphPath":
        """``p . self``: first ``self``, then ``p``."""
        return concat(p, self)

    def label(self, G: DirectedGraph) -> str:
        if not self.edges:
            return str(G.vertices[self.source])
        return ".".join(str(G.edges[e]) for e in self.edges)


def concat(p: GraphPath, q: GraphPath) -> GraphPath:
    """The path ``p q`` (``q`` first); needs ``s(p) = r(q)``."""
    if p.source != q.range:
        raise ValueError("paths do not compose")
    return GraphPath(q.source, p.range, p.edges + q.edges)


def strip_suffix(y: GraphPath, u: GraphPath) -> GraphPath | None:
    """``y'`` with ``y = y' u``, or ``None``."""
    if y.source != u.source or len(u) > len(y):
        return None
    cut = len(y) - len(u)
    if y.edges[cut:] != u.edges:
        return None
    return GraphPath(u.range, y.range, y.edges[:cut])


def all_paths(G: DirectedGraph) -> list[GraphPath]:
    """Every path, shortest first; needs an acyclic graph."""
    G.require_acyclic()
    level = [GraphPath.vertex(v) for v in range(G.num_vertices)]
    out = []
    while level:
        out += level
        nxt = []
        for p in level:
            for e in G.emitted(p.range):
                nxt.append(GraphPath(p.source, G.rmap[e], (e,) + p.edges))
        level = nxt
    return out


@dataclass(frozen=True, order=True)
class GraphISElement:
    """``x* y`` with ``r(x) = r(y)``; both paths ``None`` for zero."""

    x: GraphPath | None = None
    y: GraphPath | None = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("zero has no paths")
        if self.x is not None and self.x.range != self.y.range:
            raise ValueError("x* y needs r(x) = r(y)")

    @property
    def is_zero(self) -> bool:
        return self.x is None

    def inverse(self) -> "GraphISElement":
        return GraphISElement(self.y, self.x)

    def label(self, G: DirectedGraph) -> str:
        if self.is_zero:
            return "0"
        x, y = self.x, self.y
        if not x.edges:
            return y.label(G)
        star = (x.label(G) if len(x) == 1 else f"({x.label(G)})") + "*"
        return star if not y.edges else f"{star}{y.label(G)}"


ZERO = GraphISElement()


def vertex_element(v: int) -> GraphISElement:
    p = GraphPath.vertex(v)
    return GraphISElement(p, p)


def edge_element(G: DirectedGraph, e: int) -> GraphISElement:
    """``e = r(e)* e``."""
    return GraphISElement(GraphPath.vertex(G.rmap[e]), GraphPath.edge(G, e))


def gis_multiply(p: GraphISElement, q: GraphISElement) -> GraphISElement:
    if p.is_zero or q.is_zero:
        return ZERO
    x, y = p.x, p.y
    u, v = q.x, q.y
    head = strip_suffix(y, u)
    if head is not None:
        return GraphISElement(x, concat(head, v))
    head = strip_suffix(u, y)
    if head is not None:
        return GraphISElement(concat(head, x), v)
    return ZERO


@dataclass(frozen=True, eq=False)
class GraphInverseSemigroup:
    graph: DirectedGraph
    semigroup: FiniteInverseSemigroup
    elements: tuple

    @cached_property
    def index(self) -> dict:
        return {el: i for i, el in enumerate(self.elements)}

    def vertex(self, v: int) -> int:
        return self.index[vertex_element(v)]

    def edge(self, e: int) -> int:
        return self.index[edge_element(self.graph, e)]

    def edge_star(self, e: int) -> int:
        return self.index[edge_element(self.graph, e).inverse()]


def graph_inverse_semigroup(G: DirectedGraph,
                            max_elements: int = DEFAULT_MAX_ELEMENTS) -> GraphInverseSemigroup:
    """All ``x* y`` with common range plus zero, multiplied by :func:`gis_multiply`."""
    paths = all_paths(G)
    elements = [ZERO] + [GraphISElement(x, y) for x in paths for y in paths if x.range == y.range]
    if len(elements) > max_elements:
        raise ValueError(f"I(G) has {len(elements)} elements, above {max_elements}")
    index = {el: i for i, el in enumerate(elements)}
    n = len(elements)
    mul = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n):
        for j in range(1, n):
            mul[i, j] = index[gis_multiply(elements[i], elements[j])]
    inv = np.array([index[el.inverse()] if i else 0 for i, el in enumerate(elements)], dtype=np.int64)
    S = FiniteInverseSemigroup(mul, inv, 0, [el.label(G) for el in elements])
    verify_inverse_semigroup(S, check_associativity=True)
    return GraphInverseSemigroup(G, S, tuple(elements))


def check_graph_relations(I: GraphInverseSemigroup) -> dict[str, Check]:
    """(G1)-(G3) as equations in the constructed semigroup."""
    G, mul = I.graph, I.semigroup.mul
    nv, ne = G.num_vertices, len(G.edges)
    bad = ()
    for v in range(nv):
        for w in range(nv):
            want = I.vertex(v) if v == w else 0
            if mul[I.vertex(v), I.vertex(w)] != want:
                bad = (v, w)
    out = {"G1": Check(not bad, bad)}
    bad = ()
    for e in range(ne):
        for a, s, r in ((I.edge(e), G.smap[e], G.rmap[e]), (I.edge_star(e), G.rmap[e], G.smap[e])):
            if mul[a, I.vertex(s)] != a or mul[I.vertex(r), a] != a:
                bad = (e,)
    out["G2"] = Check(not bad, bad)
    bad = ()
    for e in range(ne):
        for f in range(ne):
            want = I.vertex(G.rmap[e]) if e == f else 0
            if mul[I.edge(e), I.edge_star(f)] != want:
                bad = (e, f)
    out["G3"] = Check(not bad, bad)
    return out


# ---------------------------------------------------------------------------
# a second construction: words over the generators reduced by the relations


def _letter_ends(G: DirectedGraph, a) -> tuple[int, int]:
    kind, i = a
    if kind == "v":
        return i, i
    if kind == "e":
        return G.smap[i], G.rmap[i]
    return G.rmap[i], G.smap[i]


def reduce_word(G: DirectedGraph, word) -> tuple | None:
    """Normal form of a word in letters ``('v', i)``, ``('e', i)``, ``('*', i)``; ``None`` is zero.

    Rules: a product ``a b`` with ``s(a) != r(b)`` is zero (from (G1), (G2));
    a vertex next to a letter it fixes is absorbed (G2); ``e f*`` is
    ``delta r(e)`` (G3).
    """
    out: list = []
    for b in word:
        out.append(b)
        while len(out) >= 2:
            a, b = out[-2], out[-1]
            sa, _ = _letter_ends(G, a)
            _, rb = _letter_ends(G, b)
            if sa != rb:
                return None
            if b[0] == "v":
                out.pop()
            elif a[0] == "v":
                del out[-2]
            elif a[0] == "e" and b[0] == "*":
                if a[1] != b[1]:
                    return None
                out[-2:] = [("v", G.rmap[a[1]])]
            else:
                break
    return tuple(out)


def word_semigroup(G: DirectedGraph, max_elements: int = DEFAULT_MAX_ELEMENTS):
    """Closure of the generators under concatenation followed by :func:`reduce_word`."""
    G.require_acyclic()
    gens = ([("v", v) for v in range(G.num_vertices)] + [("e", e) for e in range(len(G.edges))]
            + [("*", e) for e in range(len(G.edges))])
    words = {(g,) for g in gens}
    queue = deque(sorted(words))
    while queue:
        w = queue.popleft()
        for g in gens:
            x = reduce_word(G, w + (g,))
            if x is not None and x not in words:
                words.add(x)
                queue.append(x)
                if len(words) > max_elements:
                    raise ValueError("word closure exceeds the element budget")
    return sorted(words)


def evaluate_word(I: GraphInverseSemigroup, word) -> int:
    G, mul = I.graph, I.semigroup.mul
    out = None
    for kind, i in word:
        a = I.vertex(i) if kind == "v" else I.edge(i) if kind == "e" else I.edge_star(i)
        out = a if out is None else int(mul[out, a])
    return out


def check_against_words(I: GraphInverseSemigroup) -> Check:
    """Reduced words and path pairs give the same semigroup.

    Evaluation of reduced words must be a bijection onto the nonzero elements
    and must turn reduced concatenation into the table product.
    """
    G = I.graph
    words = word_semigroup(G)
    val = {w: evaluate_word(I, w) for w in words}
    if sorted(val.values()) != list(range(1, I.semigroup.size)):
        return Check(False, ("not a bijection",))
    mul = I.semigroup.mul
    for w in words:
        for x in words:
            z = reduce_word(G, w + x)
            got = 0 if z is None else val[z]
            if got != mul[val[w], val[x]]:
                return Check(False, (w, x))
    return Check(True)


# ---------------------------------------------------------------------------
# graph monoid


@dataclass(frozen=True, eq=False)
class GraphMonoid:
    """``a_v = sum of a_{r(e)}`` over edges emitted by ``v``; trivial relations dropped."""

    graph: DirectedGraph
    presentation: MonoidPresentation
    normal_form: dict | None         # vertex -> counts over sinks, acyclic graphs only

    @property
    def sinks(self) -> list[int]:
        return self.graph.sinks


def graph_monoid(G: DirectedGraph) -> GraphMonoid:
    n = G.num_vertices
    rels = []
    for v in range(n):
        out = G.emitted(v)
        if not out:
            continue
        lhs = [0] * n
        lhs[v] = 1
        rhs = [0] * n
        for e in out:
            rhs[G.rmap[e]] += 1
        if lhs != rhs:
            rels.append((tuple(lhs), tuple(rhs)))
    pres = MonoidPresentation(n, tuple(rels), tuple(f"a_{v}" for v in G.vertices))
    nf = None
    if G.is_acyclic:
        N = path_count_matrix(G)
        nf = {v: tuple(int(N[v, w]) for w in G.sinks) for v in range(n)}
    return GraphMonoid(G, pres, nf)


def path_count_matrix(G: DirectedGraph) -> np.ndarray:
    """``N[v, w]``: paths from ``v`` to ``w``, the trivial path included."""
    G.require_acyclic()
    n = G.num_vertices
    N = np.eye(n, dtype=np.int64)
    for v in reversed(G.topological_order):
        for e in G.emitted(v):
            N[v] += N[G.rmap[e]]
    return N


# ---------------------------------------------------------------------------
# tight Booleanization


@dataclass(frozen=True, eq=False)
class TightBooleanization:
    graph: DirectedGraph
    B: BooleanInverseSemigroup
    groupoid: FiniteGroupoid
    paths_by_sink: dict              # sink -> list of paths with that range
    gis: GraphInverseSemigroup
    canonical: np.ndarray            # I(G) index -> B index

    def vertex(self, v: int) -> int:
        return int(self.canonical[self.gis.vertex(v)])


def tight_booleanization(G: DirectedGraph,
                         max_elements: int = DEFAULT_MAX_ELEMENTS) -> TightBooleanization:
    """Local bisections of the disjoint union of pair groupoids on the paths ending at each sink.

    The canonical map sends ``x* y`` to ``{(z x, z y)}`` over paths ``z`` from
    ``r(x)`` to a sink.  Asserts that it is a zero-preserving homomorphism and
    that ``v`` maps to the join of the images of ``e* e`` over edges leaving ``v``.
    """
    G.require_acyclic()
    paths = all_paths(G)
    sinks = G.sinks
    by_sink = {w: [p for p in paths if p.range == w] for w in sinks}
    parts = [pair_groupoid(len(by_sink[w]), [p.label(G) for p in by_sink[w]]) for w in sinks]
    groupoid = disjoint_union(*parts)
    obj, arr_off = {}, {}
    ob = ar = 0
    for w, part in zip(sinks, parts):
        arr_off[w] = (ar, len(by_sink[w]))
        for k, p in enumerate(by_sink[w]):
            obj[p] = (w, k)
        ar += part.num_arrows
    B, bis = local_bisection_semigroup(groupoid, max_elements)
    lookup = {b.arrows: i for i, b in enumerate(bis)}
    I = graph_inverse_semigroup(G, max_elements)

    def image(el: GraphISElement) -> int:
        if el.is_zero:
            return 0
        arrows = set()
        for z in paths:
            if z.source != el.x.range or z.range not in by_sink:
                continue
            w, tgt = obj[concat(z, el.x)]
            _, src = obj[concat(z, el.y)]
            off, n = arr_off[w]
            arrows.add(off + tgt * n + src)
        assert arrows, "a nonzero element maps to the empty bisection"
        return lookup[frozenset(arrows)]

    phi = np.array([image(el) for el in I.elements], dtype=np.int64)
    mul_i, mul_b = I.semigroup.mul, B.base.mul
    assert phi[0] == 0
    assert np.array_equal(phi[mul_i], mul_b[phi[:, None], phi[None, :]]), \
        "canonical map is not a homomorphism"
    for v in range(G.num_vertices):
        out = G.emitted(v)
        if out:
            joined = B.join_many([phi[I.index[GraphISElement(GraphPath.edge(G, e), GraphPath.edge(G, e))]]
                                  for e in out])
            assert joined == phi[I.vertex(v)], f"v = sum of e* e fails at vertex {G.vertices[v]}"
    return TightBooleanization(G, B, groupoid, by_sink, I, phi)


# ---------------------------------------------------------------------------
# the isomorphism Typ(B_tight) = M_G


_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _n0(k: int) -> str:
    return "ℕ₀" if k == 1 else "ℕ₀" + str(k).translate(_SUP)


@dataclass(frozen=True)
class GraphTheoremReport:
    graph: DirectedGraph
    rank: int
    generator_map: dict               # vertex name -> counts over sinks
    checks: dict = field(default_factory=dict)

    def __bool__(self):
        return all(bool(c) for c in self.checks.values())

    def summary(self) -> str:
        if not self:
            failed = [k for k, c in self.checks.items() if not c]
            return "FAILED (" + ", ".join(failed) + ")"
        G = self.graph
        sinks = set(G.sinks)
        maps = [f"a_{G.vertices[v]} ↦ ({','.join(map(str, self.generator_map[G.vertices[v]]))})"
                for v in range(G.num_vertices) if v not in sinks]
        return "VERIFIED (" + ", ".join([_n0(self.rank)] + maps) + ")"


def verify_graph_theorem(G: DirectedGraph, budget: Budget | None = None,
                         max_elements: int = DEFAULT_MAX_ELEMENTS) -> GraphTheoremReport:
    """``Typ(B_tight(I(G)))`` against ``M_G`` through ``a_v -> [v]``.

    Checks that every idempotent class is a sum of vertex classes, that
    relation (M) holds in ``Int``, that both monoids reduce to free ones on
    the sinks, and that ``a_v`` goes to ``sum_w N(v, w) [w]`` on both sides
    (the Typ side also through :func:`decide_equal`).
    """
    T = tight_booleanization(G, max_elements)
    B = T.B
    sinks = G.sinks
    N = path_count_matrix(G)
    Int = int_monoid(B)
    add = Int.pcm.add
    vcls = [int(Int.class_of[T.vertex(v)]) for v in range(G.num_vertices)]
    checks = {}
    # every class is reached from 0 by adding vertex classes
    seen, queue = {0}, deque([0])
    while queue:
        c = queue.popleft()
        for p in vcls:
            s = int(add[c, p])
            if s >= 0 and s not in seen:
                seen.add(s)
                queue.append(s)
    missing = sorted(set(range(Int.pcm.size)) - seen)
    checks["vertex_generated"] = Check(not missing, tuple(missing[:1]))
    bad = ()
    for v in range(G.num_vertices):
        out = G.emitted(v)
        if not out:
            continue
        acc = 0
        for e in out:
            acc = int(add[acc, vcls[G.rmap[e]]]) if acc >= 0 else -1
        if acc != vcls[v]:
            bad = bad or (G.vertices[v],)
    checks["relation_M"] = Check(not bad, bad)
    gm = graph_monoid(G)
    red_m = reduce_presentation(gm.presentation)
    ok = red_m.free and sorted(red_m.basis) == sorted(sinks) and all(
        red_m.images[v] == tuple(int(N[v, w]) for w in red_m.basis) for v in range(G.num_vertices))
    checks["graph_monoid_free"] = Check(ok, () if ok else (red_m.remaining[:1],))
    pres = typ(B)
    red_t = reduce_presentation(pres)
    sink_img = [red_t.images[vcls[w] - 1] for w in sinks]
    units = sorted(sink_img) == sorted(tuple(int(i == j) for i in range(red_t.rank))
                                       for j in range(red_t.rank))
    ok = red_t.free and red_t.rank == len(sinks) and units
    checks["typ_free_on_sinks"] = Check(ok, () if ok else (red_t.rank,))
    gen_map = {}
    bad = ()
    for v in range(G.num_vertices):
        counts = tuple(int(N[v, w]) for w in sinks)
        gen_map[G.vertices[v]] = counts
        if ok:
            want = tuple(sum(c * img[i] for c, img in zip(counts, sink_img)) for i in range(red_t.rank))
            if red_t.images[vcls[v] - 1] != want:
                bad = bad or (G.vertices[v],)
        lhs = [0] * pres.k
        lhs[vcls[v] - 1] += 1
        rhs = [0] * pres.k
        for c, w in zip(counts, sinks):
            rhs[vcls[w] - 1] += c
        verdict = decide_equal(pres, tuple(lhs), tuple(rhs), budget)
        if verdict.kind == "unknown":
            raise Inconclusive(f"word problem for a_{G.vertices[v]} undecided: {verdict.reason}")
        if not verdict.equal:
            bad = bad or (G.vertices[v],)
    checks["generator_map"] = Check(not bad, bad)
    return GraphTheoremReport(G, red_t.rank, gen_map, checks)


def fork() -> DirectedGraph:
    return DirectedGraph.from_edges(["v", "w1", "w2"], [("e1", "v", "w1"), ("e2", "v", "w2")])
