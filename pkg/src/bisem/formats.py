"""Plain-text formats for tables, generators, graphs, presentations and congruences.

``#`` starts a comment everywhere.  Each ``dump_*`` output reparses with the
matching ``parse_*`` to an equal structure.
"""
from __future__ import annotations

import re
import shlex
from dataclasses import dataclass

from .boolean import BooleanInverseSemigroup
from .core import FiniteInverseSemigroup, PartialPermutation
from .graph import DirectedGraph
from .typemonoid import MonoidPresentation


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Line:
    number: int
    text: str        # comment stripped, right-trimmed
    indent: int

    def fields(self):
        """``(column, token)`` pairs, columns 1-based."""
        return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", self.text)]


def _lines(text: str) -> list[_Line]:
    out = []
    for k, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            out.append(_Line(k, body, len(body) - len(body.lstrip())))
    return out


def _int(tok, line: _Line, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", line.number, col) from None


def _keyword(line: _Line, word: str, nargs: int | None = 1) -> list:
    f = line.fields()
    if not f or f[0][1] != word:
        raise ParseError(f"expected {word!r}", line.number, f[0][0] if f else 1)
    if nargs is not None and len(f) != nargs + 1:
        raise ParseError(f"{word!r} takes {nargs} argument(s)", line.number, f[0][0])
    return f[1:]


# ---------------------------------------------------------------------------
# Cayley tables


@dataclass(frozen=True)
class CayleyFile:
    semigroup: FiniteInverseSemigroup
    boolean_certified: bool = False


def parse_cayley(text: str) -> CayleyFile:
    lines = _lines(text)
    pos = 0
    certified = False
    if lines and lines[0].fields()[0][1] == "boolean":
        toks = [t for _, t in lines[0].fields()]
        if toks != ["boolean", "certified"]:
            raise ParseError("expected 'boolean certified'", lines[0].number)
        certified = True
        pos = 1
    if pos >= len(lines):
        raise ParseError("missing 'semigroup' line", lines[-1].number + 1 if lines else 1)
    (col, tok), = _keyword(lines[pos], "semigroup")
    n = _int(tok, lines[pos], col)
    if n < 1:
        raise ParseError("size must be positive", lines[pos].number, col)
    pos += 1
    if pos >= len(lines):
        raise ParseError("missing 'zero' line", lines[-1].number + 1)
    (col, tok), = _keyword(lines[pos], "zero")
    zero = _int(tok, lines[pos], col)
    if not 0 <= zero < n:
        raise ParseError("zero out of range", lines[pos].number, col)
    pos += 1
    mul = []
    for i in range(n):
        if pos >= len(lines):
            raise ParseError(f"expected {n} table rows", lines[-1].number + 1)
        line = lines[pos]
        f = line.fields()
        if len(f) != n:
            raise ParseError(f"table row needs {n} entries, got {len(f)}", line.number, f[0][0])
        row = []
        for c, t in f:
            x = _int(t, line, c)
            if not 0 <= x < n:
                raise ParseError(f"index {x} out of range", line.number, c)
            row.append(x)
        mul.append(row)
        pos += 1
    if pos >= len(lines):
        raise ParseError("missing 'inv' line", lines[-1].number + 1)
    f = _keyword(lines[pos], "inv", nargs=n)
    inv = []
    for c, t in f:
        x = _int(t, lines[pos], c)
        if not 0 <= x < n:
            raise ParseError(f"index {x} out of range", lines[pos].number, c)
        inv.append(x)
    pos += 1
    labels = None
    if pos < len(lines):
        line = lines[pos]
        if line.fields()[0][1] != "labels":
            raise ParseError("unexpected content after 'inv'", line.number, line.fields()[0][0])
        try:
            labels = shlex.split(line.text.strip()[len("labels"):])
        except ValueError as exc:
            raise ParseError(str(exc), line.number) from None
        if len(labels) != n:
            raise ParseError(f"expected {n} labels, got {len(labels)}", line.number)
        pos += 1
    if pos < len(lines):
        raise ParseError("unexpected trailing content", lines[pos].number)
    return CayleyFile(FiniteInverseSemigroup(mul, inv, zero, labels), certified)


def dump_cayley(S) -> str:
    base = S.base if isinstance(S, BooleanInverseSemigroup) else S
    out = []
    if isinstance(S, BooleanInverseSemigroup):
        out.append("boolean certified")
    out.append(f"semigroup {base.size}")
    out.append("zero 0")
    for row in base.mul:
        out.append(" ".join(str(int(x)) for x in row))
    out.append("inv " + " ".join(str(int(x)) for x in base.inv))
    if list(base.labels) != [str(i) for i in range(base.size)]:
        bad = [x for x in base.labels if "#" in x or "".join(x.splitlines()) != x]
        if bad:
            raise ValueError(f"label {bad[0]!r} cannot be written: '#' and line breaks are reserved")
        out.append("labels " + shlex.join(base.labels))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# partial-permutation generators


_PAIR = re.compile(r"^(\d+)->(\d+)$")


def parse_generators(text: str) -> tuple[int, list[str], list[PartialPermutation]]:
    """``points n`` then ``name: a->b ...`` lines, points 1-based."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty generator file", 1)
    (col, tok), = _keyword(lines[0], "points")
    n = _int(tok, lines[0], col)
    if n < 1:
        raise ParseError("need at least one point", lines[0].number, col)
    names, gens = [], []
    for line in lines[1:]:
        head, sep, rest = line.text.partition(":")
        name = head.strip()
        if not sep or not name or " " in name:
            raise ParseError("expected '<name>: a->b ...'", line.number, line.indent + 1)
        mapping = {}
        offset = len(head) + 1
        for m in re.finditer(r"\S+", rest):
            c = offset + m.start() + 1
            pm = _PAIR.match(m.group())
            if not pm:
                raise ParseError(f"expected a->b, got {m.group()!r}", line.number, c)
            a, b = int(pm.group(1)), int(pm.group(2))
            if not (1 <= a <= n and 1 <= b <= n):
                raise ParseError("point out of range", line.number, c)
            if a in mapping:
                raise ParseError(f"point {a} mapped twice", line.number, c)
            if b in mapping.values():
                raise ParseError(f"point {b} hit twice", line.number, c)
            mapping[a] = b
        names.append(name)
        gens.append(PartialPermutation.from_dict(mapping, range(1, n + 1)))
    if not gens:
        raise ParseError("no generators", lines[-1].number + 1)
    return n, names, gens


def dump_generators(n: int, names, gens) -> str:
    out = [f"points {n}"]
    for name, g in zip(names, gens):
        out.append(f"{name}: " + " ".join(f"{a}->{b}" for a, b in g.mapping))
    return "\n".join(x.rstrip() for x in out) + "\n"


# ---------------------------------------------------------------------------
# graphs


_EDGE = re.compile(r"^edge\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)\s*$")


def parse_graph(text: str) -> DirectedGraph:
    """``vertex <name>`` and ``edge <name>: <src> -> <rng>``; the edge goes from src to rng."""
    vertices, edges = [], []
    seen_v = {}
    for line in _lines(text):
        f = line.fields()
        if f[0][1] == "vertex":
            if len(f) != 2:
                raise ParseError("expected 'vertex <name>'", line.number, f[0][0])
            name = f[1][1]
            if name in seen_v:
                raise ParseError(f"duplicate vertex {name!r}", line.number, f[1][0])
            seen_v[name] = len(vertices)
            vertices.append(name)
        elif f[0][1] == "edge":
            m = _EDGE.match(line.text.strip())
            if not m:
                raise ParseError("expected 'edge <name>: <src> -> <rng>'", line.number, f[0][0])
            name, src, rng = m.groups()
            for v, grp in ((src, 2), (rng, 3)):
                if v not in seen_v:
                    raise ParseError(f"unknown vertex {v!r}", line.number,
                                     line.indent + m.start(grp) + 1)
            if any(name == e for e, _, _ in edges):
                raise ParseError(f"duplicate edge {name!r}", line.number, line.indent + m.start(1) + 1)
            edges.append((name, src, rng))
        else:
            raise ParseError(f"unknown keyword {f[0][1]!r}", line.number, f[0][0])
    if not vertices:
        raise ParseError("graph has no vertices", 1)
    return DirectedGraph.from_edges(vertices, edges)


def dump_graph(G: DirectedGraph) -> str:
    out = [f"vertex {v}" for v in G.vertices]
    out += [f"edge {e}: {G.vertices[s]} -> {G.vertices[r]}" for e, s, r in zip(G.edges, G.smap, G.rmap)]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# presentations


def parse_presentation(text: str) -> MonoidPresentation:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty presentation", 1)
    (col, tok), = _keyword(lines[0], "monoid")
    k = _int(tok, lines[0], col)
    if k < 0:
        raise ParseError("generator count must be non-negative", lines[0].number, col)
    if len(lines) < 2:
        raise ParseError("missing generator labels line", lines[0].number + 1)
    labels = [t for _, t in lines[1].fields()]
    if labels == ["-"] and k == 0:
        labels = []
    if len(labels) != k:
        raise ParseError(f"expected {k} labels", lines[1].number)
    rels = []
    for line in lines[2:]:
        f = line.fields()
        eq = [i for i, (_, t) in enumerate(f) if t == "="]
        if len(eq) != 1:
            raise ParseError("relation needs exactly one '='", line.number, f[0][0])
        lhs, rhs = f[:eq[0]], f[eq[0] + 1:]
        if len(lhs) != k or len(rhs) != k:
            raise ParseError(f"each side needs {k} entries", line.number, f[0][0])
        vals = []
        for c, t in lhs + rhs:
            x = _int(t, line, c)
            if x < 0:
                raise ParseError("negative entry", line.number, c)
            vals.append(x)
        if vals[:k] == vals[k:]:
            raise ParseError("relation pairs a vector with itself", line.number, f[0][0])
        rels.append((tuple(vals[:k]), tuple(vals[k:])))
    return MonoidPresentation(k, tuple(rels), tuple(labels))


def dump_presentation(P: MonoidPresentation) -> str:
    out = [f"monoid {P.k}", " ".join(P.labels) if P.k else "-"]
    for lhs, rhs in P.relations:
        out.append(" ".join(map(str, lhs)) + " = " + " ".join(map(str, rhs)))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# congruences


def parse_congruence(text: str) -> list[tuple[int, ...]]:
    """Classes of a partition; each index must occur exactly once."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty congruence file", 1)
    _keyword(lines[0], "congruence", nargs=0)
    classes, seen = [], set()
    for line in lines[1:]:
        cls = []
        for c, t in line.fields():
            x = _int(t, line, c)
            if x < 0 or x in seen:
                raise ParseError(f"index {x} repeated or negative", line.number, c)
            seen.add(x)
            cls.append(x)
        classes.append(tuple(cls))
    if seen != set(range(len(seen))):
        raise ParseError("classes do not cover 0..n-1", lines[-1].number)
    return classes


def dump_congruence(classes) -> str:
    return "congruence\n" + "".join(" ".join(map(str, c)) + "\n" for c in classes)


# ---------------------------------------------------------------------------


KINDS = ("cayley", "generators", "graph", "presentation", "congruence")


def detect_format(text: str) -> str:
    lines = _lines(text)
    if not lines:
        raise ParseError("empty input", 1)
    word = lines[0].fields()[0][1]
    kind = {"semigroup": "cayley", "boolean": "cayley", "points": "generators",
            "vertex": "graph", "edge": "graph", "monoid": "presentation",
            "congruence": "congruence"}.get(word)
    if kind is None:
        raise ParseError(f"cannot tell the format from {word!r}", lines[0].number, lines[0].fields()[0][0])
    return kind
