"""Atoms, groupoids of atoms, local bisections and rook matrices over groups with zero."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from ._tables import RowIndex, table_from_rows
from .boolean import BooleanInverseSemigroup, certify, check_additive
from .core import (DEFAULT_MAX_ELEMENTS, FiniteInverseSemigroup, SizeBudgetExceeded,
                   direct_sum, symmetric_inverse_semigroup)


class IsoFailure(AssertionError):
    def __init__(self, message, witness=()):
        super().__init__(f"{message}; witness {witness}")
        self.witness = witness


# ---------------------------------------------------------------------------
# groupoids


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    """Objects ``0..m-1`` and arrows ``0..a-1``; ``compose[g, h]`` is ``gh`` (h first), -1 if undefined."""

    object_labels: tuple
    arrow_labels: tuple
    dmap: np.ndarray
    rmap: np.ndarray
    compose: np.ndarray
    identity: np.ndarray
    inverse: np.ndarray

    @property
    def num_objects(self) -> int:
        return len(self.object_labels)

    @property
    def num_arrows(self) -> int:
        return len(self.arrow_labels)

    def hom(self, x: int, y: int) -> np.ndarray:
        """Arrows from ``x`` to ``y``."""
        return np.flatnonzero((self.dmap == x) & (self.rmap == y))

    def isotropy(self, x: int) -> np.ndarray:
        return self.hom(x, x)

    @property
    def is_principal(self) -> bool:
        return all(len(self.isotropy(x)) == 1 for x in range(self.num_objects))


def make_groupoid(object_labels, arrow_labels, dmap, rmap, product) -> FiniteGroupoid:
    """Build the composition table from ``product(g, h)`` on composable pairs."""
    dmap = np.asarray(dmap, dtype=np.int64)
    rmap = np.asarray(rmap, dtype=np.int64)
    a = len(arrow_labels)
    comp = np.full((a, a), -1, dtype=np.int64)
    for g in range(a):
        for h in np.flatnonzero(rmap == dmap[g]):
            comp[g, h] = product(g, int(h))
    identity = np.full(len(object_labels), -1, dtype=np.int64)
    for x in range(len(object_labels)):
        loops = np.flatnonzero((dmap == x) & (rmap == x))
        idem = loops[comp[loops, loops] == loops]
        if len(idem):
            identity[x] = idem[0]
    inverse = np.full(a, -1, dtype=np.int64)
    for g in range(a):
        for h in np.flatnonzero((dmap == rmap[g]) & (rmap == dmap[g])):
            if comp[g, h] == identity[rmap[g]]:
                inverse[g] = h
                break
    for t in (dmap, rmap, comp, identity, inverse):
        t.setflags(write=False)
    return FiniteGroupoid(tuple(object_labels), tuple(arrow_labels), dmap, rmap, comp, identity, inverse)


def verify_groupoid(G: FiniteGroupoid) -> list[str]:
    """Groupoid laws; returns a list of failure descriptions (empty when valid)."""
    out = []
    comp, d, r = G.compose, G.dmap, G.rmap
    defined = comp >= 0
    if not np.array_equal(defined, d[:, None] == r[None, :]):
        out.append("composition defined exactly on pairs with d(g) = r(h)")
    for g, h in np.argwhere(defined):
        gh = comp[g, h]
        if d[gh] != d[h] or r[gh] != r[g]:
            out.append(f"ends of {g}{h}")
            break
        k = np.flatnonzero(r == d[h])
        lhs = comp[gh, k]
        rhs = comp[g, comp[h, k]]
        if not np.array_equal(lhs, rhs):
            out.append(f"associativity at ({g},{h})")
            break
    if (G.identity < 0).any():
        out.append("missing identity")
    if (G.inverse < 0).any():
        out.append("missing inverse")
    else:
        ar = np.arange(G.num_arrows)
        if not np.array_equal(comp[G.inverse, ar], G.identity[d]):
            out.append("g^-1 g != id")
    return out


def pair_groupoid(n: int, labels=None) -> FiniteGroupoid:
    """Arrows ``(y, x)`` from ``x`` to ``y``; ``(z, y)(y, x) = (z, x)``."""
    labels = list(labels) if labels is not None else [str(i + 1) for i in range(n)]
    arrows = [(y, x) for y in range(n) for x in range(n)]
    index = {a: k for k, a in enumerate(arrows)}
    return make_groupoid(labels, [f"{labels[x]}>{labels[y]}" for y, x in arrows],
                         [x for _, x in arrows], [y for y, _ in arrows],
                         lambda g, h: index[(arrows[g][0], arrows[h][1])])


def group_groupoid(group, labels=None) -> FiniteGroupoid:
    g = np.asarray(group, dtype=np.int64)
    m = len(g)
    labels = list(labels) if labels is not None else [f"g{k}" for k in range(m)]
    return make_groupoid(["*"], labels, [0] * m, [0] * m, lambda a, b: int(g[a, b]))


def transitive_groupoid(n: int, group) -> FiniteGroupoid:
    """``X x G x X`` with arrows ``(y, g, x)`` from ``x`` to ``y``."""
    g = np.asarray(group, dtype=np.int64)
    m = len(g)
    arrows = [(y, a, x) for y in range(n) for a in range(m) for x in range(n)]
    index = {t: k for k, t in enumerate(arrows)}

    def product(p, q):
        y, a, _ = arrows[p]
        _, b, x = arrows[q]
        return index[(y, int(g[a, b]), x)]

    return make_groupoid([str(i + 1) for i in range(n)],
                         [f"({y + 1},g{a},{x + 1})" for y, a, x in arrows],
                         [x for _, _, x in arrows], [y for y, _, _ in arrows], product)


def disjoint_union(*groupoids: FiniteGroupoid) -> FiniteGroupoid:
    objs, arrows, dmap, rmap = [], [], [], []
    offsets = []
    ob, ar = 0, 0
    for k, G in enumerate(groupoids):
        offsets.append((ob, ar))
        objs += [f"{k}:{x}" for x in G.object_labels]
        arrows += [f"{k}:{a}" for a in G.arrow_labels]
        dmap += list(G.dmap + ob)
        rmap += list(G.rmap + ob)
        ob += G.num_objects
        ar += G.num_arrows
    owner = np.concatenate([np.full(G.num_arrows, k) for k, G in enumerate(groupoids)]
                           + [np.zeros(0, dtype=np.int64)]).astype(np.int64)

    def product(g, h):
        k = owner[g]
        _, off = offsets[k]
        return int(groupoids[k].compose[g - off, h - off] + off)

    return make_groupoid(objs, arrows, dmap, rmap, product)


def components(G: FiniteGroupoid) -> list[list[int]]:
    """Connected components as sorted object lists, ordered by least object."""
    parent = list(range(G.num_objects))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in zip(G.dmap, G.rmap):
        a, b = find(int(x)), find(int(y))
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for x in range(G.num_objects):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())


def to_dot(G: FiniteGroupoid, name: str = "groupoid") -> str:
    """DOT digraph: objects as nodes, non-identity arrows as labelled edges, one cluster per component."""
    lines = [f"digraph {name} {{"]
    ident = set(int(x) for x in G.identity)
    for k, comp in enumerate(components(G)):
        lines.append(f"  subgraph cluster_{k} {{")
        for x in comp:
            lines.append(f'    o{x} [label="{G.object_labels[x]}"];')
        lines.append("  }")
    for g in range(G.num_arrows):
        if g in ident:
            continue
        lines.append(f'  o{G.dmap[g]} -> o{G.rmap[g]} [label="{G.arrow_labels[g]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# local bisections


@dataclass(frozen=True)
class LocalBisection:
    arrows: frozenset

    def __len__(self):
        return len(self.arrows)


def is_local_bisection(G: FiniteGroupoid, arrows) -> bool:
    arrows = list(arrows)
    return (len(set(G.dmap[arrows].tolist())) == len(arrows)
            and len(set(G.rmap[arrows].tolist())) == len(arrows))


def _bisection_rows(G: FiniteGroupoid, max_elements: int) -> np.ndarray:
    """Every local bisection as a row indexed by object: the arrow with that domain, or -1."""
    m = G.num_objects
    out_of = [np.flatnonzero(G.dmap == x) for x in range(m)]
    rows: list[list[int]] = []
    row = [-1] * m

    def rec(x, used):
        if x == m:
            rows.append(list(row))
            if len(rows) > max_elements:
                raise SizeBudgetExceeded(f"more than {max_elements} local bisections")
            return
        rec(x + 1, used)
        for g in out_of[x]:
            y = int(G.rmap[g])
            if y not in used:
                row[x] = int(g)
                rec(x + 1, used | {y})
                row[x] = -1

    rec(0, frozenset())
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), m)
    rank = (arr >= 0).sum(axis=1)
    order = np.lexsort(tuple(arr[:, ::-1].T) + (rank,))
    return arr[order]


def _compose_bisections(G: FiniteGroupoid):
    comp = G.compose
    rmap = G.rmap

    def compose(rows, j):
        b = rows[j]
        out = np.full_like(rows, -1)
        for z in np.flatnonzero(b >= 0):
            h = b[z]
            g = rows[:, rmap[h]]
            ok = g >= 0
            out[ok, z] = comp[g[ok], h]
        return out

    return compose


def _invert_rows(G: FiniteGroupoid, rows: np.ndarray) -> np.ndarray:
    out = np.full_like(rows, -1)
    for z in range(rows.shape[1]):
        g = rows[:, z]
        ok = g >= 0
        out[np.flatnonzero(ok), G.rmap[g[ok]]] = G.inverse[g[ok]]
    return out


def local_bisection_semigroup(G: FiniteGroupoid, max_elements: int = DEFAULT_MAX_ELEMENTS):
    """All local bisections under ``AB = {gh : g in A, h in B composable}``.

    Returns ``(B, bisections)`` with ``B`` a certified Boolean inverse
    semigroup; element 0 is the empty bisection.
    """
    rows = _bisection_rows(G, max_elements)
    mul = table_from_rows(rows, _compose_bisections(G))
    inv_rows = _invert_rows(G, rows)
    inv = RowIndex(rows, max(G.num_arrows, 1)).lookup(inv_rows)
    bis = [LocalBisection(frozenset(int(g) for g in r if g >= 0)) for r in rows]
    for b in bis:
        assert is_local_bisection(G, b.arrows)
    labels = ["0" if not b.arrows else "{" + ",".join(G.arrow_labels[g] for g in sorted(b.arrows)) + "}"
              for b in bis]
    S = FiniteInverseSemigroup(mul, inv, 0, labels)
    return certify(S), bis


# ---------------------------------------------------------------------------
# atoms


def atoms(B: BooleanInverseSemigroup) -> np.ndarray:
    """Nonzero elements with nothing strictly between them and 0.

    Also asserts that every nonzero element is the join of the atoms below it.
    """
    base = B.base
    at = np.flatnonzero(base.down_size == 2)
    below = base.leq[np.ix_(at, np.arange(base.size))]
    for s in range(1, base.size):
        assert B.join_many(at[below[:, s]]) == s, f"{s} is not the join of its atoms"
    return at


def atom_groupoid(B: BooleanInverseSemigroup):
    """Groupoid on the idempotent atoms whose arrows are all atoms.

    Returns ``(G, atom_list)``; arrow ``k`` of ``G`` is the atom ``atom_list[k]``.
    """
    base = B.base
    at = atoms(B)
    pos = {int(a): k for k, a in enumerate(at)}
    objs = [int(a) for a in at if base.idempotent_mask[a]]
    opos = {e: k for k, e in enumerate(objs)}
    for s in at:
        assert int(base.d[s]) in opos and int(base.r[s]) in opos, "domain of an atom is not an atom"
    prod = base.mul[np.ix_(at, at)]
    for i, s in enumerate(at):
        for j, t in enumerate(at):
            p = int(prod[i, j])
            composable = base.d[s] == base.r[t]
            assert (p in pos) if composable else (p == 0), "product of atoms is neither 0 nor an atom"
    G = make_groupoid([base.label(e) for e in objs], [base.label(int(s)) for s in at],
                      [opos[int(base.d[s])] for s in at], [opos[int(base.r[s])] for s in at],
                      lambda g, h: pos[int(prod[g, h])])
    return G, at


def verify_atom_iso(B: BooleanInverseSemigroup) -> np.ndarray:
    """Check that ``s -> {atoms below s}`` is an additive isomorphism onto the bisection semigroup.

    Returns the map as an index array; raises :class:`IsoFailure`.
    """
    G, at = atom_groupoid(B)
    T, bis = local_bisection_semigroup(G)
    where = {b.arrows: k for k, b in enumerate(bis)}
    below = B.base.leq[np.ix_(at, np.arange(B.base.size))]
    phi = np.empty(B.base.size, dtype=np.int64)
    for s in range(B.base.size):
        key = frozenset(int(k) for k in np.flatnonzero(below[:, s]))
        if key not in where:
            raise IsoFailure("atoms below an element do not form a local bisection", (s,))
        phi[s] = where[key]
    _check_iso(B, T, phi)
    return phi


def _check_iso(S: BooleanInverseSemigroup, T: BooleanInverseSemigroup, phi: np.ndarray):
    if len(np.unique(phi)) != S.base.size or T.base.size != S.base.size:
        raise IsoFailure("map is not a bijection", (S.base.size, T.base.size))
    bad = phi[S.base.mul] != T.base.mul[phi[:, None], phi[None, :]]
    if bad.any():
        raise IsoFailure("map is not multiplicative", tuple(int(x) for x in np.argwhere(bad)[0]))
    if not check_additive(phi, S, T):
        raise IsoFailure("map is not additive")


# ---------------------------------------------------------------------------
# rook matrices


@dataclass(frozen=True)
class RookMatrix:
    """``entries[i][j]`` is ``None`` (zero) or a group element index."""

    n: int
    entries: tuple

    def __post_init__(self):
        for i in range(self.n):
            if sum(e is not None for e in self.entries[i]) > 1:
                raise ValueError(f"row {i} has two nonzero entries")
        for j in range(self.n):
            if sum(self.entries[i][j] is not None for i in range(self.n)) > 1:
                raise ValueError(f"column {j} has two nonzero entries")

    @classmethod
    def from_columns(cls, cols, n):
        """``cols[j]`` is ``(i, g)`` or ``None``."""
        e = [[None] * n for _ in range(n)]
        for j, c in enumerate(cols):
            if c is not None:
                e[c[0]][j] = c[1]
        return cls(n, tuple(tuple(r) for r in e))

    def columns(self):
        out = []
        for j in range(self.n):
            hit = [(i, self.entries[i][j]) for i in range(self.n) if self.entries[i][j] is not None]
            out.append(hit[0] if hit else None)
        return out

    def multiply(self, other: "RookMatrix", group) -> "RookMatrix":
        """Matrix product with ``0`` absorbing; at most one nonzero term per entry."""
        g = np.asarray(group)
        out = [[None] * self.n for _ in range(self.n)]
        for i in range(self.n):
            for j in range(self.n):
                terms = [int(g[self.entries[i][k], other.entries[k][j]]) for k in range(self.n)
                         if self.entries[i][k] is not None and other.entries[k][j] is not None]
                assert len(terms) <= 1
                out[i][j] = terms[0] if terms else None
        return RookMatrix(self.n, tuple(tuple(r) for r in out))

    def label(self, names) -> str:
        return "[" + ";".join(" ".join("0" if e is None else names[e] for e in row)
                              for row in self.entries) + "]"


def group_identity(group) -> int:
    g = np.asarray(group)
    for e in range(len(g)):
        if np.array_equal(g[e], np.arange(len(g))):
            return e
    raise ValueError("no identity")


def group_names(group) -> list[str]:
    e = group_identity(group)
    return ["1" if a == e else f"g{a}" for a in range(len(group))]


def _rook_compose(g: np.ndarray):
    """Column ``j`` of ``AB``: ``B`` has ``b`` at ``(k, j)``, ``A`` has ``a`` at ``(i, k)``, giving ``ab`` at ``(i, j)``."""
    m = len(g)

    def compose(rows, j):
        b = rows[j]
        out = np.full_like(rows, -1)
        for jj in np.flatnonzero(b >= 0):
            k, bb = divmod(int(b[jj]), m)
            a = rows[:, k]
            ok = a >= 0
            out[ok, jj] = (a[ok] // m) * m + g[a[ok] % m, bb]
        return out

    return compose


def rook_semigroup(n: int, group, max_elements: int = DEFAULT_MAX_ELEMENTS):
    """All ``n x n`` rook matrices over ``G^0``; returns ``(B, matrices)``.

    For the trivial group the canonical map to partial permutations is checked
    to be an isomorphism with ``I_n``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    g = np.asarray(group, dtype=np.int64)
    m = len(g)
    cols: list[list] = []
    cur: list = [None] * n

    def rec(j, used):
        if j == n:
            cols.append(list(cur))
            if len(cols) > max_elements:
                raise SizeBudgetExceeded(f"more than {max_elements} rook matrices")
            return
        rec(j + 1, used)
        for i in range(n):
            if i not in used:
                for a in range(m):
                    cur[j] = (i, a)
                    rec(j + 1, used | {i})
                cur[j] = None

    rec(0, frozenset())
    cols.sort(key=lambda c: (sum(x is not None for x in c),
                             [(-1, -1) if x is None else x for x in c]))
    mats = [RookMatrix.from_columns(c, n) for c in cols]
    rows = np.array([[-1 if x is None else x[0] * m + x[1] for x in c] for c in cols],
                    dtype=np.int64).reshape(len(cols), n)
    mul = table_from_rows(rows, _rook_compose(g))
    inv_g = np.array([int(np.flatnonzero(g[a] == group_identity(g))[0]) for a in range(m)])
    inv_rows = np.full_like(rows, -1)
    for j in range(n):
        c = rows[:, j]
        ok = c >= 0
        inv_rows[np.flatnonzero(ok), c[ok] // m] = j * m + inv_g[c[ok] % m]
    inv = RowIndex(rows, n * m).lookup(inv_rows)
    names = group_names(g)
    S = FiniteInverseSemigroup(mul, inv, 0, [M.label(names) for M in mats])
    B = certify(S)
    if m == 1:
        I, pps = symmetric_inverse_semigroup(n)
        where = {p: k for k, p in enumerate(pps)}
        from .core import PartialPermutation
        phi = np.array([where[PartialPermutation.from_dict(
            {j + 1: c[0] + 1 for j, c in enumerate(M.columns()) if c is not None}, range(1, n + 1))]
            for M in mats], dtype=np.int64)
        _check_iso(B, certify(I), phi)
    return B, mats


# ---------------------------------------------------------------------------
# decomposition


def group_name(group) -> str:
    g = np.asarray(group)
    m = len(g)
    if m == 1:
        return "trivial"
    e = group_identity(g)

    def order(a):
        k, x = 1, a
        while x != e:
            x = g[x, a]
            k += 1
        return k

    if any(order(a) == m for a in range(m)):
        return f"Z{m}"
    abelian = np.array_equal(g, g.T)
    if m == 4 and abelian:
        return "Z2xZ2"
    if m == 6 and not abelian:
        return "S3"
    return f"{'abelian' if abelian else 'nonabelian'} group of order {m}"


def groups_isomorphic(g, h) -> bool:
    """Brute-force isomorphism test for small groups."""
    g, h = np.asarray(g), np.asarray(h)
    if len(g) != len(h):
        return False
    m = len(g)
    if m > 8:
        raise ValueError("group too large for brute force")
    for p in permutations(range(m)):
        p = np.array(p)
        if np.array_equal(p[g], h[p[:, None], p[None, :]]):
            return True
    return False


@dataclass(frozen=True, eq=False)
class Decomposition:
    blocks: list                  # [(n_i, group name, group table)]
    isomorphism: np.ndarray       # element of S -> element of the direct sum
    target: BooleanInverseSemigroup
    fundamental: bool
    principal: bool

    def summary(self) -> list[tuple[int, str]]:
        return [(n, name) for n, name, _ in self.blocks]


def decompose(B: BooleanInverseSemigroup, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Decomposition:
    """Isomorphism onto a direct sum of rook matrix semigroups ``M_n(G^0)``.

    Per component: base object = its lowest object, isotropy group there,
    spanning-tree arrows ``t_x`` from the base to each object ``x``.  An atom
    ``a`` from ``x`` to ``y`` goes to the entry ``(y, x)`` with group element
    ``t_y^-1 a t_x``.
    """
    from .congruence import is_fundamental

    G, at = atom_groupoid(B)
    comps = components(G)
    blocks, mats_per_block, entry_of_arrow = [], [], {}
    for k, objs in enumerate(comps):
        x0 = objs[0]
        iso = G.isotropy(x0)
        gpos = {int(a): i for i, a in enumerate(iso)}
        table = [[gpos[int(G.compose[a, b])] for b in iso] for a in iso]
        t = {x0: int(G.identity[x0])}
        for x in objs[1:]:
            t[x] = int(G.hom(x0, x)[0])
        for x in objs[1:]:
            other = G.isotropy(x)
            conj = [int(G.compose[G.compose[t[x], a], G.inverse[t[x]]]) for a in iso]
            if sorted(conj) != sorted(int(a) for a in other):
                raise IsoFailure("isotropy groups are not conjugate", (x0, x))
        opos = {x: i for i, x in enumerate(objs)}
        for a in range(G.num_arrows):
            x, y = int(G.dmap[a]), int(G.rmap[a])
            if x in opos:
                h = int(G.compose[G.compose[G.inverse[t[y]], a], t[x]])
                entry_of_arrow[a] = (k, opos[y], opos[x], gpos[h])
        R, mats = rook_semigroup(len(objs), table, max_elements)
        blocks.append((len(objs), group_name(table), table, R))
        mats_per_block.append({M: i for i, M in enumerate(mats)})
    sums = [b[3].base for b in blocks]
    T = certify(direct_sum(*sums)) if sums else B
    sizes = tuple(s.size for s in sums)
    base = B.base
    below = base.leq[np.ix_(at, np.arange(base.size))]
    phi = np.zeros(base.size, dtype=np.int64)
    for s in range(base.size):
        grids = [[[None] * n for _ in range(n)] for n, *_ in blocks]
        for a in np.flatnonzero(below[:, s]):
            k, i, j, g = entry_of_arrow[int(a)]
            grids[k][i][j] = g
        idx = [mats_per_block[k][RookMatrix(len(grid), tuple(tuple(r) for r in grid))]
               for k, grid in enumerate(grids)]
        phi[s] = np.ravel_multi_index(idx, sizes, order="F") if sizes else 0
    _check_iso(B, T, phi)
    principal = G.is_principal
    fundamental = is_fundamental(B)
    trivial = all(len(b[2]) == 1 for b in blocks)
    assert fundamental == trivial == principal, "fundamental / trivial isotropy / principal disagree"
    return Decomposition([(n, name, table) for n, name, table, _ in blocks], phi, T,
                         fundamental, principal)
