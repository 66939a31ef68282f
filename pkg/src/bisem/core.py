"""Finite inverse semigroups given by Cayley tables.

Elements are dense indices ``0..n-1``; the zero always sits at index 0 and
labels are carried alongside as metadata.  Partial permutations are the
concrete model: :func:`generate` closes a set of them under composition and
returns the abstract table together with the embedding.

Multiplication of partial maps is ordinary composition, ``(a*b)(x) = a(b(x))``,
so that ``d(a) = a^-1 a`` is the identity on ``dom a``.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ._tables import RowIndex, table_from_rows

DEFAULT_MAX_ELEMENTS = 20000
ASSOCIATIVITY_AUTO_LIMIT = 512


class ClosureBudgetExceeded(RuntimeError):
    """A closure grew beyond its element cap."""


class SizeBudgetExceeded(RuntimeError):
    """An enumeration grew beyond its element cap."""


# ---------------------------------------------------------------------------
# partial permutations


@dataclass(frozen=True)
class PartialPermutation:
    """An injective partial map on a finite set of naturals."""

    points: frozenset
    mapping: tuple  # sorted (x, y) pairs

    def __post_init__(self):
        object.__setattr__(self, "points", frozenset(self.points))
        object.__setattr__(self, "mapping", tuple(sorted(tuple(p) for p in self.mapping)))
        xs = [x for x, _ in self.mapping]
        ys = [y for _, y in self.mapping]
        if len(set(xs)) != len(xs):
            raise ValueError(f"{self.mapping} is not a function")
        if len(set(ys)) != len(ys):
            raise ValueError(f"{self.mapping} is not injective")
        if not set(xs) <= self.points or not set(ys) <= self.points:
            raise ValueError("domain and range must lie inside the point set")

    @classmethod
    def from_dict(cls, mapping: dict, points: Iterable[int]) -> "PartialPermutation":
        return cls(frozenset(points), tuple(mapping.items()))

    @classmethod
    def identity(cls, points: Iterable[int], on: Iterable[int] | None = None):
        points = frozenset(points)
        on = points if on is None else frozenset(on)
        return cls(points, tuple((x, x) for x in on))

    @classmethod
    def empty(cls, points: Iterable[int]):
        return cls(frozenset(points), ())

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.mapping)

    def __call__(self, x):
        return self.as_dict.get(x)

    @property
    def domain(self) -> frozenset:
        return frozenset(x for x, _ in self.mapping)

    @property
    def range(self) -> frozenset:
        return frozenset(y for _, y in self.mapping)

    @property
    def rank(self) -> int:
        return len(self.mapping)

    def inverse(self) -> "PartialPermutation":
        return PartialPermutation(self.points, tuple((y, x) for x, y in self.mapping))

    def __mul__(self, other: "PartialPermutation") -> "PartialPermutation":
        return compose_pp(self, other)

    def __str__(self):
        if not self.mapping:
            return "0"
        return "(" + ",".join(f"{x}>{y}" for x, y in self.mapping) + ")"


def compose_pp(f: PartialPermutation, g: PartialPermutation) -> PartialPermutation:
    """Return ``x -> f(g(x))``, defined where ``g(x)`` is defined and in ``dom f``."""
    if f.points != g.points:
        raise ValueError("partial permutations live on different point sets")
    fd = f.as_dict
    out = []
    for x, y in g.mapping:
        z = fd.get(y)
        if z is not None:
            out.append((x, z))
    return PartialPermutation(f.points, tuple(out))


def _pp_rows(pps: Sequence[PartialPermutation], points: Sequence[int]) -> np.ndarray:
    pos = {p: i for i, p in enumerate(points)}
    rows = np.full((len(pps), len(points)), -1, dtype=np.int64)
    for k, f in enumerate(pps):
        for x, y in f.mapping:
            rows[k, pos[x]] = pos[y]
    return rows


def _compose_rows(rows: np.ndarray, j: int) -> np.ndarray:
    ext = np.concatenate([rows, np.full((len(rows), 1), -1, dtype=rows.dtype)], axis=1)
    # index -1 selects the appended undefined column
    return ext[:, rows[j]]


# ---------------------------------------------------------------------------
# the table container


class FiniteInverseSemigroup:
    """A finite semigroup with involution and zero, stored as integer tables.

    No algebraic validation happens here (see :func:`verify_inverse_semigroup`);
    only shapes and index ranges are checked.  A ``zero`` other than 0 is moved
    to index 0 by swapping it with element 0.
    """

    def __init__(self, mul, inv, zero: int = 0, labels: Sequence[str] | None = None):
        mul = np.array(mul, dtype=np.int64)
        inv = np.array(inv, dtype=np.int64)
        n = len(inv)
        if n < 1 or mul.shape != (n, n):
            raise ValueError(f"mul must be {n}x{n}, got {mul.shape}")
        if mul.min() < 0 or mul.max() >= n or inv.min() < 0 or inv.max() >= n:
            raise ValueError("table entries out of range")
        if not 0 <= zero < n:
            raise ValueError("zero out of range")
        labels = [str(i) for i in range(n)] if labels is None else [str(x) for x in labels]
        if len(labels) != n:
            raise ValueError("wrong number of labels")
        if zero != 0:
            perm = np.arange(n)
            perm[0], perm[zero] = zero, 0
            # perm is an involution: new index i holds old element perm[i]
            mul = perm[mul[np.ix_(perm, perm)]]
            inv = perm[inv[perm]]
            labels = [labels[p] for p in perm]
        mul.setflags(write=False)
        inv.setflags(write=False)
        self.mul = mul
        self.inv = inv
        self.labels = tuple(labels)

    zero = 0

    @property
    def size(self) -> int:
        return len(self.inv)

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FiniteInverseSemigroup(size={self.size})"

    def label(self, a: int) -> str:
        return self.labels[a]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def __eq__(self, other):
        if not isinstance(other, FiniteInverseSemigroup):
            return NotImplemented
        return (np.array_equal(self.mul, other.mul) and np.array_equal(self.inv, other.inv)
                and self.labels == other.labels)

    __hash__ = object.__hash__

    @cached_property
    def d(self) -> np.ndarray:
        """Domain idempotents ``a^-1 a``."""
        out = self.mul[self.inv, np.arange(self.size)]
        out.setflags(write=False)
        return out

    @cached_property
    def r(self) -> np.ndarray:
        """Range idempotents ``a a^-1``."""
        out = self.mul[np.arange(self.size), self.inv]
        out.setflags(write=False)
        return out

    @cached_property
    def idempotent_mask(self) -> np.ndarray:
        n = self.size
        out = self.mul[np.arange(n), np.arange(n)] == np.arange(n)
        out.setflags(write=False)
        return out

    @cached_property
    def idempotents(self) -> np.ndarray:
        out = np.flatnonzero(self.idempotent_mask)
        out.setflags(write=False)
        return out

    def is_idempotent(self, a: int) -> bool:
        return bool(self.idempotent_mask[a])

    @cached_property
    def leq(self) -> np.ndarray:
        """``leq[a, b]`` iff ``a <= b`` in the natural partial order (``a = b d(a)``)."""
        n = self.size
        out = self.mul[:, self.d].T == np.arange(n)[:, None]
        out.setflags(write=False)
        return out

    @cached_property
    def down_size(self) -> np.ndarray:
        return self.leq.sum(axis=0)

    @cached_property
    def compatible_matrix(self) -> np.ndarray:
        idem = self.idempotent_mask
        out = idem[self.mul[self.inv, :]] & idem[self.mul[:, self.inv]]
        out.setflags(write=False)
        return out

    @cached_property
    def orthogonal_matrix(self) -> np.ndarray:
        out = (self.mul[self.inv, :] == 0) & (self.mul[:, self.inv] == 0)
        out.setflags(write=False)
        return out


# ---------------------------------------------------------------------------
# construction


def from_partial_permutations(pps: Sequence[PartialPermutation], labels=None):
    """Abstract table of a composition-closed set of partial permutations.

    The empty map must be present; it becomes index 0.  Returns
    ``(semigroup, elements)`` with ``elements[i]`` the map at index ``i``.
    """
    pps = list(pps)
    if not pps:
        raise ValueError("empty set of partial permutations")
    points = sorted(pps[0].points)
    empties = [i for i, f in enumerate(pps) if f.rank == 0]
    if not empties:
        raise ValueError("the empty map must be present")
    z = empties[0]
    order = [z] + [i for i in range(len(pps)) if i != z]
    pps = [pps[i] for i in order]
    if labels is not None:
        labels = [labels[i] for i in order]
    else:
        labels = [str(f) for f in pps]
    rows = _pp_rows(pps, points)
    mul = table_from_rows(rows, _compose_rows)
    index = RowIndex(rows, len(points))
    inv_rows = np.full_like(rows, -1)
    for k, f in enumerate(pps):
        g = f.inverse()
        inv_rows[k] = _pp_rows([g], points)[0]
    inv = index.lookup(inv_rows)
    if np.any(inv < 0):
        raise ValueError("set is not closed under inverses")
    return FiniteInverseSemigroup(mul, inv, 0, labels), pps


def generate(gens: Iterable[PartialPermutation], max_elements: int = DEFAULT_MAX_ELEMENTS):
    """Close ``gens``, their inverses and the empty map under composition.

    Returns ``(semigroup, elements)``; elements are ordered by rank and then by
    their graphs, so the empty map is the zero at index 0.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    points = gens[0].points
    if any(g.points != points for g in gens):
        raise ValueError("generators live on different point sets")
    letters = list(dict.fromkeys(gens + [g.inverse() for g in gens]))
    seen = set(letters) | {PartialPermutation.empty(points)}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for g in letters:
            y = compose_pp(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > max_elements:
                    raise ClosureBudgetExceeded(
                        f"closure exceeds {max_elements} elements")
                queue.append(y)
    elements = sorted(seen, key=lambda f: (f.rank, f.mapping))
    return from_partial_permutations(elements)


def symmetric_inverse_semigroup(n: int):
    """``I_n`` on points ``1..n``; returns ``(semigroup, elements)``."""
    points = range(1, n + 1)
    elements = []
    for k in range(n + 1):
        for dom in itertools.combinations(points, k):
            for img in itertools.permutations(points, k):
                elements.append(PartialPermutation(frozenset(points), tuple(zip(dom, img))))
    elements.sort(key=lambda f: (f.rank, f.mapping))
    return from_partial_permutations(elements)


def boolean_algebra(n: int) -> FiniteInverseSemigroup:
    """The power set of ``{1..n}`` under intersection (a commutative BIS)."""
    masks = sorted(range(1 << n), key=lambda m: (bin(m).count("1"), m))
    pos = {m: i for i, m in enumerate(masks)}
    mul = [[pos[a & b] for b in masks] for a in masks]

    def name(m):
        bits = [str(i + 1) for i in range(n) if m >> i & 1]
        return "{" + ",".join(bits) + "}" if bits else "0"

    return FiniteInverseSemigroup(mul, list(range(len(masks))), 0, [name(m) for m in masks])


def chain_semilattice(m: int) -> FiniteInverseSemigroup:
    """The chain ``0 < 1 < ... < m-1`` under ``min``."""
    mul = [[min(a, b) for b in range(m)] for a in range(m)]
    return FiniteInverseSemigroup(mul, list(range(m)), 0)


def cyclic_group(n: int) -> list[list[int]]:
    """Cayley table of ``Z_n`` with identity 0."""
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def group_with_zero(group: Sequence[Sequence[int]], labels=None) -> FiniteInverseSemigroup:
    """``G^0``: the group table shifted up by one with a zero adjoined at 0."""
    g = np.array(group, dtype=np.int64)
    m = len(g)
    e = next(i for i in range(m) if np.array_equal(g[i], np.arange(m)))
    mul = np.zeros((m + 1, m + 1), dtype=np.int64)
    mul[1:, 1:] = g + 1
    inv = [0] + [1 + int(np.flatnonzero(g[a] == e)[0]) for a in range(m)]
    if labels is None:
        labels = ["1" if a == e else f"g{a}" for a in range(m)]
    return FiniteInverseSemigroup(mul, inv, 0, ["0"] + list(labels))


def direct_sum(*semigroups: FiniteInverseSemigroup) -> FiniteInverseSemigroup:
    """Direct product with componentwise operations; the zero is ``(0, ..., 0)``.

    An element with a single nonzero coordinate ``x`` in summand ``k`` is
    labelled ``k:x``; general elements join such labels with ``+``.
    """
    sizes = tuple(s.size for s in semigroups)
    total = int(np.prod(sizes))
    coords = np.unravel_index(np.arange(total), sizes, order="F")
    mul = np.ravel_multi_index(
        [s.mul[c[:, None], c[None, :]] for s, c in zip(semigroups, coords)], sizes, order="F")
    inv = np.ravel_multi_index([s.inv[c] for s, c in zip(semigroups, coords)], sizes, order="F")
    labels = []
    for x in range(total):
        parts = [f"{k}:{s.label(int(c[x]))}" for k, (s, c) in enumerate(zip(semigroups, coords))
                 if c[x] != 0]
        labels.append("+".join(parts) if parts else "0")
    return FiniteInverseSemigroup(mul, inv, 0, labels)


def example_a() -> FiniteInverseSemigroup:
    """Four-element Boolean algebra ``{0,a,b,1}`` with an extra ``u``, ``u^2 = 1``.

    Products of ``u`` with ``0, a, b`` behave as if ``u`` were ``1``.  It is an
    inverse semigroup in which ``a`` and ``b`` are compatible with two
    incomparable upper bounds ``1`` and ``u``.
    """
    names = ["0", "a", "b", "1", "u"]
    e_mul = {("a", "b"): "0", ("a", "a"): "a", ("b", "b"): "b"}

    def meet(x, y):
        if x == "0" or y == "0":
            return "0"
        if x == "1":
            return y
        if y == "1":
            return x
        return e_mul.get((x, y)) or e_mul.get((y, x))

    def prod(x, y):
        if x == "u" and y == "u":
            return "1"
        if "u" in (x, y):
            other = y if x == "u" else x
            return "u" if other == "1" else meet(other, "1")
        return meet(x, y)

    mul = [[names.index(prod(x, y)) for y in names] for x in names]
    return FiniteInverseSemigroup(mul, [0, 1, 2, 3, 4], 0, names)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple

    def __str__(self):
        return f"{self.kind} {self.witness}"


def verify_inverse_semigroup(S: FiniteInverseSemigroup, check_associativity: bool | None = None):
    """List every violated invariant with a witness; empty list means valid.

    Associativity (O(n^3)) runs automatically up to 512 elements and only on
    request above that.
    """
    n = S.size
    mul, inv = S.mul, S.inv
    ar = np.arange(n)
    out: list[Violation] = []
    if check_associativity is None:
        check_associativity = n <= ASSOCIATIVITY_AUTO_LIMIT
    if check_associativity:
        for a in range(n):
            left = mul[mul[a, :], :]      # (ab)c
            right = mul[a, mul]           # a(bc)
            bad = np.argwhere(left != right)
            if len(bad):
                b, c = map(int, bad[0])
                out.append(Violation("associativity", (a, b, c)))
                break
    zrow = np.flatnonzero((mul[0, :] != 0) | (mul[:, 0] != 0))
    if len(zrow):
        out.append(Violation("zero", (int(zrow[0]),)))
    bad = np.flatnonzero(mul[mul[ar, inv], ar] != ar)
    if len(bad):
        out.append(Violation("regularity", (int(bad[0]), int(inv[bad[0]]))))
    bad = np.flatnonzero(inv[inv] != ar)
    if len(bad):
        out.append(Violation("involution", (int(bad[0]),)))
    # uniqueness: b with aba = a and bab = b must be exactly inv[a]
    for a in range(n):
        c1 = mul[mul[a, :], a] == a
        c2 = mul[mul[:, a], ar] == ar
        cands = np.flatnonzero(c1 & c2)
        if len(cands) != 1 or cands[0] != inv[a]:
            others = [int(x) for x in cands if x != inv[a]]
            out.append(Violation("unique_inverse", (a, int(inv[a]), *others[:1])))
            break
    E = np.flatnonzero(mul[ar, ar] == ar)
    sub = mul[np.ix_(E, E)]
    bad = np.argwhere(sub != sub.T)
    if len(bad):
        i, j = bad[0]
        out.append(Violation("idempotents_commute", (int(E[i]), int(E[j]))))
    return out


def natural_leq(S: FiniteInverseSemigroup, a: int, b: int) -> bool:
    """``a <= b`` iff ``a = b d(a)``; the dual ``a = r(a) b`` must agree."""
    one = int(S.mul[b, S.d[a]]) == a
    two = int(S.mul[S.r[a], b]) == a
    assert one == two, f"order characterizations disagree on ({a}, {b})"
    return one


def compatible(S: FiniteInverseSemigroup, a: int, b: int) -> bool:
    mul, inv = S.mul, S.inv
    definitional = S.is_idempotent(mul[inv[a], b]) and S.is_idempotent(mul[a, inv[b]])
    lemma = (mul[S.r[a], b] == mul[S.r[b], a]) and (mul[b, S.d[a]] == mul[a, S.d[b]])
    assert definitional == bool(lemma), f"compatibility tests disagree on ({a}, {b})"
    return definitional


def orthogonal(S: FiniteInverseSemigroup, a: int, b: int) -> bool:
    mul, inv = S.mul, S.inv
    definitional = mul[inv[a], b] == 0 and mul[a, inv[b]] == 0
    lemma = mul[S.r[a], S.r[b]] == 0 and mul[S.d[a], S.d[b]] == 0
    assert bool(definitional) == bool(lemma), f"orthogonality tests disagree on ({a}, {b})"
    return bool(definitional)


# ---------------------------------------------------------------------------
# Green's relations


@dataclass(frozen=True)
class GreenData:
    d: np.ndarray
    r: np.ndarray
    classes: tuple            # D-classes of idempotents, zero class first
    class_of: np.ndarray      # element -> index of the D-class of d(element)

    def same_class(self, e: int, f: int) -> bool:
        return bool(self.class_of[e] == self.class_of[f])


def green_d_classes(S: FiniteInverseSemigroup) -> GreenData:
    """Partition ``E(S)``: ``e ~ f`` iff some ``s`` has ``d(s) = e`` and ``r(s) = f``."""
    reach: dict[int, set] = {int(e): set() for e in S.idempotents}
    for s in range(S.size):
        reach[int(S.d[s])].add(int(S.r[s]))
    seen = set()
    classes = []
    for e in sorted(reach):
        if e in seen:
            continue
        cls = tuple(sorted(reach[e]))
        seen.update(cls)
        classes.append(cls)
    classes.sort(key=lambda c: c[0])
    lookup = np.full(S.size, -1, dtype=np.int64)
    for k, cls in enumerate(classes):
        lookup[list(cls)] = k
    class_of = lookup[S.d]
    class_of.setflags(write=False)
    return GreenData(S.d, S.r, tuple(classes), class_of)


def _row_labels(mask: np.ndarray) -> np.ndarray:
    _, labels = np.unique(mask, axis=0, return_inverse=True)
    return labels.reshape(-1)


def green_l_labels(S: FiniteInverseSemigroup) -> np.ndarray:
    """Class labels of ``L`` computed from principal left ideals ``S^1 a``."""
    n = S.size
    mask = np.zeros((n, n), dtype=bool)
    for a in range(n):
        mask[a, S.mul[:, a]] = True
        mask[a, a] = True
    return _row_labels(mask)


def green_r_labels(S: FiniteInverseSemigroup) -> np.ndarray:
    n = S.size
    mask = np.zeros((n, n), dtype=bool)
    for a in range(n):
        mask[a, S.mul[a, :]] = True
        mask[a, a] = True
    return _row_labels(mask)


# ---------------------------------------------------------------------------
# lemma-level checks (exhaustive)


@dataclass(frozen=True)
class Check:
    ok: bool
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def _first(mask) -> tuple:
    idx = np.argwhere(mask)
    return tuple(int(x) for x in idx[0]) if len(idx) else ()


def core_lemma_report(S: FiniteInverseSemigroup) -> dict[str, Check]:
    """Exhaustively check order, domain/range and compatibility facts on ``S``."""
    n = S.size
    mul, inv, d, r = S.mul, S.inv, S.d, S.r
    out = {}
    D = d[mul]
    R = r[mul]
    bad = (mul[D, d[None, :]] != D) | (mul[R, r[:, None]] != R)
    out["dom1"] = Check(not bad.any(), _first(bad))

    leq = S.leq
    alt = mul[r, :] == np.arange(n)[:, None]
    out["order_characterizations"] = Check(bool(np.array_equal(leq, alt)), _first(leq != alt))
    li = leq.astype(np.float32)
    trans = (li @ li) > 0
    bad = (trans & ~leq) | (leq & leq.T & ~np.eye(n, dtype=bool))
    if not np.diag(leq).all():
        a = int(np.flatnonzero(~np.diag(leq))[0])
        bad[a, a] = True
    out["partial_order"] = Check(not bad.any(), _first(bad))
    bad = leq & ~(leq[np.ix_(d, d)] & leq[np.ix_(r, r)])
    out["order_monotone_d_r"] = Check(not bad.any(), _first(bad))

    comp = S.compatible_matrix
    lem = (mul[r, :] == mul[r, :].T) & (mul[:, d].T == mul[:, d])
    out["comp"] = Check(bool(np.array_equal(comp, lem)), _first(comp != lem))
    orth = S.orthogonal_matrix
    lem = (mul[np.ix_(r, r)] == 0) & (mul[np.ix_(d, d)] == 0)
    out["ort"] = Check(bool(np.array_equal(orth, lem)), _first(orth != lem))
    bad = orth & ~comp
    out["orthogonal_implies_compatible"] = Check(not bad.any(), _first(bad))
    return out


# ---------------------------------------------------------------------------
# isomorphism search


def _element_invariants(S: FiniteInverseSemigroup) -> list[tuple]:
    g = green_d_classes(S)
    sizes = np.array([len(c) for c in g.classes])
    idem = S.idempotent_mask
    up = S.leq.sum(axis=1)
    down = S.down_size
    return [(bool(idem[a]), int(down[a]), int(up[a]), int(sizes[g.class_of[a]]),
             int(S.inv[a] == a), bool(idem[S.mul[a, a]])) for a in range(S.size)]


def _generating_set(S: FiniteInverseSemigroup) -> list[int]:
    order = sorted(range(1, S.size), key=lambda a: (-int(S.down_size[a]), a))
    gens: list[int] = []
    closed = np.zeros(S.size, dtype=bool)
    closed[0] = True
    for a in order:
        if closed[a]:
            continue
        gens.append(a)
        letters = gens + [int(S.inv[g]) for g in gens]
        members = set(np.flatnonzero(closed).tolist()) | set(letters)
        queue = deque(members)
        while queue:
            x = queue.popleft()
            for g in letters:
                y = int(S.mul[x, g])
                if y not in members:
                    members.add(y)
                    queue.append(y)
        closed[list(members)] = True
        if closed.all():
            break
    return gens


def find_isomorphism(S: FiniteInverseSemigroup, T: FiniteInverseSemigroup):
    """Backtracking search for an isomorphism ``S -> T``; ``None`` if there is none.

    Candidates are pruned by order and D-class statistics and images are
    propagated through products of a small generating set.
    """
    if S.size != T.size:
        return None
    inv_s, inv_t = _element_invariants(S), _element_invariants(T)
    if sorted(inv_s) != sorted(inv_t):
        return None
    by_inv: dict[tuple, list[int]] = {}
    for b, key in enumerate(inv_t):
        by_inv.setdefault(key, []).append(b)
    gens = _generating_set(S)

    def extend(phi: dict, used: set, letters: list[int]):
        phi = dict(phi)
        used = set(used)
        queue = deque(phi)
        while queue:
            x = queue.popleft()
            for g in letters:
                for y, img in ((int(S.mul[x, g]), int(T.mul[phi[x], phi[g]])),
                               (int(S.mul[g, x]), int(T.mul[phi[g], phi[x]]))):
                    if y in phi:
                        if phi[y] != img:
                            return None
                    else:
                        if img in used or inv_s[y] != inv_t[img]:
                            return None
                        phi[y] = img
                        used.add(img)
                        queue.append(y)
        return phi, used

    def search(k: int, phi: dict, used: set):
        if k == len(gens):
            if len(phi) != S.size:
                return None
            iso = np.array([phi[a] for a in range(S.size)], dtype=np.int64)
            if np.array_equal(iso[S.mul], T.mul[np.ix_(iso, iso)]):
                return iso
            return None
        g = gens[k]
        if g in phi:
            return search(k + 1, phi, used)
        for cand in by_inv[inv_s[g]]:
            if cand in used:
                continue
            trial = dict(phi)
            trial[g] = cand
            gi, ci = int(S.inv[g]), int(T.inv[cand])
            if gi in trial and trial[gi] != ci:
                continue
            if gi not in trial and ci in used | {cand} and gi != g:
                continue
            trial[gi] = ci
            letters = sorted({x for x in gens[:k + 1]} | {int(S.inv[x]) for x in gens[:k + 1]})
            res = extend(trial, set(trial.values()), letters)
            if res is None:
                continue
            found = search(k + 1, *res)
            if found is not None:
                return found
        return None

    return search(0, {0: 0}, {0})


def is_isomorphic(S: FiniteInverseSemigroup, T: FiniteInverseSemigroup) -> bool:
    return find_isomorphism(S, T) is not None
