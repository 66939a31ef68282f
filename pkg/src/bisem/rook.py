"""Generalized rook matrices over a Boolean inverse semigroup, truncated to ``k x k``.

A finite Boolean inverse semigroup is a monoid, so ``M_k(S)`` is the corner
of ``M_omega(S)`` cut out by ``Delta(1, ..., 1)``; Green's D on idempotents of
the corner agrees with D in the whole semigroup.  That is what makes checks
at truncation ``k`` meaningful evidence for statements about ``M_omega(S)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ._tables import RowIndex, table_from_rows
from .boolean import BooleanInverseSemigroup, certify, check_additive
from .core import DEFAULT_MAX_ELEMENTS, Check, SizeBudgetExceeded, green_d_classes
from .typemonoid import Budget, Inconclusive, decide_equal, int_monoid, typ

MAX_DIM_LARGE = 3


@dataclass(frozen=True)
class GeneralizedRookMatrix:
    """``k x k`` matrix of element indices of ``S``.

    Same-row entries have orthogonal ranges and same-column entries have
    orthogonal domains.
    """

    k: int
    entries: tuple

    @classmethod
    def make(cls, S: BooleanInverseSemigroup, rows) -> "GeneralizedRookMatrix":
        A = cls(len(rows), tuple(tuple(int(x) for x in row) for row in rows))
        bad = A.violation(S)
        if bad:
            raise ValueError(f"not a generalized rook matrix: {bad}")
        return A

    def violation(self, S) -> tuple:
        mul, d, r = S.base.mul, S.base.d, S.base.r
        for i in range(self.k):
            for j in range(self.k):
                for jj in range(j + 1, self.k):
                    if mul[r[self.entries[i][j]], r[self.entries[i][jj]]] != 0:
                        return ("row", i, j, jj)
                    if mul[d[self.entries[j][i]], d[self.entries[jj][i]]] != 0:
                        return ("column", i, j, jj)
        return ()

    def inverse(self, S) -> "GeneralizedRookMatrix":
        inv = S.base.inv
        return GeneralizedRookMatrix(self.k, tuple(tuple(int(inv[self.entries[j][i]])
                                                         for j in range(self.k))
                                                   for i in range(self.k)))

    def label(self, S) -> str:
        return "[" + ";".join(" ".join(S.base.label(x) for x in row) for row in self.entries) + "]"


def grm_multiply(S: BooleanInverseSemigroup, A: GeneralizedRookMatrix,
                 B: GeneralizedRookMatrix) -> GeneralizedRookMatrix:
    """``c_ij`` is the join over ``t`` of ``a_it b_tj``; the terms must be pairwise orthogonal."""
    mul, O = S.base.mul, S.base.orthogonal_matrix
    k = A.k
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            terms = [int(mul[A.entries[i][t], B.entries[t][j]]) for t in range(k)]
            for x in range(k):
                for y in range(x + 1, k):
                    assert O[terms[x], terms[y]], "terms of a matrix product are not orthogonal"
            row.append(S.join_many(terms))
        out.append(row)
    C = GeneralizedRookMatrix(k, tuple(tuple(r) for r in out))
    assert not C.violation(S), "product is not a generalized rook matrix"
    return C


@dataclass(frozen=True, eq=False)
class GrmSemigroup:
    S: BooleanInverseSemigroup
    k: int
    B: BooleanInverseSemigroup
    entries: np.ndarray            # (size, k, k)

    @property
    def size(self) -> int:
        return self.B.base.size

    def matrix(self, a: int) -> GeneralizedRookMatrix:
        return GeneralizedRookMatrix(self.k, tuple(tuple(int(x) for x in r) for r in self.entries[a]))

    def index(self, A) -> int:
        rows = A.entries if isinstance(A, GeneralizedRookMatrix) else A
        flat = np.asarray(rows, dtype=np.int64).reshape(1, -1)
        out = int(self._index.lookup(flat)[0])
        if out < 0:
            raise KeyError("matrix is not in the semigroup")
        return out

    def delta(self, *diag) -> int:
        """Index of ``Delta(a_1, ..., a_n)``, padded with zeros."""
        if len(diag) > self.k:
            raise ValueError("too many diagonal entries")
        rows = np.zeros((self.k, self.k), dtype=np.int64)
        for i, a in enumerate(diag):
            rows[i, i] = a
        return self.index(rows)

    @property
    def _index(self) -> RowIndex:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = RowIndex(self.entries.reshape(self.size, -1), self.S.base.size)
            object.__setattr__(self, "_idx", idx)
        return idx


def _enumerate(S: BooleanInverseSemigroup, k: int, max_elements: int) -> np.ndarray:
    base = S.base
    n = base.size
    zero_r = base.mul[np.ix_(base.r, base.r)] == 0
    zero_d = base.mul[np.ix_(base.d, base.d)] == 0
    out: list[np.ndarray] = []
    cur = np.zeros((k, k), dtype=np.int64)
    cells = [(i, j) for i in range(k) for j in range(k)]
    allx = np.arange(n)

    def rec(c):
        if c == len(cells):
            out.append(cur.copy())
            if len(out) > max_elements:
                raise SizeBudgetExceeded(f"more than {max_elements} rook matrices")
            return
        i, j = cells[c]
        ok = np.ones(n, dtype=bool)
        for jj in range(j):
            ok &= zero_r[allx, cur[i, jj]]
        for ii in range(i):
            ok &= zero_d[allx, cur[ii, j]]
        for x in np.flatnonzero(ok):
            cur[i, j] = x
            rec(c + 1)
        cur[i, j] = 0

    rec(0)
    return np.array(out, dtype=np.int64).reshape(len(out), k, k)


def _grm_compose(S: BooleanInverseSemigroup, k: int):
    mul, J, O = S.base.mul, S.join_table, S.base.orthogonal_matrix

    def compose(rows, j):
        A = rows.reshape(len(rows), k, k)
        Bm = rows[j].reshape(k, k)
        C = np.zeros_like(A)
        for a in range(k):
            for b in range(k):
                terms = [mul[A[:, a, t], Bm[t, b]] for t in range(k)]
                acc = terms[0]
                for t in range(1, k):
                    assert O[acc, terms[t]].all(), "terms of a matrix product are not orthogonal"
                    acc = J[acc, terms[t]]
                C[:, a, b] = acc
        return C.reshape(len(rows), -1)

    return compose


def grm_semigroup(S: BooleanInverseSemigroup, k: int = 2,
                  max_elements: int = DEFAULT_MAX_ELEMENTS) -> GrmSemigroup:
    """All ``k x k`` generalized rook matrices over ``S`` as a certified Boolean inverse semigroup.

    Asserts that idempotents are the diagonal matrices with idempotent entries
    and that the natural order is entrywise.
    """
    if k < 1:
        raise ValueError("dimension must be positive")
    if S.base.size > 7 and k > MAX_DIM_LARGE:
        raise ValueError(f"dimension above {MAX_DIM_LARGE} needs |S| <= 7")
    ent = _enumerate(S, k, max_elements)
    rows = ent.reshape(len(ent), -1)
    mul = table_from_rows(rows, _grm_compose(S, k))
    inv_rows = S.base.inv[ent.transpose(0, 2, 1)].reshape(len(ent), -1)
    inv = RowIndex(rows, S.base.size).lookup(inv_rows)
    from .core import FiniteInverseSemigroup

    labels = ["[" + ";".join(" ".join(S.base.label(x) for x in r) for r in M) + "]" for M in ent]
    T = FiniteInverseSemigroup(mul, inv, 0, labels)
    B = certify(T)
    off = ~np.eye(k, dtype=bool)
    diag_idem = (ent[:, off] == 0).all(axis=1) & S.base.idempotent_mask[
        ent[:, np.arange(k), np.arange(k)]].all(axis=1)
    assert np.array_equal(diag_idem, T.idempotent_mask), "idempotents are not the idempotent diagonals"
    entrywise = S.base.leq[ent.reshape(len(ent), -1)[:, None, :],
                           ent.reshape(len(ent), -1)[None, :, :]].all(axis=2)
    assert np.array_equal(entrywise, T.leq), "natural order is not entrywise"
    return GrmSemigroup(S, k, B, ent)


# ---------------------------------------------------------------------------
# lemmas on D


def _d_related(M: GrmSemigroup):
    green = green_d_classes(M.B.base)
    return lambda a, b: green.class_of[a] == green.class_of[b]


def _diag_idempotents(M: GrmSemigroup) -> list[tuple[int, tuple]]:
    """``(index, diagonal)`` for every idempotent of ``M_k(S)``."""
    k = M.k
    out = []
    for a in M.B.base.idempotents:
        out.append((int(a), tuple(int(M.entries[a, i, i]) for i in range(k))))
    return out


def verify_d_lemmas(M: GrmSemigroup) -> dict[str, Check]:
    """Exhaustive checks of the three D-lemmas inside ``M_k(S)``."""
    S, k = M.S, M.k
    base = S.base
    mul = M.B.base.mul
    minv = M.B.base.inv
    dr = _d_related(M)
    out = {}
    diags = _diag_idempotents(M)
    # Delta-with-gaps is D-related to the packed Delta, via b_{i, k_i} = e_i
    bad = ()
    for a, diag in diags:
        pos = [i for i, e in enumerate(diag) if e != 0]
        es = [diag[i] for i in pos]
        W = np.zeros((k, k), dtype=np.int64)
        for i, (p, e) in enumerate(zip(pos, es)):
            W[i, p] = e
        w = M.index(W)
        packed = M.delta(*es)
        if mul[minv[w], w] != a or mul[w, minv[w]] != packed or not dr(a, packed):
            bad = (a,)
            break
    same = ()
    for a, da in diags:
        for b, db in diags:
            if [e for e in da if e] == [e for e in db if e] and not dr(a, b):
                same = (a, b)
                break
        if same:
            break
    out["lem_D"] = Check(not bad and not same, bad or same)
    # D-related entries give D-related diagonals, via Delta(s_1, ..., s_n)
    green = green_d_classes(base)
    E = base.idempotents
    witness_of = {}
    for s in range(base.size):
        witness_of.setdefault((int(base.d[s]), int(base.r[s])), s)
    bad = ()
    for n in range(1, k + 1):
        for es in product(E, repeat=n):
            for fs in product(*[[f for f in E if green.class_of[f] == green.class_of[e]] for e in es]):
                s = [witness_of[(int(e), int(f))] for e, f in zip(es, fs)]
                A = M.delta(*s)
                x, y = M.delta(*es), M.delta(*fs)
                if mul[minv[A], A] != x or mul[A, minv[A]] != y or not dr(x, y):
                    bad = (tuple(int(e) for e in es), tuple(int(f) for f in fs))
                    break
            if bad:
                break
        if bad:
            break
    out["lem_d1"] = Check(not bad, bad)
    # [Delta(e)] + [Delta(f)] = [Delta(e, f)] when everything fits in k
    I = int_monoid(M.B)
    cls = I.class_of
    bad = ()
    for n in range(0, k + 1):
        for m in range(0, k - n + 1):
            for es in product(E, repeat=n):
                for fs in product(E, repeat=m):
                    x, y = M.delta(*es), M.delta(*fs)
                    z = M.delta(*es, *fs)
                    if I.pcm.add[cls[x], cls[y]] != cls[z]:
                        bad = (tuple(int(e) for e in es), tuple(int(f) for f in fs))
    total_within = _total_on_small(I, M)
    out["lem_d2"] = Check(not bad and total_within, bad)
    return out


def _total_on_small(I, M: GrmSemigroup) -> bool:
    """Classes of diagonals using at most ``k - j`` and ``j`` positions always add."""
    k = M.k
    nz = {}
    for a, diag in _diag_idempotents(M):
        c = int(I.class_of[a])
        nz[c] = min(nz.get(c, k), sum(e != 0 for e in diag))
    for p, sp in nz.items():
        for q, sq in nz.items():
            if sp + sq <= k and I.pcm.add[p, q] < 0:
                return False
    return True


# ---------------------------------------------------------------------------
# the type theorem at truncation k


@dataclass(frozen=True)
class TypeTheoremReport:
    k: int
    well_defined: Check
    soundness: Check
    completeness: Check
    distinctness: Check
    equalities: int               # number of D-equalities among diagonals examined
    unknown: int

    def __bool__(self):
        return bool(self.well_defined and self.soundness and self.completeness and self.distinctness)


def _vector(S_int, diag, k_gen) -> tuple:
    v = [0] * k_gen
    for e in diag:
        c = int(S_int.class_of[e])
        if c:
            v[c - 1] += 1
    return tuple(v)


def verify_type_theorem(M: GrmSemigroup, budget: Budget | None = None) -> TypeTheoremReport:
    """Relate ``Typ(S)`` to ``Int(M_k(S))`` through ``[e] -> [Delta(e)]``.

    * well defined: D-related idempotents of ``S`` give D-related ``Delta(e)``;
    * soundness: each defining relation ``[e] + [f] = [e + f]`` holds, with the
      witness matrix ``[[e, 0], [f, 0]]`` (needs ``k >= 2``);
    * completeness: two diagonal idempotents that are D-related in ``M_k(S)``
      have equal vectors in ``Typ(S)`` (decided by :func:`decide_equal`);
    * distinctness: equal vectors force D-related diagonals.

    The last two are bounded evidence at dimension ``k``, not a proof for
    ``M_omega``.  Raises :class:`Inconclusive` on an unknown verdict.
    """
    S, k = M.S, M.k
    base = S.base
    pres = typ(S)
    SI = int_monoid(S)
    MI = int_monoid(M.B)
    mul, minv = M.B.base.mul, M.B.base.inv
    E = base.idempotents
    img = {}
    bad = ()
    for e in E:
        c, t = int(SI.class_of[e]), int(MI.class_of[M.delta(e)])
        if img.setdefault(c, t) != t:
            bad = (int(e),)
    well = Check(not bad, bad)
    bad = ()
    if k >= 2:
        for p in range(1, SI.pcm.size):
            for q in range(1, SI.pcm.size):
                r = int(SI.pcm.add[p, q])
                if r < 0:
                    continue
                e, f = _orthogonal_reps(S, SI, p, q)
                W = np.zeros((k, k), dtype=np.int64)
                W[0, 0], W[1, 0] = e, f
                A = M.index(W)
                ok = (mul[A, minv[A]] == M.delta(e, f)
                      and mul[minv[A], A] == M.delta(S.join(e, f))
                      and MI.pcm.add[img[p], img[q]] == img[r]
                      and MI.class_of[M.delta(e, f)] == img[r])
                if not ok:
                    bad = bad or (p, q, r)
    sound = Check(not bad, bad)
    diags = _diag_idempotents(M)
    vecs = [_vector(SI, diag, pres.k) for _, diag in diags]
    classes = [int(MI.class_of[a]) for a, _ in diags]
    bad_c, bad_d, eqs, unknown = (), (), 0, 0
    cache = {}
    for x in range(len(diags)):
        for y in range(x + 1, len(diags)):
            key = (vecs[x], vecs[y])
            if key not in cache:
                cache[key] = decide_equal(pres, vecs[x], vecs[y], budget)
            verdict = cache[key]
            if verdict.kind == "unknown":
                unknown += 1
                continue
            same_class = classes[x] == classes[y]
            eqs += same_class
            if same_class and not verdict.equal:
                bad_c = bad_c or (diags[x][0], diags[y][0])
            if verdict.equal and not same_class:
                bad_d = bad_d or (diags[x][0], diags[y][0])
    if unknown:
        raise Inconclusive(f"{unknown} word problems undecided within budget")
    return TypeTheoremReport(k, well, sound, Check(not bad_c, bad_c), Check(not bad_d, bad_d),
                             eqs, unknown)


def _orthogonal_reps(S, SI, p, q):
    E = S.base.idempotents
    cls = SI.class_of
    for e in E[cls[E] == p]:
        for f in E[cls[E] == q]:
            if S.base.mul[e, f] == 0:
                return int(e), int(f)
    raise AssertionError("sum defined without orthogonal representatives")


# ---------------------------------------------------------------------------
# the diagonal embedding


def delta_embedding(M: GrmSemigroup) -> np.ndarray:
    return np.array([M.delta(s) for s in range(M.S.base.size)], dtype=np.int64)


def check_delta_embedding(M: GrmSemigroup) -> Check:
    """``s -> Delta(s)`` is an injective additive homomorphism."""
    h = delta_embedding(M)
    if len(np.unique(h)) != len(h):
        return Check(False, ("not injective",))
    bad = h[M.S.base.mul] != M.B.base.mul[h[:, None], h[None, :]]
    if bad.any():
        return Check(False, tuple(int(x) for x in np.argwhere(bad)[0]))
    if not check_additive(h, M.S, M.B):
        return Check(False, ("not additive",))
    return Check(True)


def check_quasi_ideal(M: GrmSemigroup) -> Check:
    """``Delta(S) M_k(S) Delta(S) = Delta(S)``."""
    h = delta_embedding(M)
    mul = M.B.base.mul
    left = np.unique(mul[h[:, None], np.arange(M.size)[None, :]])
    both = np.unique(mul[left[:, None], h[None, :]])
    ok = set(both.tolist()) == set(h.tolist())
    return Check(ok, () if ok else tuple(sorted(set(both.tolist()) ^ set(h.tolist())))[:3])
