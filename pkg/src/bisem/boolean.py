"""Boolean inverse semigroup axioms, joins, complements and skew operations."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import Check, FiniteInverseSemigroup, Violation, _first, verify_inverse_semigroup

CACHE_LIMIT = 4096
JOIN_CHUNK = 20000


class NotCompatible(ValueError):
    def __init__(self, a, b):
        super().__init__(f"elements {a} and {b} are not compatible")
        self.pair = (a, b)


class NoJoin(ValueError):
    """Compatible elements without a least upper bound.

    ``upper_bounds`` is the set of all common upper bounds and ``minimal`` the
    antichain of its minimal elements.
    """

    def __init__(self, a, b, upper_bounds, minimal):
        super().__init__(f"no join of {a} and {b}; minimal upper bounds {sorted(minimal)}")
        self.pair = (a, b)
        self.upper_bounds = frozenset(int(x) for x in upper_bounds)
        self.minimal = frozenset(int(x) for x in minimal)


class NotBelow(ValueError):
    pass


class NotHomomorphism(ValueError):
    def __init__(self, witness):
        super().__init__(f"not a zero-preserving homomorphism; witness {witness}")
        self.witness = witness


# ---------------------------------------------------------------------------
# generalized Boolean algebra of idempotents


@dataclass(frozen=True, eq=False)
class GbaVerdict:
    ok: bool
    failure: str | None = None
    witness: tuple = ()
    ejoin: np.ndarray | None = None        # S-indexed; -1 off E x E
    complement: np.ndarray | None = None   # complement[f, e] = f \ e for e <= f

    def __bool__(self):
        return self.ok


def check_gba(S: FiniteInverseSemigroup) -> GbaVerdict:
    """Is ``(E(S), <=)`` a distributive lattice with 0 and relative complements?

    Meets are products of idempotents; joins are searched as least upper
    bounds inside ``E(S)``.
    """
    E = np.asarray(S.idempotents)
    m = len(E)
    loc = np.full(S.size, -1, dtype=np.int64)
    loc[E] = np.arange(m)
    leqE = S.leq[np.ix_(E, E)]
    down = leqE.sum(axis=0)
    meet = loc[S.mul[np.ix_(E, E)]]
    J = np.full((m, m), -1, dtype=np.int64)
    big = m + 1
    for i in range(m):
        U = leqE[i][None, :] & leqE
        cand = np.where(U, down[None, :], big).argmin(axis=1)
        ok = U.any(axis=1) & (U <= leqE[cand]).all(axis=1)
        J[i] = np.where(ok, cand, -1)
        if not ok.all():
            j = int(np.flatnonzero(~ok)[0])
            return GbaVerdict(False, "join", (int(E[i]), int(E[j])))
    lhs = meet[:, J]                              # x ^ (y v z)
    rhs = J[meet[:, :, None], meet[:, None, :]]   # (x ^ y) v (x ^ z)
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        x, y, z = bad[0]
        return GbaVerdict(False, "distributive", (int(E[x]), int(E[y]), int(E[z])))
    zero = int(loc[0])
    comp = np.full((m, m), -1, dtype=np.int64)
    for e in range(m):
        for g in np.flatnonzero(meet[:, e] == zero):
            comp[J[g, e], e] = g
    need = leqE.T  # need[f, e] iff e <= f
    bad = np.argwhere(need & (comp < 0))
    if len(bad):
        f, e = bad[0]
        return GbaVerdict(False, "complement", (int(E[e]), int(E[f])))
    ejoin = np.full((S.size, S.size), -1, dtype=np.int64)
    ejoin[np.ix_(E, E)] = E[J]
    complement = np.full((S.size, S.size), -1, dtype=np.int64)
    complement[np.ix_(E, E)] = np.where(comp >= 0, E[np.maximum(comp, 0)], -1)
    return GbaVerdict(True, ejoin=ejoin, complement=complement)


# ---------------------------------------------------------------------------
# joins


def _generic_join(S: FiniteInverseSemigroup, a: int, b: int) -> int:
    leq = S.leq
    ub = np.flatnonzero(leq[a] & leq[b])
    sub = leq[np.ix_(ub, ub)]
    minimal = [int(c) for k, c in enumerate(ub) if sub[:, k].sum() == 1]
    if len(minimal) == 1 and leq[minimal[0], ub].all():
        return minimal[0]
    raise NoJoin(a, b, ub, minimal)


class JoinIndex:
    """Join lookup for compatible pairs once (BIS1) holds.

    Every upper bound of ``a, b`` restricts to an upper bound with domain
    ``e = d(a) v d(b)``, and such an upper bound ``t`` is pinned down by the
    pair ``(t d(a), t (e \\ d(a)))``, which must equal ``(a, b (e \\ d(a)))``.
    So the join exists iff exactly one ``t`` with ``d(t) = e`` carries that key.
    """

    def __init__(self, S: FiniteInverseSemigroup, ejoin: np.ndarray, complement: np.ndarray):
        self.S = S
        self.ejoin = ejoin
        self.complement = complement
        n = S.size
        E = S.idempotents
        keys = []
        owners = []
        for e in E:
            ts = np.flatnonzero(S.d == e)
            for f in E[S.leq[E, e]]:
                keys.append(self._key(e, f, S.mul[ts, f], S.mul[ts, complement[e, f]]))
                owners.append(ts)
        keys = np.concatenate(keys)
        owners = np.concatenate(owners)
        order = np.argsort(keys, kind="stable")
        self._keys = keys[order]
        self._owners = owners[order]
        dup = np.zeros(len(keys), dtype=bool)
        same = self._keys[1:] == self._keys[:-1]
        dup[1:] |= same
        dup[:-1] |= same
        self._dup = dup
        self._n = n

    def _key(self, e, f, x, y):
        n = self.S.size
        return ((np.int64(e) * n + f) * n + x) * n + y

    def join(self, xs, ys) -> np.ndarray:
        """Joins of compatible pairs; -1 where there is no upper bound, -2 where it is not unique."""
        S = self.S
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        if len(xs) == 0:
            return np.zeros(0, dtype=np.int64)
        e = self.ejoin[S.d[xs], S.d[ys]]
        f = S.d[xs]
        key = self._key(e, f, xs, S.mul[ys, self.complement[e, f]])
        pos = np.minimum(np.searchsorted(self._keys, key), len(self._keys) - 1)
        found = self._keys[pos] == key
        out = np.where(found, np.where(self._dup[pos], -2, self._owners[pos]), -1)
        hit = out >= 0
        assert (S.leq[xs[hit], out[hit]] & S.leq[ys[hit], out[hit]]).all(), "join index returned a non-upper bound"
        return out


@dataclass(frozen=True)
class BisFailure:
    axiom: str
    witness: tuple
    detail: str = ""

    def __bool__(self):
        return False

    def __str__(self):
        return f"FAIL ({self.axiom}) witness {self.witness}" + (f" {self.detail}" if self.detail else "")


class BooleanInverseSemigroup:
    """A finite inverse semigroup certified to satisfy (BIS1) and (BIS2).

    Join, complement and skew tables are kept when the size is at most
    ``CACHE_LIMIT``; above that they are recomputed per query.
    """

    def __init__(self, base: FiniteInverseSemigroup, ejoin, complement, join_table, index=None):
        self.base = base
        self.index = index if index is not None else JoinIndex(base, ejoin, complement)
        self.ejoin = ejoin
        self.complement = complement
        self.join_table = join_table
        for t in (ejoin, complement, join_table):
            if t is not None:
                t.setflags(write=False)

    def __getattr__(self, name):
        # delegate table access (mul, inv, d, r, leq, labels, ...) to the base
        if name == "base":
            raise AttributeError(name)
        return getattr(self.base, name)

    def __len__(self):
        return self.base.size

    def __repr__(self):
        return f"BooleanInverseSemigroup(size={self.base.size})"

    @property
    def cached(self) -> bool:
        return self.join_table is not None

    def join(self, a: int, b: int) -> int:
        return join(self, a, b)

    def oplus(self, a: int, b: int) -> int:
        """Orthogonal join."""
        if not self.base.orthogonal_matrix[a, b]:
            raise ValueError(f"{a} and {b} are not orthogonal")
        return self.join(a, b)

    def join_many(self, elems) -> int:
        out = 0
        for x in elems:
            out = self.join(out, int(x))
        return out

    def meet_compatible(self, a: int, b: int) -> int:
        """``a ^ b = a d(b)`` for compatible ``a, b``."""
        if not self.base.compatible_matrix[a, b]:
            raise NotCompatible(a, b)
        return int(self.base.mul[a, self.base.d[b]])

    def meet(self, a: int, b: int) -> int:
        """Greatest lower bound by search."""
        leq = self.base.leq
        lb = np.flatnonzero(leq[:, a] & leq[:, b])
        top = lb[np.argmax(self.base.down_size[lb])]
        assert leq[lb, top].all(), "meet does not exist"
        return int(top)

    def ediff(self, f: int, e: int) -> int:
        """``f \\ (f e)`` for idempotents."""
        return int(self.complement[f, self.base.mul[f, e]])

    def relative_complement(self, s: int, u: int) -> int:
        return relative_complement(self, s, u)

    def skew_difference(self, a: int, b: int) -> int:
        if self.cached:
            return int(self.skew_difference_table[a, b])
        return skew_difference(self, a, b)

    def skew_join(self, a: int, b: int) -> int:
        if self.cached:
            return int(self.skew_join_table[a, b])
        return skew_join(self, a, b)

    @cached_property
    def skew_difference_table(self) -> np.ndarray:
        mul, d, r = self.base.mul, self.base.d, self.base.r
        comp = self.complement
        rc = comp[r[:, None], mul[r[:, None], r[None, :]]]
        dc = comp[d[:, None], mul[d[:, None], d[None, :]]]
        out = mul[mul[rc, np.arange(self.base.size)[:, None]], dc]
        out.setflags(write=False)
        return out

    @cached_property
    def skew_join_table(self) -> np.ndarray:
        sd = self.skew_difference_table
        b = np.broadcast_to(np.arange(self.base.size)[None, :], sd.shape)
        assert self.base.orthogonal_matrix[sd, b].all(), "skew difference not orthogonal to b"
        out = self.join_table[sd, b]
        out.setflags(write=False)
        return out


def check_bis(S: FiniteInverseSemigroup, cache_limit: int = CACHE_LIMIT):
    """Certify (BIS1) and (BIS2); return a :class:`BooleanInverseSemigroup` or a :class:`BisFailure`.

    (BIS2) is also rebuilt from orthogonal joins: for compatible ``a, b`` the
    element ``(a ^ b) + a(d(a) \\ d(b)) + b(d(b) \\ d(a))`` must equal ``a v b``.
    """
    if isinstance(S, BooleanInverseSemigroup):
        S = S.base
    bad = verify_inverse_semigroup(S)
    if bad:
        return BisFailure("inverse", bad[0].witness, bad[0].kind)
    gba = check_gba(S)
    if not gba:
        return BisFailure("BIS1", gba.witness, gba.failure)
    n = S.size
    mul, d, r = S.mul, S.d, S.r
    ejoin, comp = gba.ejoin, gba.complement
    compat = S.compatible_matrix
    index = JoinIndex(S, ejoin, comp)
    J = np.full((n, n), -1, dtype=np.int64) if n <= cache_limit else None
    orth = S.orthogonal_matrix
    pairs = np.argwhere(compat)
    for lo in range(0, len(pairs), JOIN_CHUNK):
        a, b = pairs[lo:lo + JOIN_CHUNK].T
        # minimal upper bounds of a, b all have domain d(a) v d(b): any upper
        # bound t restricts to t(d(a) v d(b)), which is again an upper bound
        js = index.join(a, b)
        if (js < 0).any():
            k = int(np.argmax(js < 0))
            x, y = int(a[k]), int(b[k])
            ub = np.flatnonzero(S.leq[x] & S.leq[y])
            sub = S.leq[np.ix_(ub, ub)]
            minimal = ub[sub.sum(axis=0) == 1]
            return BisFailure("BIS2", (x, y), f"upper bounds {sorted(int(t) for t in ub)}; "
                              f"minimal {sorted(int(t) for t in minimal)}")
        assert np.array_equal(d[js], ejoin[d[a], d[b]]), "d(a v b) != d(a) v d(b)"
        assert np.array_equal(r[js], ejoin[r[a], r[b]]), "r(a v b) != r(a) v r(b)"
        if J is not None:
            J[a, b] = js
        # (BIS2a) reconstruction
        m = mul[a, d[b]]
        c = mul[a, comp[d[a], mul[d[a], d[b]]]]
        e = mul[b, comp[d[b], mul[d[b], d[a]]]]
        assert orth[m, c].all() and orth[m, e].all() and orth[c, e].all(), \
            "(BIS2a) parts not orthogonal"
        rebuilt = index.join(index.join(m, c), e)
        assert np.array_equal(rebuilt, js), "(BIS2a) reconstruction disagrees with the join"
    E = S.idempotents
    if J is not None:
        assert np.array_equal(J[np.ix_(E, E)], ejoin[np.ix_(E, E)]), "E-join differs from S-join"
    return BooleanInverseSemigroup(S, ejoin, comp, J, index)


def certify(S: FiniteInverseSemigroup) -> BooleanInverseSemigroup:
    """Like :func:`check_bis` but raises ``ValueError`` on failure."""
    out = check_bis(S)
    if isinstance(out, BisFailure):
        raise ValueError(f"not a Boolean inverse semigroup: {out}")
    return out


def join(S, a: int, b: int) -> int:
    """Least upper bound of compatible ``a, b``.

    Works on any finite inverse semigroup; on a certified one the cached table
    is used.  Raises :class:`NotCompatible` or :class:`NoJoin`.
    """
    base = S.base if isinstance(S, BooleanInverseSemigroup) else S
    a, b = int(a), int(b)
    if not base.compatible_matrix[a, b]:
        raise NotCompatible(a, b)
    if isinstance(S, BooleanInverseSemigroup) and S.join_table is not None:
        c = int(S.join_table[a, b])
    else:
        c = _generic_join(base, a, b)
    d, r = base.d, base.r
    if isinstance(S, BooleanInverseSemigroup):
        assert d[c] == S.ejoin[d[a], d[b]] and r[c] == S.ejoin[r[a], r[b]]
    else:
        assert d[c] == _generic_join(base, int(d[a]), int(d[b]))
        assert r[c] == _generic_join(base, int(r[a]), int(r[b]))
    return c


def relative_complement(S: BooleanInverseSemigroup, s: int, u: int) -> int:
    """``s \\ u = s(d(s) \\ d(u))`` for ``u <= s``."""
    if not S.base.leq[u, s]:
        raise NotBelow(f"{u} is not below {s}")
    t = int(S.base.mul[s, S.complement[S.base.d[s], S.base.d[u]]])
    assert S.base.orthogonal_matrix[t, u], "complement not orthogonal"
    assert S.join(t, u) == s, "s != (s \\ u) + u"
    return t


def skew_difference(S: BooleanInverseSemigroup, a: int, b: int) -> int:
    """``(r(a) \\ r(b)) a (d(a) \\ d(b))``."""
    mul, d, r = S.base.mul, S.base.d, S.base.r
    left = S.ediff(int(r[a]), int(r[b]))
    right = S.ediff(int(d[a]), int(d[b]))
    out = int(mul[mul[left, a], right])
    assert S.base.orthogonal_matrix[out, b], "skew difference not orthogonal to b"
    return out


def skew_join(S: BooleanInverseSemigroup, a: int, b: int) -> int:
    """``(a (/) b) + b``."""
    return S.join(skew_difference(S, a, b), b)


def _join_pairs(S: BooleanInverseSemigroup, a, b) -> np.ndarray:
    if S.cached:
        return S.join_table[a, b]
    return S.index.join(a, b)


def check_additive(phi, S: BooleanInverseSemigroup, T: BooleanInverseSemigroup) -> Check:
    """Does the homomorphism ``phi`` (array over S) preserve orthogonal joins?

    Compatible joins are checked too and must give the same verdict.  Raises
    :class:`NotHomomorphism` if ``phi`` is not a zero-preserving homomorphism.
    """
    phi = np.asarray(phi, dtype=np.int64)
    if phi[0] != 0:
        raise NotHomomorphism((0,))
    bad = phi[S.base.mul] != T.base.mul[phi[:, None], phi[None, :]]
    if bad.any():
        raise NotHomomorphism(_first(bad))
    results = []
    for mask in (S.base.orthogonal_matrix, S.base.compatible_matrix):
        pairs = np.argwhere(mask)
        a, b = pairs[:, 0], pairs[:, 1]
        js = _join_pairs(S, a, b)
        tj = _join_pairs(T, phi[a], phi[b])
        bad = np.flatnonzero(phi[js] != tj)
        results.append(Check(len(bad) == 0, (int(a[bad[0]]), int(b[bad[0]])) if len(bad) else ()))
    assert results[0].ok == results[1].ok, "orthogonal and compatible additivity disagree"
    return results[0] if not results[0].ok else results[1]


# ---------------------------------------------------------------------------
# lemma-level checks


def boolean_lemma_report(S: BooleanInverseSemigroup) -> dict[str, Check]:
    """Exhaustive checks of the join, distributivity and skew identities."""
    base = S.base
    n = base.size
    mul, d, r = base.mul, base.d, base.r
    J = S.join_table
    out = {}
    pairs = np.argwhere(base.compatible_matrix)
    b, c = pairs[:, 0], pairs[:, 1]
    j = J[b, c]
    bad = (d[j] != S.ejoin[d[b], d[c]]) | (r[j] != S.ejoin[r[b], r[c]])
    out["prop_join"] = Check(not bad.any(), tuple(pairs[bad][0]) if bad.any() else ())
    E = base.idempotents
    bad = J[np.ix_(E, E)] != S.ejoin[np.ix_(E, E)]
    out["lem_join"] = Check(not bad.any(), _first(bad))
    # a(b v c) = ab v ac and (b v c)a = ba v ca for all a
    lhs = mul[:, j]
    rhs = J[mul[:, b], mul[:, c]]
    bad = lhs != rhs
    lhs2 = mul[j, :]
    rhs2 = J[mul[b, :], mul[c, :]]
    bad2 = lhs2 != rhs2
    out["distributivity"] = Check(not (bad.any() or bad2.any()),
                                  _first(bad) or _first(bad2))
    orth = np.argwhere(base.orthogonal_matrix)
    ob, oc = orth[:, 0], orth[:, 1]
    O = base.orthogonal_matrix
    bad = ~O[mul[:, ob], mul[:, oc]] | ~O[mul[ob, :], mul[oc, :]].T
    out["orthogonality_preserved"] = Check(not bad.any(), _first(bad))
    # skew identities
    sd = S.skew_difference_table
    sj = S.skew_join_table
    ar = np.arange(n)
    ok = np.all(sd[:, 0] == ar) and np.all(sj[:, 0] == ar) and np.all(sd[ar, ar] == 0) \
        and np.all(sj[ar, ar] == ar)
    recomputed = np.array([[skew_difference(S, x, y) for y in range(n)] for x in range(min(n, 64))])
    ok = ok and np.array_equal(recomputed, sd[:min(n, 64)])
    ok = ok and bool(O[sd, ar[None, :]].all())
    out["skew"] = Check(bool(ok))
    # s-down-set and d(s)-down-set are isomorphic via u -> d(u), e -> s e
    good = True
    for s in range(n):
        below = np.flatnonzero(base.leq[:, s])
        if not np.array_equal(mul[s, d[below]], below):
            good = False
            break
        ebelow = np.flatnonzero(base.leq[:, d[s]] & base.idempotent_mask)
        if sorted(d[below].tolist()) != sorted(ebelow.tolist()):
            good = False
            break
    out["down_set_iso"] = Check(good, (s,) if not good else ())
    return out
