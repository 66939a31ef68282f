"""Congruences: mu, additive ideals, the ideal congruences epsilon_I and quotients."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .boolean import BooleanInverseSemigroup, check_additive, check_bis
from .core import FiniteInverseSemigroup, green_d_classes

CLASSIFY_LIMIT = 256
MU_SAMPLE = 16


class NotCongruence(ValueError):
    def __init__(self, witness):
        super().__init__(f"partition is not a congruence; witness {witness}")
        self.witness = witness


def _canonical(labels: np.ndarray) -> np.ndarray:
    """Relabel so classes are numbered by their least element."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inverse].astype(np.int64)


def _components(n: int, src, dst) -> np.ndarray:
    src = np.concatenate([np.asarray(x, dtype=np.int64).ravel() for x in src])
    dst = np.concatenate([np.asarray(x, dtype=np.int64).ravel() for x in dst])
    g = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    return _canonical(labels)


def _closure(n, binary, unary, labels, stop=None) -> np.ndarray:
    """Least congruence of the algebra ``(binary, unary)`` containing ``labels``.

    Each round joins ``T(x, z)`` with ``T(rep x, z)`` (and symmetrically) for
    every table; the fixed point is the generated congruence.  ``stop`` may end
    the iteration early; it receives the current labels.
    """
    labels = _canonical(np.asarray(labels))
    ar = np.arange(n)
    while True:
        if stop is not None and stop(labels):
            return labels
        _, first = np.unique(labels, return_index=True)
        rep = first[labels]
        src, dst = [ar], [rep]
        for T in binary:
            src += [T, T]
            dst += [T[rep, :], T[:, rep]]
        for u in unary:
            src.append(u)
            dst.append(u[rep])
        new = _components(n, src, dst)
        if new.max() == labels.max():
            return labels
        labels = new


@dataclass(frozen=True, eq=False)
class Congruence:
    """A partition of element indices, with the flags computed at construction."""

    class_of: np.ndarray
    is_semigroup_congruence: bool
    is_additive: bool | None
    is_idempotent_separating: bool
    witness: tuple = field(default=())

    @property
    def classes(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for x, c in enumerate(self.class_of):
            out[c].append(x)
        return [tuple(c) for c in out]

    @property
    def num_classes(self) -> int:
        return int(self.class_of.max()) + 1

    @property
    def size(self) -> int:
        return len(self.class_of)

    @property
    def is_identity(self) -> bool:
        return self.num_classes == self.size

    @property
    def is_universal(self) -> bool:
        return self.num_classes == 1

    def related(self, a: int, b: int) -> bool:
        return self.class_of[a] == self.class_of[b]

    def zero_class(self) -> frozenset:
        return frozenset(int(x) for x in np.flatnonzero(self.class_of == self.class_of[0]))

    def __eq__(self, other):
        return isinstance(other, Congruence) and np.array_equal(self.class_of, other.class_of)

    def __hash__(self):
        return hash(self.class_of.tobytes())

    def __le__(self, other: "Congruence") -> bool:
        """Containment of relations."""
        rep = {}
        for x, c in enumerate(self.class_of):
            if c in rep and other.class_of[rep[c]] != other.class_of[x]:
                return False
            rep.setdefault(c, x)
        return True

    @classmethod
    def from_classes(cls, S, classes) -> "Congruence":
        labels = np.full(_base(S).size, -1, dtype=np.int64)
        for k, c in enumerate(classes):
            labels[list(c)] = k
        if (labels < 0).any():
            raise ValueError("classes do not cover the semigroup")
        return cls.from_labels(S, labels)

    @classmethod
    def from_labels(cls, S, labels) -> "Congruence":
        base = _base(S)
        lab = _canonical(np.asarray(labels, dtype=np.int64))
        lab.setflags(write=False)
        witness = _congruence_witness(base, lab)
        ok = witness is None
        additive = None
        if isinstance(S, BooleanInverseSemigroup) and S.cached and ok:
            additive = all(_respects(lab, T) is None
                           for T in (S.skew_difference_table, S.skew_join_table))
        E = base.idempotents
        sep = len(np.unique(lab[E])) == len(E)
        return cls(lab, ok, additive, sep, witness or ())


def _base(S) -> FiniteInverseSemigroup:
    return S.base if isinstance(S, BooleanInverseSemigroup) else S


def _respects(lab, T):
    _, first = np.unique(lab, return_index=True)
    rep = first[lab]
    bad = lab[T] != lab[T[rep, :]]
    if bad.any():
        x, z = np.argwhere(bad)[0]
        return (int(x), int(rep[x]), int(z))
    bad = lab[T] != lab[T[:, rep]]
    if bad.any():
        z, x = np.argwhere(bad)[0]
        return (int(z), int(x), int(rep[x]))
    return None


def _congruence_witness(S: FiniteInverseSemigroup, lab):
    w = _respects(lab, S.mul)
    if w is not None:
        return w
    _, first = np.unique(lab, return_index=True)
    rep = first[lab]
    bad = lab[S.inv] != lab[S.inv[rep]]
    if bad.any():
        x = int(np.argmax(bad))
        return (x, int(rep[x]))
    return None


def _signature(S) -> tuple[list, list]:
    """Operation tables for closure: (mul, inv) plus (skew difference, skew join) on a BIS."""
    base = _base(S)
    binary = [base.mul]
    if isinstance(S, BooleanInverseSemigroup):
        binary += [S.skew_difference_table, S.skew_join_table]
    return binary, [base.inv]


def generated(S, pairs, stop=None) -> Congruence:
    """Least congruence containing ``pairs``; additive closure when ``S`` is a certified BIS."""
    base = _base(S)
    pairs = list(pairs)
    n = base.size
    src = [np.arange(n)] + [np.array([a]) for a, _ in pairs]
    dst = [np.arange(n)] + [np.array([b]) for _, b in pairs]
    start = _components(n, src, dst)
    binary, unary = _signature(S)
    return Congruence.from_labels(S, _closure(n, binary, unary, start, stop))


def identity_congruence(S) -> Congruence:
    return Congruence.from_labels(S, np.arange(_base(S).size))


def universal_congruence(S) -> Congruence:
    return Congruence.from_labels(S, np.zeros(_base(S).size, dtype=np.int64))


# ---------------------------------------------------------------------------
# mu


def centralizer_of_idempotents(S: FiniteInverseSemigroup) -> np.ndarray:
    """Mask of elements commuting with every idempotent."""
    E = S.idempotents
    return (S.mul[:, E] == S.mul[E, :].T).all(axis=1)


def mu(S, sample: int = MU_SAMPLE) -> Congruence:
    """``a mu b`` iff ``a^-1 e a = b^-1 e b`` for all idempotents ``e``.

    Sanity layers: the result must be an idempotent-separating congruence;
    up to ``sample`` one-pair enlargements must fail to be idempotent
    separating; triviality must agree with ``Z(E) = E``.
    """
    base = _base(S)
    E = base.idempotents
    sig = base.mul[base.mul[base.inv[:, None], E[None, :]], np.arange(base.size)[:, None]]
    _, labels = np.unique(sig, axis=0, return_inverse=True)
    cong = Congruence.from_labels(S, labels.ravel())
    assert cong.is_semigroup_congruence, f"mu is not a congruence: {cong.witness}"
    assert cong.is_idempotent_separating, "mu is not idempotent separating"
    if sample and base.size <= 600:
        reps = [c[0] for c in cong.classes]
        pairs = [(a, b) for i, a in enumerate(reps) for b in reps[i + 1:]][:sample]
        for a, b in pairs:
            big = Congruence.from_labels(base, _closure(
                base.size, [base.mul], [base.inv], _merge(cong.class_of, a, b)))
            assert not big.is_idempotent_separating, f"mu is not maximal: ({a}, {b})"
    fundamental = cong.is_identity
    z = centralizer_of_idempotents(base)
    assert fundamental == bool(np.array_equal(z, base.idempotent_mask)), \
        "fundamentality disagrees with Z(E) = E"
    return cong


def _merge(labels, a, b):
    lab = np.array(labels, copy=True)
    lab[lab == lab[b]] = lab[a]
    return lab


def is_fundamental(S) -> bool:
    return mu(S, sample=0).is_identity


# ---------------------------------------------------------------------------
# additive ideals


@dataclass(frozen=True)
class AdditiveIdeal:
    elements: frozenset

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.elements

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[list(self.elements)] = True
        return m

    def sorted(self) -> list[int]:
        return sorted(self.elements)


def _ideal_closure(B: BooleanInverseSemigroup, mask: np.ndarray) -> np.ndarray:
    """Least additive ideal containing ``mask``: two-sided multiples, then orthogonal joins."""
    mul = B.base.mul
    J = B.join_table
    O = B.base.orthogonal_matrix
    mask = mask.copy()
    mask[0] = True
    while True:
        idx = np.flatnonzero(mask)
        left = np.unique(mul[:, idx])
        new = np.zeros_like(mask)
        new[np.unique(mul[left, :])] = True
        new |= mask
        idx = np.flatnonzero(new)
        sub = O[np.ix_(idx, idx)]
        if sub.any():
            a, b = np.nonzero(sub)
            new[J[idx[a], idx[b]]] = True
        if (new == mask).all():
            return mask
        mask = new


def _e_ideal_closure(B: BooleanInverseSemigroup, mask: np.ndarray) -> np.ndarray:
    """Least ideal of E(S) containing ``mask`` that is closed under joins and conjugation."""
    base = B.base
    E = base.idempotents
    mul, inv = base.mul, base.inv
    mask = mask.copy()
    mask[0] = True
    while True:
        idx = np.flatnonzero(mask)
        new = mask.copy()
        new[E[base.leq[np.ix_(E, idx)].any(axis=1)]] = True          # down-closed
        idx = np.flatnonzero(new)
        new[np.unique(mul[mul[inv[:, None], idx[None, :]], np.arange(base.size)[:, None]])] = True
        idx = np.flatnonzero(new)
        new[B.ejoin[np.ix_(idx, idx)].ravel()] = True                # joins
        if (new == mask).all():
            return mask
        mask = new


def _enumerate(n, reps, close) -> list[np.ndarray]:
    start = close(np.zeros(n, dtype=bool))
    seen = {start.tobytes(): start}
    queue = [start]
    while queue:
        cur = queue.pop(0)
        for s in reps:
            if cur[s]:
                continue
            m = cur.copy()
            m[s] = True
            m = close(m)
            key = m.tobytes()
            if key not in seen:
                seen[key] = m
                queue.append(m)
    return list(seen.values())


def additive_ideals(B: BooleanInverseSemigroup) -> list[AdditiveIdeal]:
    """All additive ideals, computed directly and via conjugation-closed ideals of E(S).

    The two enumerations must agree and ``I -> d(I)`` must be a bijection onto
    the conjugation-closed ideals of E(S).
    """
    base = B.base
    n = base.size
    green = green_d_classes(base)
    reps = [c[0] for c in green.classes[1:]]
    direct = _enumerate(n, reps, lambda m: _ideal_closure(B, m))
    e_ideals = _enumerate(n, list(base.idempotents[1:]), lambda m: _e_ideal_closure(B, m))
    via_e = [m[base.d] for m in e_ideals]
    key = lambda m: m.tobytes()
    assert sorted(map(key, direct)) == sorted(map(key, via_e)), \
        "direct and idempotent-ideal enumerations disagree"
    for I, Jm in zip(via_e, e_ideals):
        dI = np.zeros(n, dtype=bool)
        dI[base.d[I]] = True
        assert np.array_equal(dI, Jm), "d(I(J)) != J"
    out = [AdditiveIdeal(frozenset(int(x) for x in np.flatnonzero(m))) for m in direct]
    return sorted(out, key=lambda I: (len(I), I.sorted()))


# ---------------------------------------------------------------------------
# epsilon_I and quotients


def epsilon(B: BooleanInverseSemigroup, I) -> Congruence:
    """Least additive congruence identifying every element of ``I`` with 0."""
    elems = sorted(I.elements if isinstance(I, AdditiveIdeal) else I)
    cong = generated(B, [(c, 0) for c in elems])
    assert cong.zero_class() == frozenset(elems) | {0}, "zero class of epsilon_I differs from I"
    assert cong.is_additive, "epsilon_I is not additive"
    return cong


def quotient(S, sigma: Congruence):
    """Quotient table; a certified BIS when ``sigma`` is additive.

    Class ``k`` is represented by its least element, so the zero class is 0.
    """
    base = _base(S)
    if not sigma.is_semigroup_congruence:
        raise NotCongruence(sigma.witness)
    lab = sigma.class_of
    _, reps = np.unique(lab, return_index=True)
    mul = lab[base.mul[np.ix_(reps, reps)]]
    inv = lab[base.inv[reps]]
    labels = [base.label(int(r)) if sigma.is_identity else f"[{base.label(int(r))}]" for r in reps]
    Q = FiniteInverseSemigroup(mul, inv, labels=labels)
    if isinstance(S, BooleanInverseSemigroup) and sigma.is_additive:
        QB = check_bis(Q)
        assert isinstance(QB, BooleanInverseSemigroup), f"additive quotient is not Boolean: {QB}"
        assert check_additive(lab, S, QB), "projection is not additive"
        return QB
    return Q


def check_factorization(B: BooleanInverseSemigroup, sigma: Congruence) -> bool:
    """``S/epsilon_I -> S/sigma`` is defined and idempotent separating, ``I`` the zero class."""
    eps = epsilon(B, sigma.zero_class())
    if not eps <= sigma:
        return False
    E = B.base.idempotents
    for i, e in enumerate(E):
        for f in E[i + 1:]:
            if sigma.related(e, f) and not eps.related(e, f):
                return False
    return True


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Classification:
    fundamental: bool
    additively_0_simple: bool
    simple: bool


def _simple_by_congruences(B: BooleanInverseSemigroup) -> bool:
    """Is every additive congruence generated by one pair ``a != b`` universal?

    Exact, with shortcuts that are valid in any additive congruence: ``x ~ 0``
    iff ``d(x) ~ 0``, that class depends only on the D-class of ``d(x)``, and
    ``a ~ b`` forces ``a (/) b ~ 0``.
    """
    base = B.base
    n = base.size
    if n == 1:
        return True
    green = green_d_classes(base)
    sd = B.skew_difference_table
    univ_zero = np.zeros(n, dtype=bool)
    for c in green.classes[1:]:
        cong = generated(B, [(c[0], 0)])
        if not cong.is_universal:
            return False
        univ_zero[green.class_of == green.class_of[c[0]]] = True
    univ_zero = univ_zero[base.d]

    hit = []

    def stop(lab):
        _, first = np.unique(lab, return_index=True)
        rep = first[lab]
        if univ_zero[sd[np.arange(n), rep]].any() or univ_zero[sd[rep, np.arange(n)]].any():
            hit.append(True)
            return True
        return False

    mul = base.mul
    for a in range(1, n):
        for b in range(a + 1, n):
            if univ_zero[sd[a, b]] or univ_zero[sd[b, a]]:
                continue
            xa, xb = mul[:, a], mul[:, b]
            two_a, two_b = mul[xa, :], mul[xb, :]
            if univ_zero[sd[two_a, two_b]].any() or univ_zero[sd[two_b, two_a]].any():
                continue
            hit.clear()
            cong = generated(B, [(a, b)], stop=stop)
            if not hit and not cong.is_universal:
                return False
    return True


def classify(B: BooleanInverseSemigroup, limit: int = CLASSIFY_LIMIT) -> Classification:
    """Fundamental, additively 0-simple and simple, the last by enumerating congruences."""
    if B.base.size > limit:
        raise ValueError(f"classify is capped at {limit} elements")
    fundamental = mu(B).is_identity
    ideals = additive_ideals(B)
    zero_simple = len(ideals) <= 2
    simple = _simple_by_congruences(B)
    assert simple == (fundamental and zero_simple), "simplicity criterion disagrees"
    return Classification(fundamental, zero_simple, simple)
