"""Partial commutative monoids, Int(S), type monoids and a bounded word-problem solver."""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .boolean import BooleanInverseSemigroup
from .core import Check, green_d_classes

MAX_VECTORS = 100_000
MAX_COMPONENT = 64


class BadVector(ValueError):
    pass


class Inconclusive(RuntimeError):
    pass


def default_budget() -> "Budget":
    """Module defaults, overridable by ``BISEM_BUDGET`` (max vectors per class)."""
    env = os.environ.get("BISEM_BUDGET")
    return Budget(int(env)) if env else Budget()


@dataclass(frozen=True)
class Budget:
    max_vectors: int = MAX_VECTORS
    max_component: int = MAX_COMPONENT


# ---------------------------------------------------------------------------
# partial commutative monoids


@dataclass(frozen=True, eq=False)
class PartialCommutativeMonoid:
    """Elements ``0..m-1`` with ``add[p, q]`` the sum, or -1 where undefined."""

    add: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        add = np.asarray(self.add, dtype=np.int64)
        add.setflags(write=False)
        object.__setattr__(self, "add", add)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(add))))

    @property
    def size(self) -> int:
        return len(self.add)

    def defined(self, p: int, q: int) -> bool:
        return self.add[p, q] >= 0

    def plus(self, p: int, q: int) -> int | None:
        v = int(self.add[p, q])
        return None if v < 0 else v

    @property
    def is_total(self) -> bool:
        return bool((self.add >= 0).all())


def check_pcm(P: PartialCommutativeMonoid) -> dict[str, Check]:
    """Report on (Assoc), (Com), (Zero), (Conical), (Cancel) and refinement."""
    m = P.size
    ext = np.full((m + 1, m + 1), m, dtype=np.int64)      # index m stands for "undefined"
    ext[:m, :m] = np.where(P.add >= 0, P.add, m)
    out = {}
    lhs = ext[ext[:m, :m][:, :, None], np.arange(m)[None, None, :]]
    rhs = ext[np.arange(m)[:, None, None], ext[:m, :m][None, :, :]]
    bad = lhs != rhs
    out["assoc"] = Check(not bad.any(), tuple(int(x) for x in np.argwhere(bad)[0]) if bad.any() else ())
    bad = P.add != P.add.T
    out["com"] = Check(not bad.any(), tuple(int(x) for x in np.argwhere(bad)[0]) if bad.any() else ())
    bad = P.add[0] != np.arange(m)
    out["zero"] = Check(not bad.any(), (int(np.argmax(bad)),) if bad.any() else ())
    bad = (P.add == 0)
    bad[0, 0] = False
    out["conical"] = Check(not bad.any(), tuple(int(x) for x in np.argwhere(bad)[0]) if bad.any() else ())
    witness = ()
    for p in range(m):
        row = P.add[p]
        vals, counts = np.unique(row[row >= 0], return_counts=True)
        if (counts > 1).any():
            v = vals[np.argmax(counts > 1)]
            q, r = np.flatnonzero(row == v)[:2]
            witness = (p, int(q), int(r))
            break
    out["cancel"] = Check(not witness, witness)
    out["refinement"] = _check_refinement(P)
    return out


def _check_refinement(P: PartialCommutativeMonoid) -> Check:
    """``a + b = c + d`` admits ``x11..x22`` with rows summing to a, b and columns to c, d."""
    m = P.size
    splits: dict[int, list[tuple[int, int]]] = {p: [] for p in range(m)}
    for x, y in np.argwhere(P.add >= 0):
        splits[int(P.add[x, y])].append((int(x), int(y)))
    for s in range(m):
        pairs = splits[s]
        for a, b in pairs:
            for c, d in pairs:
                if not _refines(P, splits, a, b, c, d):
                    return Check(False, (a, b, c, d))
    return Check(True)


def _refines(P, splits, a, b, c, d) -> bool:
    for x11, x12 in splits[a]:
        for x21, x22 in splits[b]:
            if P.add[x11, x21] == c and P.add[x12, x22] == d:
                return True
    return False


@dataclass(frozen=True, eq=False)
class IntMonoid:
    """``Int(S)`` together with the D-class data used to build it."""

    pcm: PartialCommutativeMonoid
    class_of: np.ndarray            # element -> class of d(element)
    representatives: tuple          # least idempotent of each class


def int_monoid(B: BooleanInverseSemigroup) -> IntMonoid:
    """Idempotent D-classes with ``[e] + [f] = [e + f]`` for orthogonal representatives.

    Well-definedness is checked over every orthogonal representative pair;
    the axioms, conicality and refinement are asserted.
    """
    base = B.base
    green = green_d_classes(base)
    cls = green.class_of
    m = len(green.classes)
    E = base.idempotents
    orth = base.mul[np.ix_(E, E)] == 0
    i, j = np.nonzero(orth)
    p, q = cls[E[i]], cls[E[j]]
    v = cls[B.ejoin[E[i], E[j]]]
    add = np.full((m, m), -1, dtype=np.int64)
    add[p, q] = v
    assert np.array_equal(add[p, q], v), "sum of D-classes depends on the representatives"
    labels = tuple(f"[{base.label(int(c[0]))}]" for c in green.classes)
    P = PartialCommutativeMonoid(add, labels)
    report = check_pcm(P)
    for name in ("assoc", "com", "zero", "conical", "refinement"):
        assert report[name], f"Int(S) fails {name}: {report[name].witness}"
    return IntMonoid(P, cls, tuple(int(c[0]) for c in green.classes))


def orthogonally_separating(B: BooleanInverseSemigroup) -> bool:
    return int_monoid(B).pcm.is_total


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True, eq=False)
class MonoidPresentation:
    """Commutative monoid on ``k`` generators with relations between N-vectors."""

    k: int
    relations: tuple
    labels: tuple = ()

    def __post_init__(self):
        rels = []
        for lhs, rhs in self.relations:
            lhs = tuple(int(x) for x in lhs)
            rhs = tuple(int(x) for x in rhs)
            if len(lhs) != self.k or len(rhs) != self.k:
                raise BadVector("relation vector has the wrong length")
            if min(lhs + rhs, default=0) < 0:
                raise BadVector("relation vector has a negative entry")
            if lhs == rhs:
                raise ValueError("relation pairs a vector with itself")
            rels.append((lhs, rhs))
        object.__setattr__(self, "relations", tuple(rels))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"g{i + 1}" for i in range(self.k)))

    def __eq__(self, other):
        return (isinstance(other, MonoidPresentation) and self.k == other.k
                and self.relations == other.relations and self.labels == other.labels)

    def unit(self, i: int) -> tuple:
        return tuple(1 if j == i else 0 for j in range(self.k))

    def zero(self) -> tuple:
        return (0,) * self.k


def universal_envelope(P: PartialCommutativeMonoid) -> MonoidPresentation:
    """Generators are the nonzero elements; relations ``g_p + g_q = g_r`` for ``p + q = r``."""
    assert check_pcm(P)["conical"], "universal envelope needs a conical monoid"
    k = P.size - 1
    rels = []
    for p in range(1, P.size):
        for q in range(p, P.size):
            r = int(P.add[p, q])
            if r < 0:
                continue
            lhs = [0] * k
            lhs[p - 1] += 1
            lhs[q - 1] += 1
            rhs = [0] * k
            rhs[r - 1] = 1
            rels.append((tuple(lhs), tuple(rhs)))
    return MonoidPresentation(k, tuple(rels), tuple(P.labels[1:]))


def typ(B: BooleanInverseSemigroup) -> MonoidPresentation:
    return universal_envelope(int_monoid(B).pcm)


def canonical_image(P: PartialCommutativeMonoid, p: int) -> tuple:
    """Image of ``p`` in its universal envelope."""
    k = P.size - 1
    return tuple(1 if p > 0 and j == p - 1 else 0 for j in range(k))


@dataclass(frozen=True)
class Reduction:
    """Result of Tietze elimination.

    ``images[i]`` expresses original generator ``i`` over the ``basis``
    (indices of kept generators); ``remaining`` lists relations not eliminated.
    """

    basis: tuple
    images: tuple
    remaining: tuple

    @property
    def free(self) -> bool:
        return not self.remaining

    @property
    def rank(self) -> int:
        return len(self.basis)


def reduce_presentation(pres: MonoidPresentation) -> Reduction:
    """Eliminate generators occurring alone on one side of a relation and absent from the other.

    Each step is a Tietze transformation, so an empty remainder certifies that
    the monoid is free on the kept generators.
    """
    k = pres.k
    images = [np.eye(k, dtype=np.int64)[i] for i in range(k)]
    rels = [(np.array(l), np.array(r)) for l, r in pres.relations]
    alive = set(range(k))
    changed = True
    while changed:
        changed = False
        for idx, (l, r) in enumerate(rels):
            for single, other in ((l, r), (r, l)):
                nz = np.flatnonzero(single)
                if len(nz) == 1 and single[nz[0]] == 1 and other[nz[0]] == 0:
                    g = int(nz[0])
                    sub = other
                    images = [im + im[g] * sub - np.where(np.arange(k) == g, im[g], 0) for im in images]
                    rels = [(a + a[g] * sub - np.where(np.arange(k) == g, a[g], 0),
                             b + b[g] * sub - np.where(np.arange(k) == g, b[g], 0))
                            for j, (a, b) in enumerate(rels) if j != idx]
                    rels = [(a, b) for a, b in rels if not np.array_equal(a, b)]
                    alive.discard(g)
                    changed = True
                    break
            if changed:
                break
    basis = tuple(sorted(alive))
    imgs = tuple(tuple(int(im[b]) for b in basis) for im in images)
    remaining = tuple((tuple(int(x) for x in a), tuple(int(x) for x in b)) for a, b in rels)
    return Reduction(basis, imgs, remaining)


# ---------------------------------------------------------------------------
# word problem


@dataclass(frozen=True)
class Step:
    relation: int
    forward: bool      # True: replace lhs by rhs
    result: tuple


@dataclass(frozen=True)
class WordVerdict:
    kind: str                      # "equal", "distinct" or "unknown"
    trace: tuple = ()              # steps from u to v when equal
    certificate: frozenset = field(default_factory=frozenset)  # saturated class of u when distinct
    reason: str = ""

    @property
    def equal(self) -> bool:
        return self.kind == "equal"


def _vec(pres: MonoidPresentation, u) -> tuple:
    u = tuple(int(x) for x in u)
    if len(u) != pres.k:
        raise BadVector(f"expected {pres.k} entries, got {len(u)}")
    if min(u, default=0) < 0:
        raise BadVector("negative entry")
    return u


def rewrites(pres: MonoidPresentation, w: tuple):
    """All single-relation rewrites of ``w`` as ``(relation, forward, result)``."""
    for i, (l, r) in enumerate(pres.relations):
        for fwd, a, b in ((True, l, r), (False, r, l)):
            if all(x >= y for x, y in zip(w, a)):
                yield i, fwd, tuple(x - y + z for x, y, z in zip(w, a, b))


def find_grading(pres: MonoidPresentation):
    """Positive weights making every relation strictly decrease left to right, or ``None``."""
    if not pres.relations:
        return np.ones(pres.k)
    from scipy.optimize import linprog

    A = np.array([np.array(r) - np.array(l) for l, r in pres.relations], dtype=float)
    res = linprog(np.ones(pres.k), A_ub=A, b_ub=-np.ones(len(A)),
                  bounds=[(1, None)] * pres.k, method="highs")
    if not res.success:
        return None
    w = res.x
    if not (A @ w <= -1 + 1e-9).all():
        return None
    return w


def _normal_form(pres, u, budget: Budget):
    """Rewrite left to right while possible; returns (normal form, steps) or None on budget."""
    steps = []
    w = u
    while True:
        for i, (l, r) in enumerate(pres.relations):
            if all(x >= y for x, y in zip(w, l)):
                w = tuple(x - y + z for x, y, z in zip(w, l, r))
                steps.append(Step(i, True, w))
                break
        else:
            return w, steps
        if len(steps) > budget.max_vectors:
            return None


def decide_equal(pres: MonoidPresentation, u, v, budget: Budget | None = None,
                 grading=None) -> WordVerdict:
    """Is ``u = v`` in the presented commutative monoid?

    Fast path: with a grading (given, or found automatically) both sides are
    rewritten to normal forms; equal normal forms give a trace.  Otherwise a
    breadth-first search over the class of ``u`` either reaches ``v``
    (equal, with trace), saturates without it (distinct, the class is the
    certificate), or runs out of budget (unknown).
    """
    budget = budget or default_budget()
    u, v = _vec(pres, u), _vec(pres, v)
    if u == v:
        return WordVerdict("equal", ())
    if grading is None:
        grading = find_grading(pres)
    if grading is not None and len(pres.relations):
        nu = _normal_form(pres, u, budget)
        nv = _normal_form(pres, v, budget)
        if nu is not None and nv is not None and nu[0] == nv[0]:
            return WordVerdict("equal", tuple(nu[1]) + _reverse(pres, v, nv[1]))
    parent: dict[tuple, tuple | None] = {u: None}
    queue = deque([u])
    truncated = False
    while queue:
        w = queue.popleft()
        for i, fwd, x in rewrites(pres, w):
            if x in parent:
                continue
            if max(x, default=0) > budget.max_component:
                truncated = True
                continue
            parent[x] = (w, i, fwd)
            if x == v:
                return WordVerdict("equal", _trace(parent, v))
            if len(parent) >= budget.max_vectors:
                return WordVerdict("unknown", reason=f"more than {budget.max_vectors} vectors")
            queue.append(x)
    if truncated:
        return WordVerdict("unknown", reason=f"component bound {budget.max_component} reached")
    return WordVerdict("distinct", certificate=frozenset(parent))


def _trace(parent, v) -> tuple:
    steps = []
    x = v
    while parent[x] is not None:
        w, i, fwd = parent[x]
        steps.append(Step(i, fwd, x))
        x = w
    return tuple(reversed(steps))


def _reverse(pres, v, steps) -> tuple:
    """Turn ``v -> ... -> nf`` into ``nf -> ... -> v``."""
    seq = [v] + [s.result for s in steps]
    out = []
    for k in range(len(steps) - 1, -1, -1):
        out.append(Step(steps[k].relation, not steps[k].forward, seq[k]))
    return tuple(out)


def replay(pres: MonoidPresentation, u, v, trace) -> bool:
    """Does ``trace`` rewrite ``u`` into ``v`` by valid relation applications?"""
    w = tuple(u)
    for step in trace:
        l, r = pres.relations[step.relation]
        a, b = (l, r) if step.forward else (r, l)
        if not all(x >= y for x, y in zip(w, a)):
            return False
        w = tuple(x - y + z for x, y, z in zip(w, a, b))
        if w != step.result:
            return False
    return w == tuple(v)


def check_certificate(pres: MonoidPresentation, u, v, cls) -> bool:
    """Is ``cls`` closed under rewriting, containing ``u`` and not ``v``?"""
    if tuple(u) not in cls or tuple(v) in cls:
        return False
    return all(x in cls for w in cls for _, _, x in rewrites(pres, w))


def check_verdict(pres: MonoidPresentation, u, v, verdict: WordVerdict) -> bool:
    if verdict.kind == "equal":
        return replay(pres, u, v, verdict.trace)
    if verdict.kind == "distinct":
        return check_certificate(pres, u, v, verdict.certificate)
    return True


def saturate(pres: MonoidPresentation, u, budget: Budget | None = None) -> frozenset | None:
    """The full class of ``u``, or ``None`` when the budget is exceeded."""
    budget = budget or default_budget()
    u = _vec(pres, u)
    seen = {u}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        for _, _, x in rewrites(pres, w):
            if x in seen:
                continue
            if max(x, default=0) > budget.max_component or len(seen) >= budget.max_vectors:
                return None
            seen.add(x)
            queue.append(x)
    return frozenset(seen)


@dataclass(frozen=True)
class VEmbeddingReport:
    injective: Check
    homomorphism: Check
    v_property: Check
    lower_interval: Check

    def __bool__(self):
        return bool(self.injective and self.homomorphism and self.v_property and self.lower_interval)


def check_v_embedding(P: PartialCommutativeMonoid, pres: MonoidPresentation | None = None,
                      budget: Budget | None = None) -> VEmbeddingReport:
    """Is the canonical map ``P -> U(P)`` an injective V-homomorphism?

    Raises :class:`Inconclusive` when some class does not saturate.
    """
    pres = pres or universal_envelope(P)
    budget = budget or default_budget()
    m = P.size
    img = [canonical_image(P, p) for p in range(m)]
    bad = ()
    for p in range(m):
        for q in range(p + 1, m):
            verdict = decide_equal(pres, img[p], img[q], budget)
            if verdict.kind == "unknown":
                raise Inconclusive(f"classes of {p} and {q}: {verdict.reason}")
            assert check_verdict(pres, img[p], img[q], verdict)
            if verdict.equal and not bad:
                bad = (p, q)
    injective = Check(not bad, bad)
    classes = []
    for p in range(m):
        c = saturate(pres, img[p], budget)
        if c is None:
            raise Inconclusive(f"class of {p} does not saturate")
        classes.append(c)
    owner = {}
    for p, c in enumerate(classes):
        for w in c:
            owner.setdefault(w, p)
    bad = ()
    for p in range(m):
        for q in range(m):
            r = P.plus(p, q)
            if r is not None and tuple(a + b for a, b in zip(img[p], img[q])) not in classes[r]:
                bad = bad or (p, q)
    hom = Check(not bad, bad)
    bad_v, bad_low = (), ()
    for p in range(m):
        for w in classes[p]:
            for y in product(*(range(x + 1) for x in w)):
                z = tuple(a - b for a, b in zip(w, y))
                s, t = owner.get(y), owner.get(z)
                if s is None or t is None:
                    bad_low = bad_low or (p, y)
                    bad_v = bad_v or (p, y)
                elif P.plus(s, t) != p:
                    bad_v = bad_v or (p, y)
    return VEmbeddingReport(injective, hom, Check(not bad_v, bad_v), Check(not bad_low, bad_low))
