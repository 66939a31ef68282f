from itertools import permutations
from math import comb, factorial

import numpy as np
import pytest

from bisem.boolean import check_bis
from bisem.congruence import additive_ideals
from bisem.core import cyclic_group, direct_sum, group_with_zero, is_isomorphic
from bisem.structure import (RookMatrix, atom_groupoid, atoms, components, decompose, disjoint_union,
                             group_groupoid, group_name, groups_isomorphic, local_bisection_semigroup,
                             pair_groupoid, rook_semigroup, to_dot, transitive_groupoid,
                             verify_atom_iso, verify_groupoid)

from conftest import BOOLEAN_NAMES, bis, semigroup, sym


def s3():
    perms = list(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    return [[index[tuple(p[q[x]] for x in range(3))] for q in perms] for p in perms]


def rook_size(n, m):
    # [DERIVED] choose k rows, k columns, a bijection and k group labels
    return sum(comb(n, k) ** 2 * factorial(k) * m ** k for k in range(n + 1))


def test_groupoids_verify():
    for G in (pair_groupoid(3), group_groupoid(cyclic_group(3)), transitive_groupoid(2, s3()),
              disjoint_union(pair_groupoid(2), group_groupoid(cyclic_group(2)))):
        assert verify_groupoid(G) == []


def test_components_and_isotropy():
    G = disjoint_union(pair_groupoid(2), transitive_groupoid(2, cyclic_group(3)), pair_groupoid(1))
    assert [len(c) for c in components(G)] == [2, 2, 1]
    assert len(G.isotropy(2)) == 3
    assert not G.is_principal
    assert pair_groupoid(3).is_principal


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bisections_of_pair_groupoid(n):
    B, bis_list = local_bisection_semigroup(pair_groupoid(n))
    assert is_isomorphic(B.base, sym(n))
    assert len(bis_list[0]) == 0


def test_bisections_of_group():
    B, _ = local_bisection_semigroup(group_groupoid(cyclic_group(2)))
    assert is_isomorphic(B.base, semigroup("Z2"))


@pytest.mark.parametrize("name,count", [("I1", 1), ("I2", 4), ("I3", 9), ("2^3", 3), ("Z3", 3),
                                        ("I2+Z2", 6), ("M2(Z2)", 8)])
def test_atom_counts(name, count):
    assert len(atoms(bis(name))) == count


def test_atom_iso_on_corpus(boolean_name):
    B = bis(boolean_name)
    phi = verify_atom_iso(B)
    assert sorted(phi) == list(range(B.base.size))


@pytest.mark.parametrize("n,group,size", [(1, cyclic_group(1), 2), (2, cyclic_group(1), 7),
                                          (2, cyclic_group(2), 17), (3, cyclic_group(1), 34),
                                          (2, cyclic_group(3), rook_size(2, 3)),
                                          (2, s3(), rook_size(2, 6))])
def test_rook_sizes(n, group, size):
    B, mats = rook_semigroup(n, group)
    assert B.base.size == size == rook_size(n, len(group))


def test_rook_table_matches_matrix_product():
    g = np.array(cyclic_group(3))
    B, mats = rook_semigroup(2, g)
    index = {M.entries: i for i, M in enumerate(mats)}
    for i, A in enumerate(mats):
        for j, C in enumerate(mats):
            assert B.base.mul[i, j] == index[A.multiply(C, g).entries]


def test_rook_matrix_rejects_two_in_a_row():
    with pytest.raises(ValueError):
        RookMatrix(2, ((0, 0), (None, None)))


@pytest.mark.parametrize("name,summary", [
    ("I1", [(1, "trivial")]), ("I2", [(2, "trivial")]), ("I3", [(3, "trivial")]),
    ("I2+Z2", [(2, "trivial"), (1, "Z2")]), ("M2(Z2)", [(2, "Z2")]), ("Z3", [(1, "Z3")]),
    ("2^3", [(1, "trivial")] * 3), ("fork_tight", [(2, "trivial"), (2, "trivial")]),
])
def test_decompose(name, summary):
    dec = decompose(bis(name))
    assert sorted(dec.summary()) == sorted(summary)
    assert dec.fundamental == all(nm == "trivial" for _, nm in summary)
    assert dec.target.base.size == bis(name).base.size


def test_m2_over_z2_has_17_elements():
    B, _ = rook_semigroup(2, cyclic_group(2))
    assert B.base.size == 17
    assert decompose(B).summary() == [(2, "Z2")]


def test_decompose_nonabelian():
    B, _ = rook_semigroup(1, s3())
    assert decompose(B).summary() == [(1, "S3")]
    assert group_name(s3()) == "S3"
    assert group_name(cyclic_group(4)) == "Z4"
    assert groups_isomorphic(cyclic_group(2), [[1, 0], [0, 1]])
    assert not groups_isomorphic(cyclic_group(4), [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])


@pytest.mark.parametrize("name", ["I2", "Z2", "I2+Z2", "2^2", "2^3", "M2(Z2)"])
def test_ideal_count_is_power_of_components(name):
    B = bis(name)
    k = len(components(atom_groupoid(B)[0]))
    assert len(additive_ideals(B)) == 2 ** k


def test_dot_export():
    G, _ = atom_groupoid(bis("I2"))
    dot = to_dot(G)
    assert dot.count("[label=") == 4        # 2 nodes and 2 cross arrows
    assert dot.count("->") == 2
    G, _ = atom_groupoid(check_bis(group_with_zero(cyclic_group(2))))
    dot = to_dot(G)
    assert dot.count("->") == 1 and dot.count("cluster_") == 1
    assert to_dot(G) == dot


def test_direct_sum_decomposes_into_parts():
    S = direct_sum(sym(1), sym(2), group_with_zero(cyclic_group(3)))
    assert sorted(decompose(check_bis(S)).summary()) == [(1, "Z3"), (1, "trivial"), (2, "trivial")]
