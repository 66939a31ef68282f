from itertools import product

import numpy as np
import pytest

from bisem.core import cyclic_group, direct_sum, is_isomorphic
from bisem.rook import (GeneralizedRookMatrix, check_delta_embedding, check_quasi_ideal,
                        delta_embedding, grm_multiply, grm_semigroup, verify_d_lemmas,
                        verify_type_theorem)
from bisem.structure import rook_semigroup

from conftest import bis, sym

CASES = [("I1", 2, 7), ("I1", 3, 34), ("Z2", 2, 17), ("I2", 2, 209), ("2^2", 2, 49)]


def brute_count(S, k):
    # [DERIVED] every k x k array of elements, filtered by the row and column conditions
    n = S.base.size
    return sum(not GeneralizedRookMatrix(k, tuple(tuple(c[i * k:(i + 1) * k]) for i in range(k)))
               .violation(S) for c in product(range(n), repeat=k * k))


@pytest.mark.parametrize("name,k,size", CASES)
def test_sizes(name, k, size):
    M = grm_semigroup(bis(name), k)
    assert M.size == size
    if bis(name).base.size ** (k * k) <= 10 ** 5:
        assert brute_count(bis(name), k) == size


@pytest.mark.parametrize("name,k,other", [("I1", 2, lambda: sym(2)), ("I1", 3, lambda: sym(3)),
                                          ("I2", 2, lambda: sym(4)),
                                          ("2^2", 2, lambda: direct_sum(sym(2), sym(2))),
                                          ("Z2", 2, lambda: rook_semigroup(2, cyclic_group(2))[0].base)])
def test_isomorphism_types(name, k, other):
    assert is_isomorphic(grm_semigroup(bis(name), k).B.base, other())


@pytest.mark.parametrize("name,k", [("Z2", 2), ("2^2", 2), ("I1", 3)])
def test_table_matches_matrix_product(name, k):
    M = grm_semigroup(bis(name), k)
    for a in range(M.size):
        for b in range(M.size):
            C = grm_multiply(M.S, M.matrix(a), M.matrix(b))
            assert M.B.base.mul[a, b] == M.index(C)
        assert M.B.base.inv[a] == M.index(M.matrix(a).inverse(M.S))


def test_sampled_products_in_m2_i2():
    M = grm_semigroup(bis("I2"), 2)
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, M.size, size=(400, 2)):
        assert M.B.base.mul[a, b] == M.index(grm_multiply(M.S, M.matrix(a), M.matrix(b)))


def test_make_rejects_bad_matrix():
    S = bis("I1")
    with pytest.raises(ValueError):
        GeneralizedRookMatrix.make(S, [[1, 1], [0, 0]])
    with pytest.raises(ValueError):
        GeneralizedRookMatrix.make(S, [[1, 0], [1, 0]])
    assert GeneralizedRookMatrix.make(S, [[0, 1], [1, 0]]).label(S) == "[0 (1>1);(1>1) 0]"


@pytest.mark.parametrize("name,k", [(n, k) for n, k, _ in CASES])
def test_d_lemmas(name, k):
    report = verify_d_lemmas(grm_semigroup(bis(name), k))
    assert all(report.values()), report


@pytest.mark.parametrize("name,k", [(n, k) for n, k, _ in CASES])
def test_type_theorem(name, k):
    report = verify_type_theorem(grm_semigroup(bis(name), k))
    assert report, report
    assert report.unknown == 0 and report.equalities > 0


@pytest.mark.parametrize("name,k", [(n, k) for n, k, _ in CASES])
def test_delta_embedding_and_quasi_ideal(name, k):
    M = grm_semigroup(bis(name), k)
    assert check_delta_embedding(M)
    assert check_quasi_ideal(M)
    h = delta_embedding(M)
    assert h[0] == 0 and len(set(h.tolist())) == bis(name).base.size


def test_delta_pads_with_zeros():
    M = grm_semigroup(bis("I1"), 3)
    assert M.delta(1) == M.index([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(ValueError):
        M.delta(1, 1, 1, 1)
    with pytest.raises(KeyError):
        M.index([[1, 1, 0], [0, 0, 0], [0, 0, 0]])


def test_dimension_guard():
    with pytest.raises(ValueError):
        grm_semigroup(bis("I3"), 4)
    with pytest.raises(ValueError):
        grm_semigroup(bis("I1"), 0)
