import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tropicount.snf import det, identity, matmul, monomial_power, smith_normal_form, unimodular_inverse


def check_snf(M):
    s = smith_normal_form(M)
    assert [list(r) for r in matmul(matmul(s.P, s.D), s.Q)] == [list(r) for r in M]
    assert abs(det(s.P)) == 1 and abs(det(s.Q)) == 1
    n = len(M)
    assert all(s.D[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    d = s.diagonal
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b % a == 0) if a else b == 0
    assert math.prod(d) == abs(det(M))
    return s


def test_examples():
    s = check_snf(identity(3))
    assert s.diagonal == [1, 1, 1] and [list(r) for r in s.P] == identity(3) and [list(r) for r in s.Q] == identity(3)
    assert check_snf([[2, 0], [0, 3]]).diagonal == [1, 6]
    assert check_snf([[2, -1], [-1, 2]]).diagonal == [1, 3]


def test_singular_and_zero():
    assert check_snf([[0, 0], [0, 0]]).diagonal == [0, 0]
    assert check_snf([[2, 4], [1, 2]]).diagonal == [1, 0]


def test_det():
    assert det([[2, -1], [-1, 2]]) == 3
    assert det([[0, 1], [1, 0]]) == -1
    assert det([[1, 2, 3], [4, 5, 6], [7, 8, 9]]) == 0


def test_unimodular_inverse():
    assert unimodular_inverse(identity(2)) == identity(2)
    assert unimodular_inverse([[1, 1], [0, 1]]) == [[1, -1], [0, 1]]
    with pytest.raises(ValueError):
        unimodular_inverse([[2, 0], [0, 1]])
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 6))
        U = identity(n)
        for _ in range(int(rng.integers(0, 11))):
            i, j = rng.choice(n, size=2, replace=True)
            E = identity(n)
            if i == j:
                E[i][i] = -1
            else:
                E[i][j] = int(rng.integers(-3, 4))
            U = matmul(U, E)
        assert matmul(U, unimodular_inverse(U)) == identity(n)


def test_monomial_power_examples():
    assert monomial_power((3, 2), identity(2), 7) == (3, 2)
    assert monomial_power((3, 2), [[2, -1], [-1, 2]], 7) == (1, 6)


@given(
    st.integers(2, 4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n),
            st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n),
            st.lists(st.integers(1, 10), min_size=n, max_size=n),
        )
    )
)
def test_monomial_power_functorial(data):
    n, P, Q, x = data
    p = 11
    assert monomial_power(x, matmul(P, Q), p) == monomial_power(monomial_power(x, Q, p), P, p)


@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-10, 10), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_snf_properties(M):
    check_snf(M)
