import math
from itertools import product

import pytest
from hypothesis import given, strategies as st

from tropicount.errors import BudgetExceeded
from tropicount.residue import (
    PrimeField,
    ResiduePoly,
    enumerate_zeros,
    has_degenerate_zero,
    is_prime,
    jacobian_at,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


def poly(p, n, terms):
    return ResiduePoly(p, n, terms)


# x + y - 3, x*y - 2 over F_7
def sys_a(p=7):
    return [poly(p, 2, {(1, 0): 1, (0, 1): 1, (0, 0): -3}), poly(p, 2, {(1, 1): 1, (0, 0): -2})]


def test_field_ops():
    k7, k5 = PrimeField(7), PrimeField(5)
    assert k7.mul(3, 5) == 1
    assert k7.inv(6) == 6
    assert k5.add(2, 3) == 0
    assert k7.div(1, 3) == 5
    assert k7.pow(3, -1) == 5
    with pytest.raises(ZeroDivisionError):
        k7.inv(0)


def test_prime_validation():
    with pytest.raises(ValueError):
        PrimeField(9)
    assert [q for q in range(40) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def test_power_equation_examples():
    assert PrimeField(7).solve_power_equation(1, 3) == [1, 2, 4]
    assert PrimeField(5).solve_power_equation(3, 2) == []
    assert PrimeField(7).solve_power_equation(5, 1) == [5]


def test_power_equation_exhaustive():
    for p in SMALL_PRIMES:
        k = PrimeField(p)
        for d in range(1, 51):
            total = 0
            for c in range(1, p):
                sols = k.solve_power_equation(c, d)
                brute = [x for x in range(1, p) if pow(x, d, p) == c]
                assert sols == brute
                assert len(sols) in (0, math.gcd(p - 1, d))
                assert bool(sols) == (pow(c, (p - 1) // math.gcd(p - 1, d), p) == 1)
                total += len(sols)
            assert total == p - 1


def test_power_equation_large_prime_uses_root_finder():
    p = 1_000_003
    k = PrimeField(p)
    c = pow(12345, 6, p)
    sols = k.solve_power_equation(c, 6)
    assert len(sols) == math.gcd(p - 1, 6)
    assert all(pow(x, 6, p) == c for x in sols)


def test_enumerate_zeros_examples():
    assert enumerate_zeros(sys_a(), 2) == [(1, 2), (2, 1)]
    assert enumerate_zeros([poly(5, 1, {(1,): 1, (0,): -1})], 1) == [(1,)]
    assert enumerate_zeros([poly(7, 1, {(2,): 1, (0,): -3})], 1) == []


def test_enumerate_zeros_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_zeros(sys_a(), 2, budget=10)


def test_jacobian_examples():
    S = sys_a()
    assert jacobian_at(S, (1, 2)) == 6
    assert jacobian_at(S, (2, 1)) == 1
    assert jacobian_at([poly(11, 1, {(1,): 1, (0,): -4})], (4,)) == 1


def test_degenerate_zero_examples():
    S = [poly(7, 2, {(1, 0): 1, (0, 1): 1, (0, 0): -2}), poly(7, 2, {(1, 1): 1, (0, 0): -1})]
    assert has_degenerate_zero(S) == (1, 1)
    assert has_degenerate_zero(sys_a()) is None
    assert has_degenerate_zero([poly(5, 1, {(1,): 1, (0,): -1})]) is None


def test_laurent_exponents_and_derivative_mod_p():
    f = poly(5, 1, {(-1,): 2, (5,): 1})  # 2/x + x^5
    assert f((2,)) == (2 * pow(2, -1, 5) + 32) % 5
    assert f.partial(0).terms == {(-2,): 3}  # x^5 term dies since 5 = 0 mod 5


@given(
    st.sampled_from([3, 5, 7]),
    st.dictionaries(
        st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(1, 6), min_size=1, max_size=3
    ),
    st.dictionaries(
        st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(1, 6), min_size=1, max_size=3
    ),
)
def test_enumerate_zeros_matches_substitution(p, t1, t2):
    S = [poly(p, 2, t1), poly(p, 2, t2)]
    if any(len(g) == 0 for g in S):
        return
    zeros = enumerate_zeros(S, 2)
    brute = [x for x in product(range(1, p), repeat=2) if all(g(x) == 0 for g in S)]
    assert zeros == brute
