import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tropicount.errors import CharacteristicError
from tropicount.expect import (
    E_k_of_gamma,
    ResidueModel,
    _support_masks,
    closed_form_pba,
    expectation_bounds,
    expected_roots,
    lower_hull_support,
    p_i_bracket,
    simulate_expected_roots,
    support_tallies,
)

supports = st.lists(st.integers(-10, 20), min_size=2, max_size=6, unique=True).map(sorted).map(tuple)


def test_support_examples():
    assert lower_hull_support((0, 1, 0), (0, 1, 2)) == (0, 2)
    assert lower_hull_support((1, 0, 1), (0, 1, 2)) == (0, 1, 2)
    assert lower_hull_support((0, 0, 0), (0, 1, 2)) == (0, 1, 2)  # ties stay on the hull
    assert lower_hull_support((0, 5, 5, 0), (0, 1, 2, 3)) == (0, 3)
    with pytest.raises(ValueError):
        lower_hull_support((0, 1), (1, 0))


@settings(max_examples=200, deadline=None)
@given(supports, st.integers(0, 2**32 - 1))
def test_vectorized_masks_match_exact(A, seed):
    V = np.random.default_rng(seed).random((20, len(A)))
    masks = _support_masks(V, A)
    for row, m in zip(V, masks):
        exact = lower_hull_support([Fraction(float(x)) for x in row], A)
        assert tuple(a for i, a in enumerate(A) if m >> i & 1) == exact


def test_tallies_complete():
    t = support_tallies((0, 1, 3, 4), samples=5000, seed=3)
    assert sum(t.values()) == 5000
    assert all(B[0] == 0 and B[-1] == 4 for B in t)


def test_translation_and_scaling_invariance():
    base = support_tallies((0, 1, 3, 7), samples=20000, seed=5)
    for A in [(5, 6, 8, 12), (0, 2, 6, 14), (-3, 0, 6, 18)]:
        other = support_tallies(A, samples=20000, seed=5)
        m = dict(zip(A, (0, 1, 3, 7)))
        assert {tuple(m[a] for a in B): c for B, c in other.items()} == base


def test_E_k_table():
    for g in range(1, 7):
        assert E_k_of_gamma(g, ResidueModel("ac")) == g
        assert E_k_of_gamma(g, ResidueModel("real")) == 1
        assert E_k_of_gamma(g, ResidueModel("fp", 7)) == 1
    with pytest.raises(ValueError):
        E_k_of_gamma(0, ResidueModel("ac"))
    assert ResidueModel.parse("fp:5") == ResidueModel("fp", 5)
    with pytest.raises(ValueError):
        ResidueModel.parse("fp:4")


def test_two_point_supports_exact():
    for d in range(1, 7):
        r = expected_roots((0, d), "ac")
        assert r.exact and r.E == 1 and r.sigma == 0
        assert expected_roots((0, d), "real").E == Fraction(1, d)


def test_closed_form_agrees_with_mc():
    r = expected_roots((0, 1, 2), "ac", samples=200000, seed=1)
    for B, P in closed_form_pba((0, 1, 2)).items():
        assert abs(float(r.per_B[B][0] - P)) < 0.01


def test_bounds_and_brackets():
    lo, hi = expectation_bounds(2)
    assert lo == 1 and hi == pytest.approx(2 * math.log(2))
    for t in range(3, 7):
        A = tuple(range(t))
        r = expected_roots(A, "ac", samples=100000, seed=t)
        lo, hi = expectation_bounds(t)
        assert lo - 3 * r.sigma <= r.E <= hi + 3 * r.sigma
        assert r.E == r.one_plus_sum_Pi  # ac: each segment contributes exactly one
        for i, a in enumerate(A[1:-1], start=2):
            blo, bhi = p_i_bracket(i, t)
            assert blo - 0.01 <= r.P_interior[a] <= bhi + 0.01


def test_determinism_across_jobs():
    a = expected_roots((0, 1, 3, 4), "ac", samples=300000, seed=9, jobs=1)
    b = expected_roots((0, 1, 3, 4), "ac", samples=300000, seed=9, jobs=4)
    assert a == b
    c = expected_roots((0, 1, 3, 4), "ac", samples=300000, seed=10)
    assert c.E != a.E


def test_characteristic_error():
    with pytest.raises(CharacteristicError):
        expected_roots((0, 2), "fp:2")
    with pytest.raises(CharacteristicError):
        expected_roots((0, 1, 4), "fp:3")
    expected_roots((0, 1, 4), "fp:5", samples=1000)


def test_simulation_linear_is_one():
    r = simulate_expected_roots((0, 1), 7, 10, trials=3000, seed=2)
    assert r.mean == 1.0 and r.skipped == 0 and r.sigma == 0


def test_simulation_quadratic_binomial():
    M = 20
    r = simulate_expected_roots((0, 2), 7, M, trials=20000, seed=4)
    n = 2 * M + 1
    exact = (n * n + 1) / (2 * n * n)  # P(v0 - v2 even) times E[#roots | even] = 1
    assert abs(r.mean - exact) <= 5 * r.sigma
    assert r.band == pytest.approx(2 / 41)


def test_simulation_deterministic_across_jobs():
    a = simulate_expected_roots((0, 1, 2), 7, 5, trials=70000, seed=1, jobs=1)
    b = simulate_expected_roots((0, 1, 2), 7, 5, trials=70000, seed=1, jobs=2)
    assert a == b
