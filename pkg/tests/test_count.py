import math
from itertools import product

import pytest

from strategies import random_system, rng_for
from tropicount.count import (
    MONOMIAL,
    NOT_IN_LATTICE,
    NOT_SEMIREGULAR,
    SEMIREGULAR,
    count_binomial_system,
    count_univariate,
    regular_count,
    root_count_upper_bound,
    semiregular_at,
)
from tropicount.poly import parse, parse_polynomial
from tropicount.tropical import initial_system, lower_system, prevariety_points
from tropicount.valued import FieldDescriptor


def P(text, p=7, kind="qp"):
    return parse(f"field: {kind}:{p}\n{text}")


def test_semiregular_examples():
    r = semiregular_at(P("X + Y - 3; X*Y - 2"), (0, 0))
    assert (r.status, r.count, r.residue_zeros) == (SEMIREGULAR, 2, ((1, 2), (2, 1)))
    r = semiregular_at(P("X + Y - 2; X*Y - 1"), (0, 0))
    assert r.status == NOT_SEMIREGULAR and r.witness == (1, 1)
    r = semiregular_at(P("X + Y - 3; X*Y - 2"), ("1/2", 0))
    assert (r.status, r.count) == (NOT_IN_LATTICE, 0)
    r = semiregular_at(P("X + Y - 3; X*Y - 2"), (1, 0))
    assert (r.status, r.count) == (MONOMIAL, 0)


def test_binomial_examples():
    bc = count_binomial_system(P("X^2 - 7*Y; Y^2 - 7*X"), (1, 1))
    assert bc.snf.diagonal == [1, 3] and bc.rho == (1, 1) and bc.contribution == 3
    assert count_binomial_system(P("X^2 - 3"), (0,)).contribution == 0
    assert count_binomial_system(P("X - 5"), (0,)).contribution == 1
    with pytest.raises(ValueError):
        count_binomial_system(P("X^2 - 7*Y; Y^2 - 7*X"), (0, 0))


def test_binomial_char_divides_det():
    bc = count_binomial_system(P("X^7 - 1"))
    assert bc.status == NOT_SEMIREGULAR
    # over F_7, x^7 - 3 = (x - 3)^7: every 7th-power equation has a degenerate zero
    bc = count_binomial_system(P("X^7 - 3"))
    assert bc.status == NOT_SEMIREGULAR
    assert semiregular_at(P("X^7 - 3"), (0,)).witness == (3,)


def test_regular_count_examples():
    r = regular_count(P("X^2 - 7*Y; Y^2 - 7*X"))
    assert r.regular and r.total == 3 and r.prevariety.points == ((1, 1),)
    r = regular_count(P("X + Y - 3; X*Y - 2"))
    assert not r.regular and r.failure["kind"] == "non-binomial-lower-poly"
    r = regular_count(P("X + Y - 2; X - Y"))
    assert not r.regular and r.failure["kind"] == "infinite-prevariety"
    r = regular_count(P("X^7 - 1"))
    assert not r.regular and r.failure["kind"] == "char-divides-det"


def test_univariate_examples():
    r = count_univariate(P("(X - 1)*(X - 5)*(X - 25)", 5)[0])
    assert r.regular and r.total == 3
    r = count_univariate(P("X^2 + 7*X + 7")[0])
    assert r.regular and r.total == 0
    r = count_univariate(P("X^2 - 49")[0])
    assert r.regular and r.total == 2
    assert count_univariate(P("3*X^2")[0]).total == 0


def test_univariate_interior_point_and_fallback():
    f = P("X^2 - 3*X + 2")[0]  # all weights 0: (1, -3, 2) on one segment
    r = count_univariate(f)
    assert not r.regular and r.failure["kind"] == "non-binomial-lower-poly"
    r = count_univariate(f, fallback=True)
    assert r.fallback_used and r.total == 2
    r = count_univariate(P("X^2 - 2*X + 1")[0], fallback=True)  # double root
    assert r.total is None and r.failure["kind"] == "not-semiregular"


def test_univariate_agrees_with_regular_count():
    rng = rng_for(23)
    for _ in range(200):
        F = random_system(rng, n=1)
        a, b = count_univariate(F[0]), regular_count(F)
        assert a.regular == b.regular
        if a.regular:
            assert a.total == b.total


def test_univariate_total_at_most_degree_span():
    rng = rng_for(29)
    for _ in range(300):
        F = random_system(rng, n=1, max_terms=5)
        r = count_univariate(F[0], fallback=True)
        if r.total is not None:
            exps = F[0].exponents
            assert r.total <= exps[-1][0] - exps[0][0]


def test_upper_bound_examples():
    assert root_count_upper_bound(P("X^2 - 7*Y; Y^2 - 7*X")) == 36
    assert root_count_upper_bound(P("X^2 - 3"), tight=False) == 6
    assert root_count_upper_bound(P("X + Y - 2; X - Y")) == math.inf


def test_regular_total_matches_brute_force_and_bound():
    rng = rng_for(31)
    seen = 0
    for _ in range(300):
        F = random_system(rng, max_terms=2)
        r = regular_count(F)
        if not r.regular:
            continue
        seen += 1
        brute = 0
        for w in r.prevariety.lattice_points:
            S = initial_system(F, w)
            brute += sum(1 for x in product(range(1, F.field.p), repeat=F.n) if all(g(x) == 0 for g in S))
        assert r.total == brute
        assert r.total <= root_count_upper_bound(F)
    assert seen > 50


def test_lower_polynomial_reduction():
    rng = rng_for(37)
    for _ in range(200):
        F = random_system(rng)
        prev = prevariety_points(F)
        if not prev.finite:
            continue
        for w in prev.lattice_points:
            a = semiregular_at(F, w)
            b = semiregular_at(lower_system(F, w), w)
            assert a.status == b.status and a.count == b.count
