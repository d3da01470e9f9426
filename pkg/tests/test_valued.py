from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tropicount.errors import PrecisionError
from tropicount.valued import (
    FieldDescriptor,
    decompose,
    from_int,
    from_laurent,
    from_rational,
    random_knumber,
    recompose,
    to_fraction,
)

Q5, Q7 = FieldDescriptor("qp", 5), FieldDescriptor("qp", 7)
L5 = FieldDescriptor("laurent", 5)


def test_field_descriptor_parse():
    f = FieldDescriptor.parse("qp:7", precision=12)
    assert (f.kind, f.p, f.precision) == ("qp", 7, 12)
    assert str(FieldDescriptor.parse("laurent:5")) == "laurent:5"
    for bad in ("qp:8", "foo:7", "qp"):
        with pytest.raises(ValueError):
            FieldDescriptor.parse(bad)


def test_from_rational_examples():
    x = from_rational(-50, 1, Q5)
    assert (x.valuation, x.first_digit) == (2, 3)
    one = from_rational(1, 1, Q7)
    assert one.valuation == 0 and one.digits[:3] == (1, 0, 0)
    y = from_rational(1, 7, Q7)
    assert y.valuation == -1 and y.digits[:3] == (1, 0, 0)
    assert from_rational(0, 5, Q7).is_zero()


def test_arith_examples():
    a = from_digits_unit(Q7, 0, 3)
    b = from_digits_unit(Q7, 1, 2)
    prod = a * b
    assert (prod.valuation, prod.first_digit) == (1, 6)
    assert (from_int(108, Q7) - 3).valuation == 1
    assert (from_int(7, Q7) ** 2 - 49).is_zero()
    z = from_int(25, Q5) + random_knumber(Q5, np.random.default_rng(0), 3)
    assert z.valuation == 2


def from_digits_unit(field, v, d):
    return from_int(d, field).shift(v)


def test_decompose_examples():
    v, d, tail = decompose(from_int(-50, Q5))
    assert (v, d) == (2, 3) and tail.valuation == 0 and tail.first_digit == 1
    assert decompose(from_int(1, Q7))[:2] == (0, 1)
    v, d, tail = decompose(from_int(14, Q7))
    assert (v, d) == (1, 2) and tail == 1


def test_division_and_reconstruction():
    third = from_rational(1, 3, Q7)
    assert third * 3 == 1
    assert to_fraction(third) == Fraction(1, 3)
    assert to_fraction(from_rational(-22, 49, Q7)) == Fraction(-22, 49)
    with pytest.raises(ZeroDivisionError):
        Q7.zero().inverse()


def test_precision_loss_is_tracked():
    N = Q7.precision
    x = from_rational(1, 3, Q7)
    y = x + from_int(7**N, Q7) - x  # difference is below the known precision of x
    assert y.is_zero() and not y.exact
    with pytest.raises(PrecisionError):
        y.inverse()


def test_laurent_arithmetic():
    x = from_laurent({0: 1, 1: 1}, L5)  # 1 + u
    y = x * x - from_laurent({0: 1, 1: 2, 2: 1}, L5)
    assert y.is_zero()
    z = from_laurent({-1: 2, 0: 3}, L5)
    assert (z.valuation, z.first_digit) == (-1, 2)
    assert (from_int(5, L5)).is_zero()  # char 5


@pytest.mark.parametrize("field", [Q5, Q7, L5, FieldDescriptor("laurent", 3)])
def test_round_trip_and_multiplicativity(field):
    rng = np.random.default_rng(42)
    for _ in range(1000):
        x = random_knumber(field, rng, int(rng.integers(-6, 7)))
        y = random_knumber(field, rng, int(rng.integers(-6, 7)))
        v, d, tail = decompose(x)
        assert recompose(v, d, tail) == x
        assert tail.valuation == 0 and tail.first_digit == 1
        assert (x * y).first_digit == x.first_digit * y.first_digit % field.p
        assert (x * y).valuation == x.valuation + y.valuation
        if x.valuation != y.valuation:
            assert (x + y).valuation == min(x.valuation, y.valuation)


@given(st.integers(-10**6, 10**6).filter(bool), st.integers(1, 10**6))
def test_rational_round_trip(num, den):
    q = Fraction(num, den)
    x = from_rational(q.numerator, q.denominator, Q7)
    assert to_fraction(x) == q
