"""Random instances shared by the property and acceptance tests."""

from fractions import Fraction

import numpy as np

from tropicount.poly import KPolynomial, KSystem
from tropicount.valued import FieldDescriptor, random_knumber

PRIMES = (3, 5, 7, 11)


def random_field(rng, kinds=("qp", "laurent"), precision=8, primes=PRIMES):
    return FieldDescriptor(str(rng.choice(kinds)), int(rng.choice(primes)), precision)


def random_coefficient(rng, field, val_range=5):
    return random_knumber(field, rng, int(rng.integers(-val_range, val_range + 1)))


def random_polynomial(rng, field, n, terms, exp_range=3, val_range=5):
    exps = set()
    while len(exps) < terms:
        exps.add(tuple(int(x) for x in rng.integers(-exp_range, exp_range + 1, size=n)))
    items = [(e, random_coefficient(rng, field, val_range)) for e in sorted(exps)]
    return KPolynomial.from_terms(field, n, items)


def random_system(rng, field=None, n=None, min_terms=2, max_terms=3, **kw):
    field = field or random_field(rng)
    n = n or int(rng.integers(1, 3))
    polys = [random_polynomial(rng, field, n, int(rng.integers(min_terms, max_terms + 1)), **kw) for _ in range(n)]
    return KSystem(tuple(polys), field)


def random_weight(rng, n, span=3, denominators=(1, 1, 2, 3)):
    return tuple(Fraction(int(rng.integers(-span * 6, span * 6 + 1)), int(rng.choice(denominators))) for _ in range(n))


def weight_on_trop(rng, f):
    """A weight where two random terms of ``f`` tie (so it lies in Trop(f) unless beaten)."""
    n = f.n
    i, j = rng.choice(len(f), size=2, replace=False)
    (ei, ci), (ej, cj) = f.terms[i], f.terms[j]
    diff = [a - b for a, b in zip(ei, ej)]
    rhs = Fraction(int(cj.valuation) - int(ci.valuation))
    w = list(random_weight(rng, n))
    k = next(m for m in range(n) if diff[m] != 0)
    rest = sum(Fraction(diff[m]) * w[m] for m in range(n) if m != k)
    w[k] = (rhs - rest) / diff[k]
    return tuple(w)


def rng_for(seed):
    return np.random.default_rng(seed)
