"""Truncated pi-adic numbers for Q_p and F_p((u)), normalized so that v(pi) = 1.

A nonzero :class:`KNumber` is ``pi**valuation * unit`` where ``unit`` is a unit
of the valuation ring known to ``prec`` digits (relative precision), or known
exactly when ``exact`` is set.  Precision is tracked in the capped-relative
style: sums keep the smaller absolute precision of their operands, products
the smaller relative precision, and nothing is ever stored beyond the field's
``precision`` cap.

Units are backend-specific: Python ints for Q_p and coefficient tuples
(lowest degree first) for F_p((u)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

from .errors import PrecisionError
from .residue import is_prime

INF = math.inf
DEFAULT_PRECISION = 32


@dataclass(frozen=True)
class FieldDescriptor:
    """Which complete field we work in: ``kind`` is ``"qp"`` or ``"laurent"``."""

    kind: str
    p: int
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.kind not in ("qp", "laurent"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.precision < 1:
            raise ValueError("precision must be at least 1")

    @classmethod
    def parse(cls, text: str, precision: int | None = None) -> "FieldDescriptor":
        kind, _, p = text.strip().partition(":")
        if not p:
            raise ValueError(f"field must look like qp:<p> or laurent:<p>, got {text!r}")
        return cls(kind.strip(), int(p), DEFAULT_PRECISION if precision is None else precision)

    def with_precision(self, precision: int) -> "FieldDescriptor":
        return replace(self, precision=precision)

    def __str__(self):
        return f"{self.kind}:{self.p}"

    @property
    def units(self):
        return _backend(self.kind, self.p)

    # constructors, as a convenience
    def __call__(self, num, den=1) -> "KNumber":
        if isinstance(num, KNumber):
            return num.coerce(self)
        q = Fraction(num) / Fraction(den)
        return from_rational(q.numerator, q.denominator, self)

    def pi(self) -> "KNumber":
        return KNumber(self, 1, self.units.one, self.precision, True)

    def zero(self, absprec=INF) -> "KNumber":
        return _zero(self, absprec)

    def one(self) -> "KNumber":
        return KNumber(self, 0, self.units.one, self.precision, True)


class _PadicUnits:
    """Units of Z_p as Python ints.  Exact units may be negative."""

    def __init__(self, p):
        self.p = p
        self.one = 1
        self.zero = 0

    def mod(self, u, r):
        return u % self.p**r

    def is_zero(self, u):
        return u == 0

    def val(self, u):
        k = 0
        while u % self.p == 0:
            u //= self.p
            k += 1
        return k

    def shift_down(self, u, k):
        return u // self.p**k

    def shift_up(self, u, k):
        return u * self.p**k

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b, r=None):
        return a * b if r is None else a * b % self.p**r

    def inv(self, u, r):
        return pow(u, -1, self.p**r)

    def exact_inverse(self, u):
        return u if u in (1, -1) else None

    def fits(self, u, n):
        return abs(u) < self.p**n

    def first_digit(self, u):
        return u % self.p

    def digits(self, u, r):
        u %= self.p**r
        out = []
        for _ in range(r):
            u, d = divmod(u, self.p)
            out.append(d)
        return tuple(out)

    def from_digits(self, ds):
        u = 0
        for d in reversed(ds):
            u = u * self.p + d
        return u

    def lift(self, d):
        return d % self.p


class _LaurentUnits:
    """Power series over F_p as coefficient tuples, lowest degree first, no trailing zeros."""

    def __init__(self, p):
        self.p = p
        self.one = (1,)
        self.zero = ()

    @staticmethod
    def _trim(c):
        c = list(c)
        while c and c[-1] == 0:
            c.pop()
        return tuple(c)

    def mod(self, u, r):
        return self._trim(u[:r])

    def is_zero(self, u):
        return not u

    def val(self, u):
        for k, c in enumerate(u):
            if c:
                return k
        raise ValueError("valuation of zero")

    def shift_down(self, u, k):
        return u[k:]

    def shift_up(self, u, k):
        return (0,) * k + tuple(u) if u else ()

    def add(self, a, b):
        p = self.p
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % p
        return self._trim(out)

    def neg(self, a):
        return tuple(-c % self.p for c in a)

    def mul(self, a, b, r=None):
        if not a or not b:
            return ()
        p = self.p
        size = len(a) + len(b) - 1
        if r is not None:
            size = min(size, r)
        out = [0] * size
        for i, x in enumerate(a):
            if i >= size:
                break
            if x:
                for j in range(min(len(b), size - i)):
                    out[i + j] += x * b[j]
        return self._trim(c % p for c in out)

    def inv(self, u, r):
        p = self.p
        c0inv = pow(u[0], -1, p)
        out = [0] * r
        for k in range(r):
            s = 1 if k == 0 else 0
            for i in range(1, min(k, len(u) - 1) + 1):
                s -= u[i] * out[k - i]
            out[k] = s * c0inv % p
        return self._trim(out)

    def exact_inverse(self, u):
        return (pow(u[0], -1, self.p),) if len(u) == 1 else None

    def fits(self, u, n):
        return len(u) <= n

    def first_digit(self, u):
        return u[0]

    def digits(self, u, r):
        u = tuple(u[:r])
        return u + (0,) * (r - len(u))

    def from_digits(self, ds):
        return self._trim(d % self.p for d in ds)

    def lift(self, d):
        return self._trim((d % self.p,))


@lru_cache(maxsize=None)
def _backend(kind, p):
    return _PadicUnits(p) if kind == "qp" else _LaurentUnits(p)


@dataclass(frozen=True, eq=False, slots=True)
class KNumber:
    """An element of K at truncated precision.

    ``valuation`` is ``math.inf`` for zero; then ``prec`` is the absolute
    precision to which the element is known to vanish.  For nonzero elements
    ``prec`` is the number of known digits of the unit.
    """

    field: FieldDescriptor
    valuation: float
    unit: object
    prec: float
    exact: bool

    # -- structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.valuation == INF

    @property
    def absprec(self):
        if self.exact:
            return INF
        if self.is_zero():
            return self.prec
        return self.valuation + self.prec

    @property
    def certified_valuation(self):
        """The valuation, or for a zero-to-precision element the proven lower bound."""
        return self.absprec if self.is_zero() else self.valuation

    @property
    def first_digit(self) -> int:
        if self.is_zero():
            raise PrecisionError("first digit of zero")
        return self.field.units.first_digit(self.unit)

    @property
    def digits(self) -> tuple:
        """Digits of the unit part, lowest first; ``field.precision`` digits if exact."""
        if self.is_zero():
            return ()
        r = self.field.precision if self.exact else int(self.prec)
        return self.field.units.digits(self.unit, r)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, KNumber):
            if other.field.kind != self.field.kind or other.field.p != self.field.p:
                raise ValueError(f"mixing {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        B = self.field.units
        u = B.neg(self.unit)
        if not self.exact:
            u = B.mod(u, int(self.prec))
        return KNumber(self.field, self.valuation, u, self.prec, self.exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(other, -self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    __rmul__ = __mul__

    def inverse(self) -> "KNumber":
        if self.is_zero():
            if self.exact:
                raise ZeroDivisionError("division by zero in K")
            raise PrecisionError("division by an element indistinguishable from zero")
        B = self.field.units
        N = self.field.precision
        if self.exact:
            u = B.exact_inverse(self.unit)
            if u is not None:
                return KNumber(self.field, -self.valuation, u, N, True)
            r = N
        else:
            r = int(self.prec)
        return KNumber(self.field, -self.valuation, B.inv(self.unit, r), r, False)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other.inverse())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(other, self.inverse())

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = _mul(result, base)
            e >>= 1
            if e:
                base = _mul(base, base)
        return result

    def shift(self, k: int) -> "KNumber":
        """Multiply by ``pi**k`` (exact)."""
        if self.is_zero():
            return self if self.exact else KNumber(self.field, INF, self.unit, self.prec + k, False)
        return KNumber(self.field, self.valuation + k, self.unit, self.prec, self.exact)

    def coerce(self, field: FieldDescriptor) -> "KNumber":
        """Re-home this number in ``field`` (same kind and p), capping precision."""
        if (field.kind, field.p) != (self.field.kind, self.field.p):
            raise ValueError(f"cannot coerce {self.field} into {field}")
        if self.is_zero():
            return KNumber(field, INF, self.unit, self.prec, self.exact)
        return _make(field, self.valuation, self.unit, self.absprec, self.exact)

    def __eq__(self, other):
        other = self._coerce(other) if not isinstance(other, KNumber) else other
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.is_zero():
            tag = "exact" if self.exact else f"O(pi^{self.prec})"
            return f"KNumber({self.field}, 0 {tag})"
        ds = ",".join(str(d) for d in self.digits[:8])
        more = "..." if len(self.digits) > 8 else ""
        tag = " exact" if self.exact else ""
        return f"KNumber({self.field}, v={self.valuation}, digits=[{ds}{more}]{tag})"


def _zero(field, absprec=INF):
    exact = absprec == INF
    return KNumber(field, INF, field.units.zero, INF if exact else absprec, exact)


def _make(field, m, s, absprec, exact):
    """Normalize ``pi**m * s`` where ``s`` is any element of the valuation ring."""
    B = field.units
    N = field.precision
    if exact:
        if B.is_zero(s):
            return _zero(field)
        k = B.val(s)
        u = B.shift_down(s, k)
        if B.fits(u, N):
            return KNumber(field, m + k, u, N, True)
        return KNumber(field, m + k, B.mod(u, N), N, False)
    avail = absprec - m
    if avail <= 0:
        return _zero(field, absprec)
    s = B.mod(s, int(avail))
    if B.is_zero(s):
        return _zero(field, absprec)
    k = B.val(s)
    v = m + k
    rel = int(min(absprec - v, N))
    return KNumber(field, v, B.mod(B.shift_down(s, k), rel), rel, False)


def _add(a: KNumber, b: KNumber) -> KNumber:
    if a.is_zero() and a.exact:
        return b
    if b.is_zero() and b.exact:
        return a
    field = a.field if a.field.precision <= b.field.precision else b.field
    absprec = min(a.absprec, b.absprec)
    exact = a.exact and b.exact
    nz = [x for x in (a, b) if not x.is_zero()]
    if not nz:
        return _zero(field, absprec)
    B = field.units
    m = min(x.valuation for x in nz)
    if not exact and m >= absprec:
        return _zero(field, absprec)
    s = B.zero
    for x in nz:
        gap = x.valuation - m
        if not exact and gap >= absprec - m:
            continue
        s = B.add(s, B.shift_up(x.unit, gap))
    return _make(field, m, s, absprec, exact)


def _mul(a: KNumber, b: KNumber) -> KNumber:
    field = a.field if a.field.precision <= b.field.precision else b.field
    if a.is_zero() or b.is_zero():
        if (a.is_zero() and a.exact) or (b.is_zero() and b.exact):
            return _zero(field)
        absprec = a.certified_valuation + b.certified_valuation
        return _zero(field, absprec)
    v = a.valuation + b.valuation
    B = field.units
    if a.exact and b.exact:
        return _make(field, v, B.mul(a.unit, b.unit), INF, True)
    rel = min(INF if a.exact else a.prec, INF if b.exact else b.prec, field.precision)
    rel = int(rel)
    return _make(field, v, B.mul(a.unit, b.unit, rel), v + rel, False)


def _vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def from_rational(num: int, den: int, field: FieldDescriptor) -> KNumber:
    """The element ``num/den`` of K (for F_p((u)) the image of the rational in F_p)."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    num, den = int(num), int(den)
    p = field.p
    if field.kind == "laurent":
        if den % p == 0:
            raise ZeroDivisionError(f"{den} vanishes in F_{p}")
        c = num * pow(den, -1, p) % p
        if c == 0:
            return _zero(field)
        return KNumber(field, 0, (c,), field.precision, True)
    if num == 0:
        return _zero(field)
    v = _vp(num, p) - _vp(den, p)
    num //= p ** _vp(num, p)
    den //= p ** _vp(den, p)
    N = field.precision
    if den < 0:
        num, den = -num, -den
    if den == 1 and abs(num) < p**N:
        return KNumber(field, v, num, N, True)
    mod = p**N
    return KNumber(field, v, num * pow(den, -1, mod) % mod, N, False)


def from_int(n: int, field: FieldDescriptor) -> KNumber:
    return from_rational(n, 1, field)


def from_laurent(coeffs: dict, field: FieldDescriptor) -> KNumber:
    """The finite Laurent polynomial ``sum c * u**k`` (F_p((u)) only), exact."""
    if field.kind != "laurent":
        raise ValueError("u-expressions need a laurent field")
    p = field.p
    clean = {k: c % p for k, c in coeffs.items() if c % p}
    if not clean:
        return _zero(field)
    lo = min(clean)
    hi = max(clean)
    s = tuple(clean.get(k, 0) for k in range(lo, hi + 1))
    return _make(field, lo, s, INF, True)


def from_digits(valuation: int, digits, field: FieldDescriptor, exact: bool = False) -> KNumber:
    """Build ``pi**valuation * sum(d_i pi**i)``; ``digits[0]`` must be nonzero."""
    digits = tuple(int(d) % field.p for d in digits)
    if not digits or digits[0] == 0:
        raise ValueError("first digit must be nonzero")
    B = field.units
    u = B.from_digits(digits)
    if exact:
        return _make(field, valuation, u, INF, True)
    r = min(len(digits), field.precision)
    return KNumber(field, valuation, B.mod(u, r), r, False)


def decompose(x: KNumber):
    """Split ``x = pi**v * lift(delta) * tail`` with ``tail`` in ``1 + M``.

    ``lift`` is the integer representative in ``{1, ..., p-1}``.
    """
    if x.is_zero():
        raise ValueError("zero has no decomposition")
    v = int(x.valuation)
    delta = x.first_digit
    tail = x.shift(-v) / from_int(delta, x.field)
    return v, delta, tail


def recompose(v: int, delta: int, tail: KNumber) -> KNumber:
    return (from_int(delta, tail.field) * tail).shift(v)


def random_knumber(field: FieldDescriptor, rng, valuation: int, digits: int | None = None) -> KNumber:
    """A random element of valuation ``valuation`` with uniform digits (first one nonzero)."""
    r = field.precision if digits is None else digits
    ds = [int(rng.integers(1, field.p))] + [int(d) for d in rng.integers(0, field.p, size=r - 1)]
    return from_digits(valuation, ds, field)


def to_fraction(x: KNumber, bound: int | None = None):
    """Rational reconstruction for Q_p elements; ``None`` when no small fraction matches."""
    f = x.field
    if f.kind != "qp":
        raise ValueError("rational reconstruction needs a p-adic field")
    if x.is_zero():
        return Fraction(0)
    p = f.p
    v = int(x.valuation)
    if x.exact:
        return Fraction(x.unit) * Fraction(p) ** v
    r = int(x.prec)
    mod = p**r
    u = x.unit % mod
    if bound is None:
        bound = math.isqrt(mod // 2)
    # extended Euclid on (mod, u), stop when remainder <= bound
    r0, r1 = mod, u
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, s1) != 1 or s1 % p == 0:
        return None
    frac = Fraction(r1, s1)
    return frac * Fraction(p) ** v
