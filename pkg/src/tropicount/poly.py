"""Laurent polynomials and square systems over K, plus the system-file parser.

System files look like::

    # comment
    field: qp:7
    precision: 20
    X1^2 - 7*X2; X2^2 - 7*X1

Coefficients are rationals for ``qp`` fields and u-expressions such as
``u^-1*(2 + 3*u)`` for ``laurent`` fields.  Variables are ``X1..Xn`` or the
aliases ``X, Y, Z, W``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .valued import FieldDescriptor, KNumber, from_int, from_laurent, from_rational, to_fraction

ALIASES = "XYZW"


@dataclass(frozen=True)
class KPolynomial:
    """``sum a_i X^alpha_i`` with nonzero coefficients and distinct exponents, sorted."""

    field: FieldDescriptor
    n: int
    terms: tuple  # ((exponent tuple, KNumber), ...)

    @classmethod
    def from_terms(cls, field, n, items) -> "KPolynomial":
        """Merge like terms from an iterable of ``(exponent, coefficient)``; drop zeros."""
        acc = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise ValueError(f"exponent {e} has length != {n}")
            if not isinstance(c, KNumber):
                c = field(c)
            acc[e] = acc[e] + c if e in acc else c
        terms = tuple((e, c) for e, c in sorted(acc.items()) if not c.is_zero())
        if not terms:
            raise ValueError("polynomial has no nonzero terms")
        return cls(field, n, terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def exponents(self):
        return [e for e, _ in self.terms]

    @property
    def coefficients(self):
        return [c for _, c in self.terms]

    def is_binomial(self) -> bool:
        return len(self.terms) == 2

    def eval(self, x) -> KNumber:
        if len(x) != self.n:
            raise ValueError("point has wrong dimension")
        x = [xi if isinstance(xi, KNumber) else self.field(xi) for xi in x]
        if any(xi.is_zero() for xi in x):
            raise ValueError("evaluation point must lie in (K*)^n")
        cache = {}

        def power(j, e):
            key = (j, e)
            if key not in cache:
                cache[key] = x[j] ** e
            return cache[key]

        total = self.field.zero()
        for e, c in self.terms:
            t = c
            for j, ej in enumerate(e):
                if ej:
                    t = t * power(j, ej)
            total = total + t
        return total

    __call__ = eval

    def partial(self, j: int) -> "KPolynomial | None":
        """Formal derivative in variable ``j`` (0-based); ``None`` if it vanishes."""
        items = []
        for e, c in self.terms:
            if e[j] == 0:
                continue
            e2 = list(e)
            e2[j] -= 1
            items.append((tuple(e2), c * from_int(e[j], self.field)))
        try:
            return KPolynomial.from_terms(self.field, self.n, items)
        except ValueError:
            return None

    def times_monomial(self, a: KNumber, alpha) -> "KPolynomial":
        """``a * X^alpha * self``."""
        return KPolynomial.from_terms(
            self.field,
            self.n,
            ((tuple(x + y for x, y in zip(e, alpha)), a * c) for e, c in self.terms),
        )

    def substitute_scaled(self, b) -> "KPolynomial":
        """``self(b_1 X_1, ..., b_n X_n)``."""
        items = []
        for e, c in self.terms:
            t = c
            for bj, ej in zip(b, e):
                if ej:
                    t = t * bj**ej
            items.append((e, t))
        return KPolynomial.from_terms(self.field, self.n, items)

    def restrict(self, keep) -> "KPolynomial":
        """Subpolynomial with the term indices in ``keep``."""
        return KPolynomial(self.field, self.n, tuple(self.terms[i] for i in sorted(keep)))

    def __str__(self):
        return format_polynomial(self)


@dataclass(frozen=True)
class KSystem:
    """A square system ``(f_1, ..., f_n)`` over one field."""

    polys: tuple
    field: FieldDescriptor

    def __post_init__(self):
        polys = tuple(self.polys)
        object.__setattr__(self, "polys", polys)
        n = len(polys)
        for f in polys:
            if f.n != n:
                raise ValueError(f"non-square system: {n} equations, polynomial in {f.n} variables")

    @property
    def n(self) -> int:
        return len(self.polys)

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    def map(self, fn) -> "KSystem":
        return KSystem(tuple(fn(f) for f in self.polys), self.field)

    def format(self) -> str:
        lines = [f"field: {self.field}", f"precision: {self.field.precision}"]
        lines += [format_polynomial(f) for f in self.polys]
        return "\n".join(lines) + "\n"

    def __str__(self):
        return "; ".join(format_polynomial(f) for f in self.polys)


# -- printing -----------------------------------------------------------------


def format_coefficient(c: KNumber) -> str:
    f = c.field
    if f.kind == "qp":
        q = to_fraction(c)
        if q is not None:
            return str(q)
        u = c.field.units.mod(c.unit, int(c.prec))
        return f"{u}*{f.p}^{int(c.valuation)}"
    coeffs = c.digits if c.exact else c.field.units.digits(c.unit, int(c.prec))
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    v = int(c.valuation)
    body = " + ".join(
        str(a) if k == 0 else (f"{a}*u" if k == 1 else f"{a}*u^{k}")
        for k, a in enumerate(coeffs)
        if a
    )
    if len(coeffs) == 1:
        upow = "u" if v == 1 else f"u^{v}"
        if v == 0:
            return str(coeffs[0])
        return upow if coeffs[0] == 1 else f"{coeffs[0]}*{upow}"
    return f"({body})" if v == 0 else f"u^{v}*({body})"


def _monomial(e, n):
    names = ["X"] if n == 1 else [f"X{j + 1}" for j in range(n)]
    return "*".join(nm if k == 1 else f"{nm}^{k}" for nm, k in zip(names, e) if k)


def format_polynomial(f: KPolynomial) -> str:
    out = []
    for e, c in reversed(f.terms):
        lit = format_coefficient(c)
        mono = _monomial(e, f.n)
        sign = "+"
        simple = re.fullmatch(r"-?\d+(/\d+)?", lit) is not None
        if simple and lit.startswith("-"):
            sign, lit = "-", lit[1:]
        if not mono:
            body = lit if simple else f"({lit})"
        elif lit == "1":
            body = mono
        else:
            body = f"{lit}*{mono}" if simple else f"({lit})*{mono}"
        out.append((sign, body))
    text = out[0][1] if out[0][0] == "+" else "-" + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s+|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()])")


class _Rational:
    """Coefficient ring for qp literals."""

    def __init__(self, field):
        self.field = field

    def const(self, k):
        return Fraction(k)

    def u(self, tok):
        raise ParseError("'u' is only allowed in laurent fields", *tok.pos)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def invert(self, a, tok):
        if a == 0:
            raise ParseError("division by zero", *tok.pos)
        return 1 / a

    def to_k(self, a):
        return from_rational(a.numerator, a.denominator, self.field)


class _LaurentPoly:
    """Coefficient ring for laurent literals: dicts ``{k: c}`` meaning ``sum c*u^k``."""

    def __init__(self, field):
        self.field = field
        self.p = field.p

    def _clean(self, d):
        return {k: c % self.p for k, c in d.items() if c % self.p}

    def const(self, k):
        return self._clean({0: k})

    def u(self, tok):
        return {1: 1}

    def add(self, a, b):
        out = dict(a)
        for k, c in b.items():
            out[k] = out.get(k, 0) + c
        return self._clean(out)

    def mul(self, a, b):
        out = {}
        for i, x in a.items():
            for j, y in b.items():
                out[i + j] = out.get(i + j, 0) + x * y
        return self._clean(out)

    def is_zero(self, a):
        return not a

    def invert(self, a, tok):
        if len(a) != 1:
            raise ParseError("can only divide by a single u-monomial", *tok.pos)
        (k, c), = a.items()
        return {-k: pow(c, -1, self.p)}

    def to_k(self, a):
        return from_laurent(a, self.field)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: tuple


class _ExprParser:
    """Recursive descent over one polynomial; values are ``{monomial: coeff}``.

    A monomial is a sorted tuple of ``(variable index, exponent)`` pairs.
    """

    def __init__(self, tokens, ring, state):
        self.toks = tokens
        self.i = 0
        self.ring = ring
        self.state = state

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.take()
        if tok is None or tok.text != text:
            pos = tok.pos if tok else self.state["eol"]
            raise ParseError(f"expected {text!r}", *pos)
        return tok

    def parse(self):
        val = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok.text!r}", *tok.pos)
        return val

    # values
    def _add(self, a, b):
        out = dict(a)
        for m, c in b.items():
            out[m] = self.ring.add(out[m], c) if m in out else c
        return {m: c for m, c in out.items() if not self.ring.is_zero(c)}

    def _mul(self, a, b):
        out = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                d = dict(m1)
                for j, k in m2:
                    d[j] = d.get(j, 0) + k
                m = tuple(sorted((j, k) for j, k in d.items() if k))
                c = self.ring.mul(c1, c2)
                out[m] = self.ring.add(out[m], c) if m in out else c
        return {m: c for m, c in out.items() if not self.ring.is_zero(c)}

    def _neg(self, a):
        minus = self.ring.const(-1)
        return {m: self.ring.mul(minus, c) for m, c in a.items()}

    def _invert(self, a, tok):
        if len(a) != 1:
            raise ParseError("can only divide by a single term", *tok.pos)
        (m, c), = a.items()
        return {tuple((j, -k) for j, k in m): self.ring.invert(c, tok)}

    def _pow(self, a, k, tok):
        if k < 0:
            a = self._invert(a, tok)
            k = -k
        out = {(): self.ring.const(1)}
        for _ in range(k):
            out = self._mul(out, a)
        return out

    # grammar
    def expr(self):
        val = self.term()
        while (tok := self.peek()) is not None and tok.text in "+-":
            self.take()
            rhs = self.term()
            val = self._add(val, rhs if tok.text == "+" else self._neg(rhs))
        return val

    def term(self):
        val = self.unary()
        while (tok := self.peek()) is not None and tok.text in ("*", "/"):
            self.take()
            rhs = self.unary()
            val = self._mul(val, rhs if tok.text == "*" else self._invert(rhs, tok))
        return val

    def unary(self):
        tok = self.peek()
        if tok is not None and tok.text in "+-":
            self.take()
            val = self.unary()
            return val if tok.text == "+" else self._neg(val)
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.text in ("^", "**"):
            self.take()
            k = self.exponent()
            return self._pow(base, k, tok)
        return base

    def exponent(self):
        paren = False
        tok = self.peek()
        if tok is not None and tok.text == "(":
            self.take()
            paren = True
        sign = 1
        tok = self.peek()
        if tok is not None and tok.text in "+-":
            self.take()
            sign = -1 if tok.text == "-" else 1
        tok = self.take()
        if tok is None or tok.kind != "num":
            pos = tok.pos if tok else self.state["eol"]
            raise ParseError("exponent must be an integer", *pos)
        if paren:
            self.expect(")")
        return sign * int(tok.text)

    def atom(self):
        tok = self.take()
        if tok is None:
            raise ParseError("unexpected end of expression", *self.state["eol"])
        if tok.kind == "num":
            return {(): self.ring.const(int(tok.text))}
        if tok.kind == "name":
            if tok.text == "u":
                return {(): self.ring.u(tok)}
            j = self._variable(tok)
            return {((j, 1),): self.ring.const(1)}
        if tok.text == "(":
            val = self.expr()
            self.expect(")")
            return val
        raise ParseError(f"unexpected {tok.text!r}", *tok.pos)

    def _variable(self, tok):
        name = tok.text
        m = re.fullmatch(r"X(\d+)", name)
        if m:
            style, j = "indexed", int(m.group(1)) - 1
            if j < 0:
                raise ParseError(f"unknown variable {name!r}", *tok.pos)
        elif len(name) == 1 and name in ALIASES:
            style, j = "alias", ALIASES.index(name)
        else:
            raise ParseError(f"unknown variable {name!r}", *tok.pos)
        prev = self.state.setdefault("style", style)
        if prev != style:
            raise ParseError("cannot mix X1..Xn with X, Y, Z, W names", *tok.pos)
        if j >= self.state.get("max_var", (-1, None))[0]:
            self.state["max_var"] = (j, tok.pos)
        return j


def _tokenize(chunk, line, col0):
    toks = []
    pos = 0
    while pos < len(chunk):
        m = _TOKEN.match(chunk, pos)
        if not m:
            raise ParseError(f"unexpected character {chunk[pos]!r}", line, col0 + pos + 1)
        if m.lastgroup:
            toks.append(_Tok(m.lastgroup, m.group(), (line, col0 + m.start() + 1)))
        pos = m.end()
    return toks


_HEADER = re.compile(r"^\s*(field|precision)\s*:\s*(.*?)\s*$")


def parse(text: str, field: FieldDescriptor | None = None, precision: int | None = None) -> KSystem:
    """Parse a system file into a :class:`KSystem`."""
    header_field = header_prec = None
    bodies = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        m = _HEADER.match(line)
        if m:
            key, value = m.groups()
            try:
                if key == "field":
                    header_field = FieldDescriptor.parse(value)
                else:
                    header_prec = int(value)
                    if header_prec < 1:
                        raise ValueError("precision must be positive")
            except ValueError as exc:
                raise ParseError(str(exc), lineno, line.index(value) + 1) from None
            continue
        col = 0
        for chunk in line.split(";"):
            if chunk.strip():
                bodies.append((lineno, col, chunk))
            col += len(chunk) + 1

    if header_field and field and (header_field.kind, header_field.p) != (field.kind, field.p):
        raise ParseError(f"file declares {header_field} but {field} was requested", 1, 1)
    base = header_field or field
    if base is None:
        raise ParseError("no field declared (expected 'field: qp:<p>' or 'field: laurent:<p>')", 1, 1)
    prec = precision or header_prec or (field.precision if field else base.precision)
    fd = FieldDescriptor(base.kind, base.p, prec)
    ring = _Rational(fd) if fd.kind == "qp" else _LaurentPoly(fd)

    if not bodies:
        raise ParseError("no polynomials given", 1, 1)
    state = {}
    parsed = []
    for lineno, col, chunk in bodies:
        state["eol"] = (lineno, col + len(chunk) + 1)
        toks = _tokenize(chunk, lineno, col)
        value = _ExprParser(toks, ring, state).parse()
        if not value:
            raise ParseError("polynomial is identically zero", lineno, col + 1)
        parsed.append((lineno, col, value))

    n = len(parsed)
    if "max_var" in state and state["max_var"][0] >= n:
        j, pos = state["max_var"]
        raise ParseError(f"non-square system: variable {j + 1} used but only {n} equation(s)", *pos)

    polys = []
    for lineno, col, value in parsed:
        items = []
        for mono, c in value.items():
            e = [0] * n
            for j, k in mono:
                e[j] = k
            items.append((tuple(e), ring.to_k(c)))
        try:
            polys.append(KPolynomial.from_terms(fd, n, items))
        except ValueError:
            raise ParseError("polynomial is identically zero in K", lineno, col + 1) from None
    return KSystem(tuple(polys), fd)


def parse_polynomial(text: str, field: FieldDescriptor, n: int | None = None) -> KPolynomial:
    """Parse a single polynomial; ``n`` defaults to the number of variables it uses."""
    ring = _Rational(field) if field.kind == "qp" else _LaurentPoly(field)
    state = {"eol": (1, len(text) + 1)}
    value = _ExprParser(_tokenize(text, 1, 0), ring, state).parse()
    if not value:
        raise ParseError("polynomial is identically zero", 1, 1)
    used = state.get("max_var", (-1, None))[0] + 1
    n = max(used, 1) if n is None else n
    if used > n:
        raise ParseError(f"polynomial uses {used} variables, expected {n}", 1, 1)
    items = []
    for mono, c in value.items():
        e = [0] * n
        for j, k in mono:
            e[j] = k
        items.append((tuple(e), ring.to_k(c)))
    return KPolynomial.from_terms(field, n, items)
