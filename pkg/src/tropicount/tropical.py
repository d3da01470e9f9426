"""Tropicalization, lower polynomials, initial forms, Newton polygons and prevarieties.

Weights are tuples of :class:`fractions.Fraction`; nothing here uses floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .errors import BudgetExceeded
from .poly import KPolynomial, KSystem
from .residue import ResiduePoly

DEFAULT_PAIR_BUDGET = 10**6
DEFAULT_FM_DIM = 6


def as_weight(w) -> tuple:
    """Coerce a scalar or sequence of ints/Fractions/strings like ``"1/2"`` into a weight."""
    if isinstance(w, (int, Fraction, str)):
        w = (w,)
    return tuple(Fraction(x) for x in w)


def format_weight(w) -> str:
    return "(" + ",".join(str(x) for x in w) + ")"


def is_lattice_point(w) -> bool:
    return all(x.denominator == 1 for x in as_weight(w))


def _dot(a, w):
    return sum((ai * wi for ai, wi in zip(a, w)), Fraction(0))


# -- single polynomial ----------------------------------------------------------


def term_weights(f: KPolynomial, w) -> list:
    """``l_i(f; w) = v(a_i) + alpha_i . w`` for every term."""
    w = as_weight(w)
    return [Fraction(int(c.valuation)) + _dot(e, w) for e, c in f.terms]


def tropicalize(f: KPolynomial, w) -> Fraction:
    return min(term_weights(f, w))


def minimizing_terms(f: KPolynomial, w) -> list:
    ls = term_weights(f, w)
    m = min(ls)
    return [i for i, l in enumerate(ls) if l == m]


def trop_membership(f: KPolynomial, w) -> bool:
    return len(minimizing_terms(f, w)) >= 2


def lower_polynomial(f: KPolynomial, w) -> KPolynomial:
    return f.restrict(minimizing_terms(f, w))


def initial_form(f: KPolynomial, w) -> ResiduePoly:
    terms = {f.terms[i][0]: f.terms[i][1].first_digit for i in minimizing_terms(f, w)}
    return ResiduePoly(f.field.p, f.n, terms)


def lower_system(F: KSystem, w) -> KSystem:
    return F.map(lambda f: lower_polynomial(f, w))


def initial_system(F: KSystem, w) -> list:
    return [initial_form(f, w) for f in F]


# -- univariate Newton polygon --------------------------------------------------


@dataclass(frozen=True)
class HullSegment:
    left: tuple  # (exponent, valuation)
    right: tuple
    on_points: tuple  # exponents of all support points on the segment, endpoints included

    @property
    def slope(self) -> Fraction:
        return Fraction(self.right[1] - self.left[1], self.right[0] - self.left[0])

    @property
    def weight(self) -> Fraction:
        return -self.slope

    @property
    def gap(self) -> int:
        return self.right[0] - self.left[0]

    @property
    def has_interior_point(self) -> bool:
        return len(self.on_points) > 2


@dataclass(frozen=True)
class NewtonHull:
    vertices: tuple
    segments: tuple

    @property
    def slopes(self) -> list:
        return [s.slope for s in self.segments]

    @property
    def trop(self) -> list:
        """Sorted tropical hypersurface ``{-slope}``."""
        return sorted({s.weight for s in self.segments})


def lower_hull(points) -> NewtonHull:
    """Lower convex hull of ``(exponent, valuation)`` pairs with distinct exponents."""
    pts = sorted((int(a), int(b)) for a, b in points)
    hull = []
    for q in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (q[1] - y1) - (y2 - y1) * (q[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(q)
    segments = []
    for a, b in zip(hull, hull[1:]):
        on = tuple(
            x for x, y in pts
            if a[0] <= x <= b[0] and (b[0] - a[0]) * (y - a[1]) == (b[1] - a[1]) * (x - a[0])
        )
        segments.append(HullSegment(a, b, on))
    return NewtonHull(tuple(hull), tuple(segments))


def newton_lower_hull(f: KPolynomial) -> NewtonHull:
    if f.n != 1:
        raise ValueError("Newton polygon needs a univariate polynomial")
    return lower_hull((e[0], int(c.valuation)) for e, c in f.terms)


# -- exact rational linear algebra ---------------------------------------------


def solve_affine(A, b):
    """Solve ``A x = b`` over Q.

    Returns ``None`` if inconsistent, else ``(x0, basis)`` with ``x0`` a particular
    solution and ``basis`` a list of null-space vectors.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    R = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c]
        R[r] = [v * inv for v in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                k = R[i][c]
                R[i] = [u - k * v for u, v in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(all(v == 0 for v in row[:n]) and row[n] != 0 for row in R):
        return None
    x0 = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x0[c] = R[i][n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R[i][fc]
        basis.append(v)
    return x0, basis


def _normalize(cons):
    a, d = cons
    lead = next((abs(x) for x in a if x != 0), None)
    if lead is None:
        return cons
    return tuple(x / lead for x in a), d / lead


def _eliminate(constraints, j):
    """Fourier-Motzkin: drop variable ``j`` from constraints ``a.x <= d``."""
    pos, neg, out = [], [], set()
    for a, d in constraints:
        if a[j] > 0:
            pos.append((a, d))
        elif a[j] < 0:
            neg.append((a, d))
        else:
            out.add(_normalize((a, d)))
    for (a1, d1), (a2, d2) in product(pos, neg):
        s, t = -a2[j], a1[j]
        a = tuple(s * x + t * y for x, y in zip(a1, a2))
        out.add(_normalize((a, s * d1 + t * d2)))
    return sorted(out)


def coordinate_range(constraints, k, j):
    """Range ``(lo, hi)`` of ``x_j`` over ``{x in Q^k : a.x <= d}``; ``None`` if empty.

    Infinite ends are ``-inf``/``inf``.
    """
    cons = [(tuple(a), d) for a, d in constraints]
    for i in range(k):
        if i != j:
            cons = _eliminate(cons, i)
    lo, hi = -math.inf, math.inf
    for a, d in cons:
        c = a[j]
        if c > 0:
            hi = min(hi, d / c)
        elif c < 0:
            lo = max(lo, d / c)
        elif d < 0:
            return None
    if lo > hi:
        return None
    return lo, hi


def _substitute(constraints, j, value):
    out = []
    for a, d in constraints:
        a = list(a)
        d = d - a[j] * value
        a[j] = Fraction(0)
        out.append((tuple(a), d))
    return out


def _pick(lo, hi):
    if lo == -math.inf and hi == math.inf:
        return Fraction(0)
    if lo == -math.inf:
        return Fraction(hi) - 1
    if hi == math.inf:
        return Fraction(lo) + 1
    return (Fraction(lo) + Fraction(hi)) / 2


def feasible_point(constraints, k, fixed=None):
    """A rational point of the polyhedron, choosing coordinates greedily; ``None`` if empty."""
    cons = list(constraints)
    x = [Fraction(0)] * k
    fixed = fixed or {}
    for j, val in fixed.items():
        x[j] = Fraction(val)
        cons = _substitute(cons, j, x[j])
    for j in range(k):
        if j in fixed:
            continue
        rng = coordinate_range(cons, k, j)
        if rng is None:
            return None
        x[j] = _pick(*rng)
        cons = _substitute(cons, j, x[j])
    if any(d < 0 for a, d in cons if all(v == 0 for v in a)):
        return None
    return x


# -- prevariety -----------------------------------------------------------------


@dataclass(frozen=True)
class PrevarietyResult:
    status: str  # "finite" | "infinite"
    points: tuple = ()
    witness: dict | None = field(default=None)

    @property
    def finite(self) -> bool:
        return self.status == "finite"

    @property
    def lattice_points(self) -> tuple:
        return tuple(w for w in self.points if is_lattice_point(w))


def pair_choice_count(F: KSystem) -> int:
    return math.prod(math.comb(len(f), 2) for f in F)


def _pair_polyhedron(F, choice, x0, basis):
    """Inequalities in null-space coordinates saying each chosen pair attains the minimum."""
    k = len(basis)
    cons = []
    for f, (a, b) in zip(F, choice):
        ea, ca = f.terms[a]
        va = int(ca.valuation)
        for c, (ec, cc) in enumerate(f.terms):
            if c in (a, b):
                continue
            # l_a(w) <= l_c(w)  <=>  (ea - ec).w <= v_c - v_a
            diff = [x - y for x, y in zip(ea, ec)]
            row = tuple(_dot(diff, basis[i]) for i in range(k))
            rhs = int(cc.valuation) - va - _dot(diff, x0)
            cons.append((row, rhs))
    return cons


def prevariety_points(F: KSystem, budget: int = DEFAULT_PAIR_BUDGET, max_fm_dim: int = DEFAULT_FM_DIM):
    """The tropical prevariety ``Trop(f_1) cap ... cap Trop(f_n)``.

    Enumerates a pair of terms per polynomial.  A nonsingular choice gives one
    candidate.  A singular but consistent choice gives a polyhedron which is
    tested exactly for emptiness, a single point, or at least two points (then
    the prevariety is infinite).
    """
    n = F.n
    if any(len(f) < 2 for f in F):
        return PrevarietyResult("finite", ())
    total = pair_choice_count(F)
    if total > budget:
        raise BudgetExceeded(f"{total} pair choices exceed budget {budget}")
    points = set()
    for choice in product(*(combinations(range(len(f)), 2) for f in F)):
        A, rhs = [], []
        for f, (a, b) in zip(F, choice):
            ea, ca = f.terms[a]
            eb, cb = f.terms[b]
            A.append([x - y for x, y in zip(ea, eb)])
            rhs.append(int(cb.valuation) - int(ca.valuation))
        sol = solve_affine(A, rhs)
        if sol is None:
            continue
        x0, basis = sol
        if not basis:
            w = tuple(x0)
            if all(trop_membership(f, w) for f in F):
                points.add(w)
            continue
        k = len(basis)
        if n > max_fm_dim:
            raise BudgetExceeded(f"polyhedron test needs n <= {max_fm_dim}, got {n}")
        cons = _pair_polyhedron(F, choice, x0, basis)
        ranges = [coordinate_range(cons, k, j) for j in range(k)]
        if any(r is None for r in ranges):
            continue
        loose = [j for j, (lo, hi) in enumerate(ranges) if lo != hi]
        if not loose:
            lam = [Fraction(lo) for lo, _ in ranges]
            w = tuple(x0[i] + sum(lam[j] * basis[j][i] for j in range(k)) for i in range(n))
            if all(trop_membership(f, w) for f in F):
                points.add(w)
            continue
        j = loose[0]
        lo, hi = ranges[j]
        a = _pick(lo, hi)
        b = a + 1 if hi == math.inf else (a + Fraction(hi)) / 2
        wits = []
        for val in (a, b):
            lam = feasible_point(cons, k, {j: val})
            wits.append(tuple(x0[i] + sum(lam[m] * basis[m][i] for m in range(k)) for i in range(n)))
        witness = {
            "pairs": [list(c) for c in choice],
            "points": [list(w) for w in wits],
            "directions": [list(v) for v in basis],
        }
        return PrevarietyResult("infinite", (), witness)
    return PrevarietyResult("finite", tuple(sorted(points)))
