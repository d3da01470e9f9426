"""Hensel lifting of nondegenerate residue zeros to approximate zeros in (K*)^n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

from .count import SEMIREGULAR, NOT_SEMIREGULAR, semiregular_at
from .errors import HenselError, PrecisionError
from .poly import KPolynomial, KSystem
from .residue import DEFAULT_BRUTE_FORCE_BUDGET, jacobian_at
from .tropical import as_weight, initial_system, is_lattice_point, prevariety_points, tropicalize
from .valued import INF, KNumber, from_int


@dataclass(frozen=True)
class LiftedZero:
    w: tuple
    xbar: tuple
    point: tuple  # KNumbers
    residual_valuations: tuple  # v(pi^-tr(f_i;w) f_i(x)), inf when exactly zero
    iterations: int
    history: tuple  # min residual valuation of the rescaled system before each step
    precision: int

    def digits(self) -> list:
        return [list(x.digits) for x in self.point]


def _rescaled(F: KSystem, w, field):
    """``G_i(Y) = pi^-tr(f_i;w) f_i(pi^w Y)``, a system over the valuation ring."""
    polys = []
    for f in F:
        tr = int(tropicalize(f, w))
        items = []
        for e, c in f.terms:
            shift = sum(int(a) * int(b) for a, b in zip(e, w)) - tr
            items.append((e, c.coerce(field).shift(shift)))
        polys.append(KPolynomial.from_terms(field, f.n, items))
    return polys


def _jacobian(G, y):
    rows = []
    for g in G:
        row = []
        for j in range(len(y)):
            dg = g.partial(j)
            row.append(dg.eval(y) if dg is not None else g.field.zero())
        rows.append(row)
    return rows


def _solve_unit_pivot(J, r):
    """Solve ``J d = r`` by elimination, always pivoting on a valuation-0 entry."""
    n = len(r)
    A = [list(row) + [ri] for row, ri in zip(J, r)]
    for c in range(n):
        piv = next((i for i in range(c, n) if not A[i][c].is_zero() and A[i][c].valuation == 0), None)
        if piv is None:
            raise HenselError("Jacobian has no unit pivot; the point is degenerate")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].inverse()
        A[c] = [a * inv for a in A[c]]
        for i in range(n):
            if i != c and not A[i][c].is_zero():
                k = A[i][c]
                A[i] = [a - k * b for a, b in zip(A[i], A[c])]
    return [A[i][n] for i in range(n)]


def _residual_valuation(values) -> float:
    return min(v.certified_valuation for v in values)


def lift_zero(F: KSystem, w, xbar, precision: int | None = None) -> LiftedZero:
    """Lift the residue zero ``xbar`` of ``in_w(F)`` to a zero of ``F`` with valuation ``w``."""
    w = as_weight(w)
    if not is_lattice_point(w):
        raise HenselError(f"weight {w} is not a lattice point")
    w = tuple(int(x) for x in w)
    N = precision or F.field.precision
    if N < 2:
        raise HenselError("precision must be at least 2")
    field = F.field.with_precision(N)
    p = field.p
    xbar = tuple(int(x) % p for x in xbar)
    if len(xbar) != F.n or any(x == 0 for x in xbar):
        raise HenselError("residue point must lie in (F_p*)^n")
    S = initial_system(F, w)
    if any(g(xbar) != 0 for g in S):
        raise HenselError(f"{xbar} is not a zero of the initial forms")
    if jacobian_at(S, xbar) == 0:
        raise HenselError(f"{xbar} is a degenerate zero of the initial forms")

    G = _rescaled(F, w, field)
    y = [from_int(x, field) for x in xbar]
    cap = math.ceil(math.log2(N)) + 2
    history = []
    iterations = 0
    while True:
        r = [g.eval(y) for g in G]
        history.append(_residual_valuation(r))
        if all(v.is_zero() for v in r):
            break
        if iterations == cap:
            raise HenselError(f"Newton iteration did not converge in {cap} steps")
        step = _solve_unit_pivot(_jacobian(G, y), r)
        y = [yi - si for yi, si in zip(y, step)]
        iterations += 1

    point = tuple(yi.shift(wj) for yi, wj in zip(y, w))
    for xj, wj, dj in zip(point, w, xbar):
        if xj.is_zero() or xj.valuation != wj or xj.first_digit != dj:
            raise PrecisionError("lifted point lost its valuation or first digit")
    residuals = tuple(
        f.eval(point).shift(-int(tropicalize(f, w))).certified_valuation for f in F.polys
    )
    return LiftedZero(w, xbar, point, residuals, iterations, tuple(history), N)


def k_determinant(matrix) -> KNumber:
    """Leibniz determinant over K (no divisions, so no pivot precision issues)."""
    n = len(matrix)
    field = matrix[0][0].field
    total = field.zero()
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        t = field.one() if inversions % 2 == 0 else -field.one()
        for i in range(n):
            t = t * matrix[i][perm[i]]
        total = total + t
    return total


def jacobian_valuation(F: KSystem, x) -> float:
    """``v(Jac(F)(x))``, or the certified lower bound if it vanishes to precision."""
    J = []
    for f in F:
        row = []
        for j in range(F.n):
            df = f.partial(j)
            row.append(df.eval(x) if df is not None else F.field.zero())
        J.append(row)
    return k_determinant(J).certified_valuation


def enumerate_and_lift(
    F: KSystem,
    precision: int | None = None,
    budget: int = DEFAULT_BRUTE_FORCE_BUDGET,
    skip_nonsemiregular: bool = False,
) -> list:
    """Every zero of ``F`` in ``(K*)^n``, lifted from its residue, ordered by ``(w, xbar)``."""
    prev = prevariety_points(F)
    if not prev.finite:
        raise HenselError("tropical prevariety is infinite")
    out = []
    for w in prev.lattice_points:
        rep = semiregular_at(F, w, budget=budget)
        if rep.status == NOT_SEMIREGULAR:
            if skip_nonsemiregular:
                continue
            raise HenselError(f"system is not semiregular at {w} (degenerate zero {rep.witness})")
        if rep.status != SEMIREGULAR:
            continue
        for z in rep.residue_zeros:
            out.append(lift_zero(F, w, z, precision))
    return out


__all__ = [
    "INF",
    "LiftedZero",
    "enumerate_and_lift",
    "jacobian_valuation",
    "k_determinant",
    "lift_zero",
]
