"""Semiregularity at a weight, regularity with root counts, univariate counts, and bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .poly import KPolynomial, KSystem
from .residue import (
    DEFAULT_BRUTE_FORCE_BUDGET,
    PrimeField,
    ResiduePoly,
    enumerate_zeros,
    jacobian_at,
)
from .snf import SNFDecomposition, det, monomial_power, smith_normal_form, unimodular_inverse
from .tropical import (
    PrevarietyResult,
    as_weight,
    initial_system,
    is_lattice_point,
    lower_hull,
    lower_system,
    prevariety_points,
    solve_affine,
)

NOT_IN_LATTICE = "not-in-lattice"
MONOMIAL = "monomial-initial-form"
SEMIREGULAR = "semiregular"
NOT_SEMIREGULAR = "not-semiregular"


@dataclass(frozen=True)
class SemiregReport:
    status: str
    w: tuple
    count: int = 0
    residue_zeros: tuple = ()
    witness: tuple | None = None
    initial_forms: tuple = ()

    @property
    def is_semiregular(self) -> bool:
        return self.status != NOT_SEMIREGULAR


@dataclass(frozen=True)
class BinomialCount:
    """Outcome of the binomial-system count at one weight.

    ``condition`` names which alternative made the system semiregular:
    ``"off-lattice"``, ``"no-power"`` (some rho_i is not a d_i-th power) or
    ``"coprime-det"``; it is ``None`` when the characteristic divides det M.
    """

    w: tuple
    status: str
    contribution: int
    M: tuple
    snf: SNFDecomposition
    rho: tuple | None
    condition: str | None


@dataclass(frozen=True)
class PointContribution:
    w: tuple
    contribution: int
    data: object = None


@dataclass(frozen=True)
class CountReport:
    regular: bool
    total: int | None
    per_point: tuple = ()
    failure: dict | None = None
    fallback_used: bool = False
    prevariety: PrevarietyResult | None = field(default=None, repr=False)


# -- Algorithm 1 ----------------------------------------------------------------


def semiregular_at(F: KSystem, w, budget: int = DEFAULT_BRUTE_FORCE_BUDGET) -> SemiregReport:
    """Decide semiregularity of ``F`` at ``w`` and count zeros with valuation ``w``."""
    w = as_weight(w)
    if len(w) != F.n:
        raise ValueError(f"weight has length {len(w)}, system has {F.n} variables")
    if not is_lattice_point(w):
        return SemiregReport(NOT_IN_LATTICE, w)
    S = initial_system(F, w)
    forms = tuple(str(g) for g in S)
    if any(g.is_monomial() for g in S):
        return SemiregReport(MONOMIAL, w, initial_forms=forms)
    zeros = enumerate_zeros(S, F.n, budget=budget)
    for z in zeros:
        if jacobian_at(S, z) == 0:
            return SemiregReport(NOT_SEMIREGULAR, w, witness=z, initial_forms=forms)
    return SemiregReport(SEMIREGULAR, w, len(zeros), tuple(zeros), initial_forms=forms)


# -- binomial systems -----------------------------------------------------------


def binomial_data(B: KSystem):
    """Write each ``f_i = a_i X^alpha_i - b_i X^beta_i``; return ``(M, v(b)-v(a), delta(b/a))``."""
    p = B.field.p
    rows, rhs, ratio = [], [], []
    for f in B:
        if len(f) != 2:
            raise ValueError("binomial system expected")
        (ea, a), (eb, c) = f.terms
        b = -c
        rows.append(tuple(x - y for x, y in zip(ea, eb)))
        rhs.append(int(b.valuation) - int(a.valuation))
        ratio.append(b.first_digit * pow(a.first_digit, -1, p) % p)
    return tuple(rows), rhs, tuple(ratio)


def count_binomial_system(B: KSystem, w=None) -> BinomialCount:
    """Semiregularity and root count of a binomial system with ``det M != 0``."""
    M, rhs, ratio = binomial_data(B)
    d_M = det(M)
    if d_M == 0:
        raise ValueError("binomial system has singular exponent matrix")
    sol = solve_affine(M, rhs)
    w_star = tuple(sol[0])
    if w is not None and as_weight(w) != w_star:
        raise ValueError(f"weight {w} is not the tropical point of the binomial system")
    snf = smith_normal_form(M)
    if not is_lattice_point(w_star):
        return BinomialCount(w_star, SEMIREGULAR, 0, M, snf, None, "off-lattice")
    p = B.field.p
    k = PrimeField(p)
    rho = monomial_power(ratio, unimodular_inverse(snf.P), p)
    d = snf.diagonal
    if not all(k.is_power(r, di) for r, di in zip(rho, d)):
        return BinomialCount(w_star, SEMIREGULAR, 0, M, snf, rho, "no-power")
    if d_M % p == 0:
        return BinomialCount(w_star, NOT_SEMIREGULAR, 0, M, snf, rho, None)
    contribution = math.prod(math.gcd(p - 1, di) for di in d)
    return BinomialCount(w_star, SEMIREGULAR, contribution, M, snf, rho, "coprime-det")


# -- Algorithm 2 ----------------------------------------------------------------


def regular_count(F: KSystem, pair_budget: int | None = None) -> CountReport:
    """Decide regularity of ``F`` and, if regular, count its zeros in ``(K*)^n``."""
    kwargs = {} if pair_budget is None else {"budget": pair_budget}
    prev = prevariety_points(F, **kwargs)
    if not prev.finite:
        return CountReport(False, None, (), {"kind": "infinite-prevariety", "witness": prev.witness}, prevariety=prev)
    per_point = []
    for w in prev.points:
        L = lower_system(F, w)
        if any(len(f) != 2 for f in L):
            failure = {"kind": "non-binomial-lower-poly", "w": w, "sizes": [len(f) for f in L]}
            return CountReport(False, None, tuple(per_point), failure, prevariety=prev)
        bc = count_binomial_system(L, w)
        if bc.status == NOT_SEMIREGULAR:
            failure = {"kind": "char-divides-det", "w": w, "det": det(bc.M), "p": F.field.p}
            return CountReport(False, None, tuple(per_point), failure, prevariety=prev)
        per_point.append(PointContribution(w, bc.contribution, bc))
    total = sum(pc.contribution for pc in per_point)
    return CountReport(True, total, tuple(per_point), prevariety=prev)


# -- univariate -----------------------------------------------------------------


@dataclass(frozen=True)
class SegmentCount:
    gap: int
    rho: int | None
    on_points: tuple
    method: str  # "binomial" | "off-lattice" | "fallback"


def _count_univariate_data(exps, vals, digits, p: int, fallback: bool = False):
    """Root count in K* from exponents, coefficient valuations and first digits.

    Returns ``(regular, total, per_point, failure, fallback_used)``.  With
    ``fallback`` a segment carrying an interior support point is counted by
    brute force over F_p* when its initial form has no degenerate zero.
    """
    if len(exps) < 2:
        return True, 0, (), None, False
    digit_of = dict(zip(exps, digits))
    hull = lower_hull(zip(exps, vals))
    k = PrimeField(p)
    per_point = []
    used = False
    for seg in hull.segments:
        w = seg.weight
        if seg.has_interior_point:
            if not fallback:
                return False, None, tuple(per_point), {"kind": "non-binomial-lower-poly", "w": (w,)}, used
            used = True
            if w.denominator != 1:
                per_point.append(PointContribution((w,), 0, SegmentCount(seg.gap, None, seg.on_points, "fallback")))
                continue
            g = ResiduePoly(p, 1, {(e,): digit_of[e] for e in seg.on_points})
            zeros = enumerate_zeros([g], 1)
            dg = g.partial(0)
            if any(dg(z) == 0 for z in zeros):
                return False, None, tuple(per_point), {"kind": "not-semiregular", "w": (w,)}, used
            per_point.append(PointContribution((w,), len(zeros), SegmentCount(seg.gap, None, seg.on_points, "fallback")))
            continue
        if w.denominator != 1:
            per_point.append(PointContribution((w,), 0, SegmentCount(seg.gap, None, seg.on_points, "off-lattice")))
            continue
        lo, hi = seg.left[0], seg.right[0]
        rho = (-digit_of[lo]) * pow(digit_of[hi], -1, p) % p
        d = seg.gap
        if not k.is_power(rho, d):
            per_point.append(PointContribution((w,), 0, SegmentCount(d, rho, seg.on_points, "binomial")))
            continue
        if d % p == 0:
            failure = {"kind": "char-divides-det", "w": (w,), "det": d, "p": p}
            return False, None, tuple(per_point), failure, used
        per_point.append(PointContribution((w,), math.gcd(p - 1, d), SegmentCount(d, rho, seg.on_points, "binomial")))
    total = sum(pc.contribution for pc in per_point)
    return not used, total, tuple(per_point), None, used


def count_univariate(f: KPolynomial, fallback: bool = False) -> CountReport:
    """Newton-polygon root count of a univariate polynomial in K*."""
    if f.n != 1:
        raise ValueError("count_univariate needs a univariate polynomial")
    exps = [e[0] for e, _ in f.terms]
    vals = [int(c.valuation) for _, c in f.terms]
    digits = [c.first_digit for _, c in f.terms]
    regular, total, per_point, failure, used = _count_univariate_data(exps, vals, digits, f.field.p, fallback)
    return CountReport(regular, total, per_point, failure, used)


# -- bounds ---------------------------------------------------------------------


def root_count_upper_bound(F: KSystem, tight: bool = True):
    """Upper bound on ``|Z_K(F)|``; ``math.inf`` when the prevariety is infinite.

    ``tight`` uses the computed lattice points of the prevariety, otherwise the
    pair-choice bound ``prod_i C(t_i, 2)``.
    """
    prev = prevariety_points(F)
    if not prev.finite:
        return math.inf
    units = (F.field.p - 1) ** F.n
    if tight:
        return len(prev.lattice_points) * units
    return math.prod(math.comb(len(f), 2) for f in F) * units


def weight_from_string(text: str) -> tuple:
    """Parse ``"1,1/2"`` into a weight."""
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad weight {text!r}: {exc}") from None
