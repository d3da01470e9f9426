"""Arithmetic in the prime residue field F_p and brute-force solving over (F_p^*)^n.

Residue elements are plain ``int`` values in ``[0, p)``; the modulus lives on a
:class:`PrimeField` context object.  Polynomials over F_p are Laurent: exponent
vectors may carry negative entries, evaluated through modular inverses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded

DEFAULT_BRUTE_FORCE_BUDGET = 10**7
_LOG_TABLE_LIMIT = 10**6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p.  Elements are ints in ``[0, p)``."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __call__(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def units(self) -> range:
        return range(1, self.p)

    def is_power(self, c: int, d: int) -> bool:
        """True iff ``c`` is a ``d``-th power in F_p^*."""
        q = self.p - 1
        return pow(c % self.p, q // math.gcd(q, d), self.p) == 1

    def solve_power_equation(self, c: int, d: int) -> list[int]:
        """All ``x`` in F_p^* with ``x**d == c``, sorted.

        Either empty or of size ``gcd(p-1, d)``.  Solutions are generated from
        one root times the ``gcd(p-1, d)``-th roots of unity, so no search over
        F_p^* is needed once a root is known.
        """
        c %= self.p
        if c == 0:
            raise ValueError("c must be a unit")
        if d <= 0:
            raise ValueError("d must be a positive integer")
        if not self.is_power(c, d):
            return []
        q = self.p - 1
        g = math.gcd(q, d)
        # x^d = c  <=>  x^g = c^(u) where u*(d/g) = 1 mod q/g
        m = q // g
        e = pow(d // g, -1, m) if m > 1 else 0
        c_g = pow(c, e, self.p)  # a g-th root problem: x^g = c_g
        root = self._gth_root(c_g, g)
        gen = self.generator
        zeta = pow(gen, q // g, self.p)
        roots = sorted(root * pow(zeta, k, self.p) % self.p for k in range(g))
        return roots

    def _gth_root(self, c: int, g: int) -> int:
        if g == 1:
            return c
        if self.p > _LOG_TABLE_LIMIT:
            from sympy.ntheory.residue_ntheory import nthroot_mod

            return int(nthroot_mod(c, g, self.p))
        # g divides p-1: write c = gen^k, k divisible by g
        k = self.discrete_log(c)
        return pow(self.generator, k // g, self.p)

    @cached_property
    def generator(self) -> int:
        q = self.p - 1
        if q == 1:
            return 1
        primes = _prime_factors(q)
        for a in range(2, self.p):
            if all(pow(a, q // r, self.p) != 1 for r in primes):
                return a
        raise AssertionError("no generator found")

    @cached_property
    def _log_table(self) -> dict[int, int]:
        table = {}
        x = 1
        for k in range(self.p - 1):
            table[x] = k
            x = x * self.generator % self.p
        return table

    def discrete_log(self, c: int) -> int:
        return self._log_table[c % self.p]


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class ResiduePoly:
    """A Laurent polynomial over F_p: ``terms`` maps exponent tuples to nonzero ints."""

    p: int
    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != self.n:
                raise ValueError(f"exponent {e} has wrong length for n={self.n}")
            c %= self.p
            if c:
                clean[e] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, ResiduePoly):
            return NotImplemented
        return (self.p, self.n, self.terms) == (other.p, other.n, other.terms)

    def __hash__(self):
        return hash((self.p, self.n, tuple(self.terms.items())))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __call__(self, x) -> int:
        p = self.p
        total = 0
        for e, c in self.terms.items():
            t = c
            for xj, ej in zip(x, e):
                t = t * pow(xj, ej, p) % p
            total += t
        return total % p

    def partial(self, j: int) -> "ResiduePoly":
        """Formal derivative in variable ``j`` (0-based); the integer exponent is taken mod p."""
        out = {}
        for e, c in self.terms.items():
            if e[j] % self.p == 0:
                continue
            e2 = list(e)
            e2[j] -= 1
            out[tuple(e2)] = c * e[j]
        return ResiduePoly(self.p, self.n, out)

    def scale_variables(self, c) -> "ResiduePoly":
        """Return ``g(X) = self(c_1 X_1, ..., c_n X_n)``."""
        p = self.p
        out = {}
        for e, a in self.terms.items():
            t = a
            for cj, ej in zip(c, e):
                t = t * pow(cj, ej, p) % p
            out[e] = t
        return ResiduePoly(p, self.n, out)

    def times_monomial(self, a: int, alpha) -> "ResiduePoly":
        out = {tuple(x + y for x, y in zip(e, alpha)): c * a for e, c in self.terms.items()}
        return ResiduePoly(self.p, self.n, out)

    def __str__(self):
        if not self.terms:
            return "0"
        names = ["x"] if self.n == 1 else [f"x{j + 1}" for j in range(self.n)]
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                nm if ej == 1 else f"{nm}^{ej}" for nm, ej in zip(names, e) if ej != 0
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)


def _check_system(S, n):
    if not S:
        raise ValueError("empty system")
    ps = {f.p for f in S}
    if len(ps) != 1:
        raise ValueError("polynomials over different residue fields")
    for f in S:
        if f.n != n:
            raise ValueError(f"polynomial dimension {f.n} != {n}")
    return ps.pop()


def _eval_grid(f: ResiduePoly, grid: np.ndarray, tables) -> np.ndarray:
    """Evaluate ``f`` at every row of ``grid`` (shape (m, n), entries in 1..p-1)."""
    p = f.p
    out = np.zeros(grid.shape[0], dtype=np.int64)
    for e, c in f.terms.items():
        t = np.full(grid.shape[0], c, dtype=np.int64)
        for j, ej in enumerate(e):
            if ej:
                t = t * tables(ej)[grid[:, j]] % p
        out = (out + t) % p
    return out


def _power_tables(p: int):
    cache = {}

    def table(e: int) -> np.ndarray:
        if e not in cache:
            vals = [0] + [pow(x, e, p) for x in range(1, p)]
            cache[e] = np.array(vals, dtype=np.int64)
        return cache[e]

    return table


def enumerate_zeros(S, n: int, budget: int = DEFAULT_BRUTE_FORCE_BUDGET, chunk: int = 1 << 16):
    """Every common zero of ``S`` in (F_p^*)^n, in lexicographic order.

    Raises :class:`BudgetExceeded` when ``p**n`` exceeds ``budget``.
    """
    p = _check_system(S, n)
    if p**n > budget:
        raise BudgetExceeded(f"brute force over (F_{p}^*)^{n} exceeds budget {budget}")
    total = (p - 1) ** n
    tables = _power_tables(p)
    zeros = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        grid = np.empty((idx.size, n), dtype=np.int64)
        rest = idx
        for j in range(n - 1, -1, -1):
            grid[:, j] = rest % (p - 1) + 1
            rest = rest // (p - 1)
        mask = np.ones(idx.size, dtype=bool)
        for f in S:
            mask &= _eval_grid(f, grid, tables) == 0
            if not mask.any():
                break
        zeros.extend(tuple(int(v) for v in row) for row in grid[mask])
    return zeros


def jacobian_matrix(S, x):
    return [[f.partial(j)(x) for j in range(len(x))] for f in S]


def det_mod(matrix, p: int) -> int:
    """Determinant over F_p by Gaussian elimination."""
    a = [[v % p for v in row] for row in matrix]
    n = len(a)
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = det * a[k][k] % p
        inv = pow(a[k][k], -1, p)
        for i in range(k + 1, n):
            if a[i][k]:
                m = a[i][k] * inv % p
                a[i] = [(u - m * v) % p for u, v in zip(a[i], a[k])]
    return det % p


def jacobian_at(S, x) -> int:
    """Determinant of the formal Jacobian of ``S`` evaluated at ``x``."""
    p = _check_system(S, len(x))
    if len(S) != len(x):
        raise ValueError("Jacobian needs a square system")
    return det_mod(jacobian_matrix(S, x), p)


def has_degenerate_zero(S, budget: int = DEFAULT_BRUTE_FORCE_BUDGET):
    """Return a common zero of ``S`` where the Jacobian also vanishes, or ``None``."""
    n = S[0].n
    for z in enumerate_zeros(S, n, budget=budget):
        if jacobian_at(S, z) == 0:
            return z
    return None
