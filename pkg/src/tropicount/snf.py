"""Smith Normal Form over Z with unimodular transforms, and the monomial action ``x^M``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B) -> list:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def det(M) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][k]), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


@dataclass(frozen=True)
class SNFDecomposition:
    """``M = P * D * Q`` with ``P, Q`` unimodular and ``D`` diagonal, ``d_1 | d_2 | ...``."""

    P: tuple
    D: tuple
    Q: tuple

    @property
    def diagonal(self) -> list:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    def as_dict(self) -> dict:
        return {"P": [list(r) for r in self.P], "D": self.diagonal, "Q": [list(r) for r in self.Q]}


def smith_normal_form(M) -> SNFDecomposition:
    """Smith Normal Form by gcd pivoting with explicit transform accumulation.

    The invariant ``M = P * A * Q`` holds throughout: a row operation ``A <- E A``
    updates ``P <- P E^-1`` and a column operation ``A <- A F`` updates ``Q <- F^-1 Q``.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    P, Q = identity(m), identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        for row in P:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        Q[i], Q[j] = Q[j], Q[i]

    def add_row(i, j, k):  # row_i += k * row_j
        A[i] = [a + k * b for a, b in zip(A[i], A[j])]
        for row in P:
            row[j] -= k * row[i]

    def add_col(i, j, k):  # col_i += k * col_j
        for row in A:
            row[i] += k * row[j]
        Q[j] = [a - k * b for a, b in zip(Q[j], Q[i])]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        for row in P:
            row[i] = -row[i]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            negate_row(t)
    to_tuple = lambda X: tuple(tuple(r) for r in X)  # noqa: E731
    return SNFDecomposition(to_tuple(P), to_tuple(A), to_tuple(Q))


def unimodular_inverse(U) -> list:
    """Integer inverse of a matrix with determinant +-1."""
    n = len(U)
    if abs(det(U)) != 1:
        raise ValueError("matrix is not unimodular")
    R = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(U)]
    for c in range(n):
        piv = next(i for i in range(c, n) if R[i][c] != 0)
        R[c], R[piv] = R[piv], R[c]
        inv = 1 / R[c][c]
        R[c] = [v * inv for v in R[c]]
        for i in range(n):
            if i != c and R[i][c] != 0:
                k = R[i][c]
                R[i] = [a - k * b for a, b in zip(R[i], R[c])]
    out = [[R[i][n + j] for j in range(n)] for i in range(n)]
    if any(v.denominator != 1 for row in out for v in row):
        raise ValueError("inverse is not integral")
    return [[int(v) for v in row] for row in out]


def monomial_power(x, M, p: int) -> tuple:
    """``x^M`` over F_p: entry ``i`` is ``prod_j x_j ** M[i][j]``."""
    out = []
    for row in M:
        y = 1
        for xj, m in zip(x, row):
            y = y * pow(xj, m, p) % p
        out.append(y)
    return tuple(out)
