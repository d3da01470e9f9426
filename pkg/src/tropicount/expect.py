"""Expected number of roots in K* of random univariate polynomials with fixed support.

Valuation vectors are uniform in the unit cube; ``P(B/A)`` is the probability
that the lower Newton hull is supported exactly on ``B``.  The expected count is
``sum_B P(B/A) sum_i E_k(beta_{i+1}-beta_i) / (beta_{i+1}-beta_i)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .count import _count_univariate_data
from .errors import CharacteristicError
from .residue import is_prime

DEFAULT_SAMPLES = 10**6
DEFAULT_SEED = 0
BLOCK = 1 << 16


def check_support(A) -> tuple:
    A = tuple(int(a) for a in A)
    if len(A) < 2:
        raise ValueError("support needs at least two exponents")
    if any(b <= a for a, b in zip(A, A[1:])):
        raise ValueError("support must be strictly increasing")
    return A


# -- residue models -------------------------------------------------------------


@dataclass(frozen=True)
class ResidueModel:
    kind: str  # "ac" | "fp" | "real"
    p: int | None = None

    @classmethod
    def parse(cls, text: str) -> "ResidueModel":
        text = text.strip().lower()
        if text in ("ac", "real"):
            return cls(text)
        if text.startswith("fp:"):
            p = int(text[3:])
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            return cls("fp", p)
        raise ValueError(f"unknown residue model {text!r} (expected ac, real or fp:<p>)")

    def __str__(self):
        return f"fp:{self.p}" if self.kind == "fp" else self.kind


def E_k_of_gamma(gamma: int, model: ResidueModel) -> Fraction:
    """Expected number of roots in k* of a random binomial ``a X^gamma + b``."""
    if gamma < 1:
        raise ValueError("gamma must be positive")
    if model.kind == "ac":
        return Fraction(gamma)
    return Fraction(1)


def check_characteristic(A, model: ResidueModel) -> None:
    if model.kind != "fp":
        return
    for a, b in combinations(A, 2):
        if (b - a) % model.p == 0:
            raise CharacteristicError(f"p={model.p} divides the exponent difference {b - a}")


# -- hull support ---------------------------------------------------------------


def lower_hull_support(v, A) -> tuple:
    """``B``: the exponents whose point lies on or below every flanking chord."""
    A = check_support(A)
    v = [Fraction(x) for x in v]
    t = len(A)
    if len(v) != t:
        raise ValueError("valuation vector and support differ in length")
    keep = [A[0]]
    for i in range(1, t - 1):
        ok = True
        for j in range(i):
            for k in range(i + 1, t):
                chord = (v[j] * (A[k] - A[i]) + v[k] * (A[i] - A[j])) / (A[k] - A[j])
                if v[i] > chord:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            keep.append(A[i])
    keep.append(A[-1])
    return tuple(keep)


def _support_masks(V: np.ndarray, A) -> np.ndarray:
    """Bitmask (bit i = index i in B) of the hull support for each row of ``V``."""
    t = len(A)
    masks = np.full(V.shape[0], 1 | (1 << (t - 1)), dtype=np.int64)
    for i in range(1, t - 1):
        bound = np.full(V.shape[0], np.inf)
        for j in range(i):
            for k in range(i + 1, t):
                lam = (A[k] - A[i]) / (A[k] - A[j])
                bound = np.minimum(bound, V[:, j] * lam + V[:, k] * (1 - lam))
        masks |= (V[:, i] <= bound).astype(np.int64) << i
    return masks


def _mask_to_subset(mask: int, A) -> tuple:
    return tuple(a for i, a in enumerate(A) if mask >> i & 1)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _pba_block(args):
    A, seed, block, size = args
    V = _block_rng(seed, block).random((size, len(A)))
    return np.bincount(_support_masks(V, A), minlength=1 << len(A))


def _blocks(samples):
    return [(b, min(BLOCK, samples - b * BLOCK)) for b in range(math.ceil(samples / BLOCK))]


def support_tallies(A, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, jobs: int = 1) -> dict:
    """Integer tallies ``{B: count}`` over ``samples`` uniform draws."""
    A = check_support(A)
    if samples < 1:
        raise ValueError("samples must be positive")
    tasks = [(A, seed, b, size) for b, size in _blocks(samples)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            parts = list(ex.map(_pba_block, tasks))
    else:
        parts = [_pba_block(t) for t in tasks]
    total = np.sum(parts, axis=0)
    return {_mask_to_subset(m, A): int(c) for m, c in enumerate(total) if c}


def estimate_PBA(A, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, jobs: int = 1) -> dict:
    """Monte Carlo estimate of ``P(B/A)`` for every observed ``B``, as exact fractions."""
    tallies = support_tallies(A, samples, seed, jobs)
    return {B: Fraction(c, samples) for B, c in sorted(tallies.items())}


def closed_form_pba(A) -> dict:
    """Exact ``P(B/A)`` for ``t <= 3``: the middle point is on the hull with probability 1/2."""
    A = check_support(A)
    if len(A) == 2:
        return {A: Fraction(1)}
    if len(A) == 3:
        return {(A[0], A[2]): Fraction(1, 2), A: Fraction(1, 2)}
    raise ValueError("closed form only for t <= 3")


# -- the expectation formula ----------------------------------------------------


def inner_sum(B, model: ResidueModel) -> Fraction:
    return sum((E_k_of_gamma(b - a, model) / (b - a) for a, b in zip(B, B[1:])), Fraction(0))


@dataclass(frozen=True)
class ExpectationReport:
    A: tuple
    model: str
    E: Fraction
    sigma: float
    confidence_halfwidth: float
    per_B: dict  # B -> (P estimate, inner sum)
    samples: int
    seed: int
    P_interior: dict  # alpha_i -> P_i for interior points
    one_plus_sum_Pi: Fraction
    exact: bool

    @property
    def value(self) -> float:
        return float(self.E)


def expected_roots(
    A,
    model: ResidueModel | str = "ac",
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
) -> ExpectationReport:
    """Expected root count from Monte Carlo ``P(B/A)``; exact when ``t == 2``."""
    A = check_support(A)
    if isinstance(model, str):
        model = ResidueModel.parse(model)
    check_characteristic(A, model)
    if len(A) == 2:
        tallies, n = {A: 1}, 1
        exact = True
    else:
        tallies, n = support_tallies(A, samples, seed, jobs), samples
        exact = False
    per_B = {}
    E = Fraction(0)
    second = Fraction(0)
    for B, c in sorted(tallies.items()):
        P = Fraction(c, n)
        s = inner_sum(B, model)
        per_B[B] = (P, s)
        E += P * s
        second += P * s * s
    var = max(second - E * E, Fraction(0))
    sigma = 0.0 if exact else math.sqrt(float(var) / n)
    P_int = {
        a: sum((P for B, (P, _) in per_B.items() if a in B), Fraction(0)) for a in A[1:-1]
    }
    return ExpectationReport(
        A, str(model), E, sigma, 3 * sigma, per_B, n if not exact else 0, seed, P_int,
        1 + sum(P_int.values(), Fraction(0)), exact,
    )


def expectation_bounds(t: int):
    """``(2 - 2/t, 2 ln t)``."""
    if t < 2:
        raise ValueError("t must be at least 2")
    return Fraction(2) - Fraction(2, t), 2 * math.log(t)


def p_i_bracket(i: int, t: int):
    """``1/t <= P_i <= 1/i + 1/(t-i+1) - 1/t`` for the ``i``-th support point (1-based)."""
    if not 1 <= i <= t:
        raise ValueError("index out of range")
    return Fraction(1, t), Fraction(1, i) + Fraction(1, t - i + 1) - Fraction(1, t)


# -- direct simulation ----------------------------------------------------------


@dataclass(frozen=True)
class SimulationReport:
    A: tuple
    p: int
    M: int
    trials: int
    seed: int
    mean: float
    sigma: float
    skipped: int
    skip_rate: float
    fallback_draws: int
    band: float  # lattice-edge correction band max_gap / (2M + 1)
    total_roots: int


def _simulate_block(args):
    A, p, M, seed, block, size = args
    rng = _block_rng(seed, block)
    t = len(A)
    vals = rng.integers(-M, M + 1, size=(size, t))
    digs = rng.integers(1, p, size=(size, t))
    total = sq = skipped = fallback = 0
    for v, d in zip(vals.tolist(), digs.tolist()):
        _, n, _, failure, used = _count_univariate_data(A, v, d, p, fallback=True)
        if failure is not None:
            skipped += 1
            continue
        fallback += used
        total += n
        sq += n * n
    return total, sq, skipped, fallback


def simulate_expected_roots(
    A,
    p: int,
    M: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
) -> SimulationReport:
    """Mean root count over random polynomials with valuations uniform in ``[-M, M]``.

    Draws whose count is not determined (a degenerate residue zero, or the
    characteristic dividing a segment length) are skipped and reported.
    """
    A = check_support(A)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if M < 0 or trials < 1:
        raise ValueError("need M >= 0 and trials >= 1")
    tasks = [(A, p, M, seed, b, size) for b, size in _blocks(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_simulate_block, tasks))
    else:
        parts = [_simulate_block(t) for t in tasks]
    total = sum(x[0] for x in parts)
    sq = sum(x[1] for x in parts)
    skipped = sum(x[2] for x in parts)
    fallback = sum(x[3] for x in parts)
    used = trials - skipped
    mean = total / used if used else float("nan")
    var = sq / used - mean * mean if used else float("nan")
    sigma = math.sqrt(max(var, 0.0) / used) if used else float("nan")
    gap = max(b - a for a, b in zip(A, A[1:]))
    return SimulationReport(
        A, p, M, trials, seed, mean, sigma, skipped, skipped / trials, fallback,
        gap / (2 * M + 1), total,
    )
