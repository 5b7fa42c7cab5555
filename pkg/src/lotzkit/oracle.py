"""Closed-form optimal-diversity oracle and covering-population constructors.

A covering population holds exactly one genome per feasible fitness vector.
For each position i the feasible vectors split into three groups: those that
force a 1-bit at i, those that force a 0-bit, and those that leave the bit
free.  The group sizes determine both the minimum imbalance reachable at i
(over all covering populations) and the maximum, and the constructors below
realize either extreme.

Counting conventions: a genome with fitness (lo, tz) and lo + tz <= n - 2
has 1-bits at positions 1..lo and at n - tz, 0-bits at position lo + 1 and
at n - tz + 1..n, and free bits in between; for lo + tz = n the whole genome
is forced.  Positions are 1-indexed here, as in `core`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import ProblemParams, evaluate
from .rng import Xoshiro256


def mu_max(params: ProblemParams) -> int:
    """Number of distinct feasible fitness vectors = covering population size."""
    n, k = params.n, params.k
    return n * k - _half((k - 2) * (k + 1))


def feasible_pairs(params: ProblemParams) -> list[tuple[int, int]]:
    """All feasible (lo, tz) pairs in (lo asc, tz asc) order.

    These are the pairs with n - k <= lo + tz <= n and lo + tz != n - 1
    (no bit string attains lo + tz = n - 1).
    """
    n = params.n
    floor = params.feasible_floor
    return [
        (lo, tz)
        for lo in range(n + 1)
        for tz in range(n - lo + 1)
        if lo + tz >= floor and lo + tz != n - 1
    ]


def brute_force_feasible_set(params: ProblemParams) -> set[tuple[int, int]]:
    """Feasible (lo, tz) set for small instances; guarded against misuse."""
    if params.n > 20:
        raise ValueError(f"feasible-set enumeration is guarded to n <= 20, got n={params.n}")
    return set(feasible_pairs(params))


def enumerate_genome_fitness_pairs(n: int) -> set[tuple[int, int]]:
    """(lo, tz) pairs realized by all 2^n genomes; guarded to n <= 14."""
    if n > 14:
        raise ValueError(f"genome enumeration is guarded to n <= 14, got n={n}")
    pairs = set()
    for x in range(1 << n):
        lo = 0
        while lo < n and (x >> (n - 1 - lo)) & 1:
            lo += 1
        tz = 0
        while tz < n and not (x >> tz) & 1:
            tz += 1
        pairs.add((lo, min(tz, n)))
    return pairs


@dataclass(frozen=True)
class PositionClassification:
    """Feasible-vector counts for one position.

    m1 / m0 count the vectors forcing a 1 / 0 there, m_free the vectors
    leaving the bit free, and a is the side of the infeasible corner cut out
    of the free-region rectangle.
    """

    m1: int
    m0: int
    m_free: int
    a: int


def classify_position(i: int, params: ProblemParams) -> PositionClassification:
    """Closed-form (m1, m0, m_free) counts for position i in [1..n]."""
    n, k = params.n, params.k
    if not 1 <= i <= n:
        raise ValueError(f"position must be in [1..{n}], got {i}")
    m1 = _half((n - i + 1) * (n - i)) + min(i, k)
    if i < n - k:
        m1 -= _half((n - k - i) * (n - k - i + 1))
    m0 = _half(i * (i - 1)) + min(n - i + 1, k)
    if i > k + 1:
        m0 -= _half((i - k - 1) * (i - k))
    a = max(0, min(k - 3, i - 2, n - i - 1, n - k))
    m_free = min(k - 2, i - 1) * min(k - 2, n - i) - _half(a * (a + 1))
    return PositionClassification(m1=m1, m0=m0, m_free=m_free, a=a)


@dataclass(frozen=True)
class OptimalDiversity:
    """Per-position minimum imbalances for covering populations.

    delta = mu_max mod 2 is the parity floor: no position of an odd-sized
    population can be perfectly balanced.
    """

    b_opt: np.ndarray
    delta: int
    opt_total: int
    mu_max: int

    def phi_of_total(self, total: int) -> int:
        return total - self.opt_total


def optimal_diversity(params: ProblemParams) -> OptimalDiversity:
    """Minimum imbalance per position: max(|m0 - m1| - m_free, delta)."""
    mu = mu_max(params)
    delta = mu % 2
    b_opt = np.empty(params.n, dtype=np.int64)
    for i in range(1, params.n + 1):
        c = classify_position(i, params)
        b_opt[i - 1] = max(abs(c.m0 - c.m1) - c.m_free, delta)
    return OptimalDiversity(
        b_opt=b_opt, delta=delta, opt_total=int(b_opt.sum()), mu_max=mu
    )


def free_span(lo: int, tz: int, n: int) -> range:
    """0-indexed indices whose bit value is free for fitness (lo, tz)."""
    if lo + tz >= n:
        return range(0)
    return range(lo + 1, n - tz - 1)


def canonical_genome(lo: int, tz: int, params: ProblemParams, free_bits=()) -> np.ndarray:
    """Genome with fitness (lo, tz) and the given free-region bit values.

    Layout: 1^lo 0 [free region] 1 0^tz, degenerating to 1^lo 0^tz when
    lo + tz = n.  free_bits must have length max(0, n - lo - tz - 2).
    """
    n = params.n
    if lo < 0 or tz < 0 or lo + tz > n:
        raise ValueError(f"no genome has lo={lo}, tz={tz} for n={n}")
    if lo + tz == n - 1:
        raise ValueError(f"no bit string attains lo + tz = n - 1 (lo={lo}, tz={tz})")
    if lo + tz < params.feasible_floor:
        raise ValueError(f"fitness (lo={lo}, tz={tz}) is infeasible for k={params.k}")
    span = free_span(lo, tz, n)
    if len(free_bits) != len(span):
        raise ValueError(
            f"fitness (lo={lo}, tz={tz}) needs {len(span)} free bits, got {len(free_bits)}"
        )
    bits = np.zeros(n, dtype=np.uint8)
    bits[:lo] = 1
    if lo + tz < n:
        bits[n - tz - 1] = 1
    for idx, value in zip(span, free_bits):
        bits[idx] = 1 if value else 0
    fit = evaluate(bits, params)
    if fit.key != (lo, tz):
        raise AssertionError(f"constructed genome evaluates to {fit.key}, wanted {(lo, tz)}")
    return bits


class PopulationFill(enum.Enum):
    """Free-bit policy used when constructing a covering population."""

    ALL_ZERO = "zero"
    ALL_ONE = "one"
    BEST_DIVERSITY = "best"
    WORST_DIVERSITY = "worst"
    RANDOM = "random"


def build_covering_population(
    params: ProblemParams, fill: PopulationFill, seed: int = 0
) -> list[np.ndarray]:
    """One genome per feasible fitness vector, free bits set per `fill`.

    WORST_DIVERSITY aligns every free bit with the majority forced value of
    its position (ties toward 1), maximizing each imbalance.  BEST_DIVERSITY
    puts the balancing count of 1s at each position, handing them to the
    free-bit members in (lo asc, tz asc) order, and checks that the result
    attains the oracle minimum everywhere.  Genomes come back in
    (lo asc, tz asc) order.
    """
    n = params.n
    pairs = feasible_pairs(params)
    genomes = [canonical_genome(lo, tz, params, [0] * len(free_span(lo, tz, n))) for lo, tz in pairs]

    if fill is PopulationFill.ALL_ZERO:
        return genomes

    if fill is PopulationFill.ALL_ONE:
        for (lo, tz), bits in zip(pairs, genomes):
            for idx in free_span(lo, tz, n):
                bits[idx] = 1
        return genomes

    if fill is PopulationFill.RANDOM:
        rng = Xoshiro256(seed)
        for (lo, tz), bits in zip(pairs, genomes):
            for idx in free_span(lo, tz, n):
                bits[idx] = 1 if rng.next_double() < 0.5 else 0
        return genomes

    classes = [classify_position(i, params) for i in range(1, n + 1)]

    if fill is PopulationFill.WORST_DIVERSITY:
        majority = [1 if c.m1 >= c.m0 else 0 for c in classes]
        for (lo, tz), bits in zip(pairs, genomes):
            for idx in free_span(lo, tz, n):
                bits[idx] = majority[idx]
        return genomes

    # BEST_DIVERSITY: per position, the number of free 1-bits that balances
    # the forced counts (rounded, clamped to [0, m_free]).
    for idx, c in enumerate(classes):
        want_ones = min(max((c.m_free + c.m0 - c.m1 + 1) // 2, 0), c.m_free)
        handed = 0
        for (lo, tz), bits in zip(pairs, genomes):
            if handed >= want_ones:
                break
            if idx in free_span(lo, tz, n):
                bits[idx] = 1
                handed += 1
    target = optimal_diversity(params)
    ones = np.zeros(n, dtype=np.int64)
    for bits in genomes:
        ones += bits
    imbalance = np.abs(2 * ones - len(genomes))
    if not np.array_equal(imbalance, target.b_opt):
        raise AssertionError("best-diversity construction missed the oracle minimum")
    return genomes


def _half(product: int) -> int:
    # Every quadratic term here is a product of consecutive integers.
    assert product % 2 == 0, f"odd product {product} cannot be halved exactly"
    return product // 2
