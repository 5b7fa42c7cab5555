"""Brute-force cross-checks of the closed-form oracle.

Everything here recomputes oracle quantities from first principles, either by
enumerating (lo, tz) pairs and classifying each one by the forced-bit rules,
or (for small n) by enumerating whole genomes.  The CLI `verify` subcommand
and the acceptance suite drive these checks; they are deliberately slow and
simple.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .core import ProblemParams

# Parity of the covering-population size, keyed by (n mod 2, k mod 4):
# odd n:  k%4 = 0 -> odd, 1 -> even, 2 -> even, 3 -> odd
# even n: k%4 = 0 -> odd, 1 -> odd,  2 -> even, 3 -> even
PARITY_TABLE = {
    (1, 0): 1,
    (1, 1): 0,
    (1, 2): 0,
    (1, 3): 1,
    (0, 0): 1,
    (0, 1): 1,
    (0, 2): 0,
    (0, 3): 0,
}

GENOME_ENUM_LIMIT = 12


def pairs_by_definition(n: int, k: int) -> set[tuple[int, int]]:
    """Feasible (lo, tz) pairs straight from the definition."""
    out = set()
    for lo in range(n + 1):
        for tz in range(n + 1):
            u = lo + tz
            if u <= n and u != n - 1 and u >= n - k:
                out.add((lo, tz))
    return out


def forced_bit(lo: int, tz: int, i: int, n: int):
    """Bit value fitness (lo, tz) forces at position i, or None if free."""
    if lo >= i or tz == n - i:
        return 1
    if tz >= n - i + 1 or lo == i - 1:
        return 0
    return None


def classify_position_brute(i: int, params: ProblemParams) -> oracle.PositionClassification:
    """Classify every feasible pair at position i by the forced-bit rules."""
    n = params.n
    m1 = m0 = free = 0
    for lo, tz in pairs_by_definition(n, params.k):
        forced = forced_bit(lo, tz, i, n)
        if forced == 1:
            m1 += 1
        elif forced == 0:
            m0 += 1
        else:
            free += 1
    return oracle.PositionClassification(m1=m1, m0=m0, m_free=free, a=-1)


def classify_from_genomes(i: int, params: ProblemParams) -> oracle.PositionClassification:
    """Classification derived from all 2^n genomes grouped by fitness."""
    n = params.n
    if n > GENOME_ENUM_LIMIT:
        raise ValueError(f"genome-based classification guarded to n <= {GENOME_ENUM_LIMIT}")
    seen: dict[tuple[int, int], set[int]] = {}
    for x in range(1 << n):
        lo, tz = _lo_tz_of_int(x, n)
        seen.setdefault((lo, tz), set()).add((x >> (n - i)) & 1)
    floor = params.feasible_floor
    m1 = m0 = free = 0
    for (lo, tz), values in seen.items():
        if lo + tz < floor:
            continue
        if values == {1}:
            m1 += 1
        elif values == {0}:
            m0 += 1
        else:
            free += 1
    return oracle.PositionClassification(m1=m1, m0=m0, m_free=free, a=-1)


def min_imbalance_brute(i: int, params: ProblemParams) -> int:
    """Minimum |n1 - n0| at position i over all free-bit assignments."""
    c = classify_position_brute(i, params)
    return min(abs(c.m1 - c.m0 - c.m_free + 2 * j) for j in range(c.m_free + 1))


def max_imbalance_brute(i: int, params: ProblemParams) -> int:
    """Maximum |n1 - n0| at position i; extremes sit at all-0 or all-1 fill."""
    c = classify_position_brute(i, params)
    return max(abs(c.m1 - c.m0 - c.m_free + 2 * j) for j in (0, c.m_free))


def genome_pairs(n: int) -> set[tuple[int, int]]:
    """(lo, tz) pairs realized by all 2^n genomes."""
    if n > GENOME_ENUM_LIMIT + 2:
        raise ValueError(f"genome enumeration guarded to n <= {GENOME_ENUM_LIMIT + 2}")
    return {_lo_tz_of_int(x, n) for x in range(1 << n)}


def _lo_tz_of_int(x: int, n: int) -> tuple[int, int]:
    lo = 0
    while lo < n and (x >> (n - 1 - lo)) & 1:
        lo += 1
    tz = 0
    while tz < n and not (x >> tz) & 1:
        tz += 1
    return lo, tz


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def run_checks(max_n: int) -> list[CheckResult]:
    """Cross-check formulas against enumeration for all n <= max_n.

    max_n is capped at 12 because several checks enumerate all 2^n genomes.
    """
    if max_n > GENOME_ENUM_LIMIT:
        raise ValueError(f"--max-n is guarded to {GENOME_ENUM_LIMIT}, got {max_n}")
    if max_n < 2:
        raise ValueError("max-n must be at least 2")
    results = []

    missing = []
    for n in range(2, max_n + 1):
        realized = genome_pairs(n)
        if any(lo + tz == n - 1 for lo, tz in realized):
            missing.append(f"n={n}: genome with lo+tz=n-1 exists")
        for k in range(2, n + 1):
            params = ProblemParams(n, k)
            floor = params.feasible_floor
            want = {p for p in realized if p[0] + p[1] >= floor}
            got = oracle.brute_force_feasible_set(params)
            if got != want:
                missing.append(f"n={n} k={k}: feasible set mismatch")
            if len(got) != oracle.mu_max(params):
                missing.append(f"n={n} k={k}: mu_max != enumerated count")
    results.append(
        CheckResult("feasible-set (pairs vs genomes vs mu_max)", not missing, "; ".join(missing[:4]))
    )

    bad = []
    for n in range(2, max_n + 1):
        for k in range(2, n + 1):
            params = ProblemParams(n, k)
            mu = oracle.mu_max(params)
            for i in range(1, n + 1):
                closed = oracle.classify_position(i, params)
                brute = classify_position_brute(i, params)
                genome = classify_from_genomes(i, params)
                for ref in (brute, genome):
                    if (closed.m1, closed.m0, closed.m_free) != (ref.m1, ref.m0, ref.m_free):
                        bad.append(f"n={n} k={k} i={i}: {closed} != {ref}")
                if closed.m1 + closed.m0 + closed.m_free != mu:
                    bad.append(f"n={n} k={k} i={i}: counts do not sum to mu_max")
    results.append(CheckResult("position classification (closed vs brute)", not bad, "; ".join(bad[:4])))

    bad = []
    for n in range(2, max_n + 1):
        for k in range(2, n + 1):
            params = ProblemParams(n, k)
            target = oracle.optimal_diversity(params)
            for i in range(1, n + 1):
                if target.b_opt[i - 1] != min_imbalance_brute(i, params):
                    bad.append(f"n={n} k={k} i={i}: b_opt mismatch")
            try:
                oracle.build_covering_population(params, oracle.PopulationFill.BEST_DIVERSITY)
            except AssertionError as exc:
                bad.append(f"n={n} k={k}: best-diversity build failed ({exc})")
    results.append(CheckResult("optimal imbalance (closed vs brute, attainable)", not bad, "; ".join(bad[:4])))

    bad = []
    for n in range(2, 66):
        for k in range(2, n + 1):
            parity = oracle.mu_max(ProblemParams(n, k)) % 2
            if parity != PARITY_TABLE[(n % 2, k % 4)]:
                bad.append(f"n={n} k={k}: parity {parity}")
    results.append(CheckResult("population-size parity grid (n in [2..65])", not bad, "; ".join(bad[:4])))

    return results
