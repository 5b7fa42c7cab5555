"""Per-position imbalance bookkeeping and the two diversity measures.

For a population of size mu, position i has n1(i) members with a 1-bit and
n0(i) = mu - n1(i) with a 0-bit; its imbalance is b(i) = |n1(i) - n0(i)|.
Smaller imbalances mean a more diverse population.  Two measures are
supported: the total imbalance sum(b(i)) and the descending-sorted vector of
imbalances compared lexicographically.  A third mode, NO_DIVERSITY, models
the plain GSEMO tie-break where the offspring always replaces the incumbent.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class MeasureKind(enum.Enum):
    TOTAL_IMBALANCE = "total"
    SORTED_VECTOR = "sorted"
    NO_DIVERSITY = "none"

    @classmethod
    def parse(cls, text: str) -> "MeasureKind":
        for kind in cls:
            if kind.value == text:
                return kind
        raise ValueError(f"unknown measure {text!r}; expected total|sorted|none")


class ImbalanceCounters:
    """Per-position one-counts n1(i) for a population of genomes."""

    __slots__ = ("n1", "pop_size")

    def __init__(self, n: int):
        self.n1 = np.zeros(n, dtype=np.int64)
        self.pop_size = 0

    @classmethod
    def from_genomes(cls, genomes) -> "ImbalanceCounters":
        first = genomes[0]
        c = cls(len(first))
        for g in genomes:
            c.add(g)
        return c

    def copy(self) -> "ImbalanceCounters":
        c = ImbalanceCounters(len(self.n1))
        c.n1[:] = self.n1
        c.pop_size = self.pop_size
        return c

    def add(self, bits: np.ndarray) -> None:
        self.n1 += bits
        self.pop_size += 1

    def remove(self, bits: np.ndarray) -> None:
        self.n1 -= bits
        self.pop_size -= 1
        if self.pop_size < 0 or np.any(self.n1 < 0):
            raise RuntimeError("imbalance counters underflow: removed a genome not counted")

    def imbalances(self) -> np.ndarray:
        """b(i) = |n1(i) - n0(i)| for every position."""
        return np.abs(2 * self.n1 - self.pop_size)


def apply_swap(counters: ImbalanceCounters, removed: np.ndarray, added: np.ndarray) -> ImbalanceCounters:
    """Update counters for replacing one member by another of equal fitness.

    Only positions where the two genomes differ change; the population size
    stays fixed.  Mutates and returns the given counters.
    """
    if len(removed) != len(counters.n1) or len(added) != len(counters.n1):
        raise ValueError("genome length does not match counters")
    delta = added.astype(np.int64) - removed.astype(np.int64)
    counters.n1 += delta
    if np.any(counters.n1 < 0) or np.any(counters.n1 > counters.pop_size):
        raise RuntimeError("imbalance counters out of range after swap")
    return counters


def total_imbalance(counters: ImbalanceCounters) -> int:
    """Total imbalance sum_i |2*n1(i) - mu|."""
    return int(counters.imbalances().sum())


class DiversitySnapshot:
    """Total imbalance plus a histogram of the per-position imbalances.

    counts[v] is the number of positions with b(i) == v; the histogram is
    the canonical representation of the descending-sorted imbalance vector.
    """

    __slots__ = ("n", "pop_size", "total", "counts")

    def __init__(self, n: int, pop_size: int, total: int, counts):
        self.n = n
        self.pop_size = pop_size
        self.total = total
        self.counts = np.asarray(counts, dtype=np.int64)

    @classmethod
    def from_counters(cls, counters: ImbalanceCounters) -> "DiversitySnapshot":
        b = counters.imbalances()
        return cls(
            n=len(counters.n1),
            pop_size=counters.pop_size,
            total=int(b.sum()),
            counts=np.bincount(b, minlength=counters.pop_size + 1),
        )

    def sorted_desc(self) -> tuple:
        """Materialized descending-sorted imbalance vector (for tests/IO)."""
        out = []
        for v in range(len(self.counts) - 1, -1, -1):
            out.extend([v] * int(self.counts[v]))
        return tuple(out)


def compare_sorted(before: DiversitySnapshot, after: DiversitySnapshot) -> int:
    """Order the descending-sorted imbalance vectors lexicographically.

    Returns -1/0/+1 as `before` is smaller/equal/larger than `after`.
    Walks the histograms from the highest imbalance value downward; at the
    first value where the counts differ, the snapshot holding more positions
    at that value is the lexicographically larger (less diverse) one.
    Snapshots over different n or population sizes are not comparable and
    raise.
    """
    if before.n != after.n:
        raise ValueError(f"cannot compare snapshots over n={before.n} and n={after.n}")
    if before.pop_size != after.pop_size:
        raise ValueError(
            "cannot compare snapshots of different population sizes "
            f"({before.pop_size} vs {after.pop_size})"
        )
    top = max(len(before.counts), len(after.counts))
    diff = np.zeros(top, dtype=np.int64)
    diff[: len(before.counts)] = before.counts
    diff[: len(after.counts)] -= after.counts
    nonzero = np.nonzero(diff)[0]
    if nonzero.size == 0:
        return 0
    return 1 if diff[nonzero[-1]] > 0 else -1


def tie_break_accept(kind: MeasureKind, before: DiversitySnapshot, after: DiversitySnapshot) -> bool:
    """Decide whether a same-fitness offspring replaces the incumbent.

    Equal diversity accepts the offspring, so the newer individual always
    wins ties; NO_DIVERSITY accepts unconditionally.
    """
    if kind is MeasureKind.NO_DIVERSITY:
        return True
    if kind is MeasureKind.TOTAL_IMBALANCE:
        return after.total <= before.total
    return compare_sorted(after, before) <= 0


def potential_phi(counters: ImbalanceCounters, targets: np.ndarray) -> int:
    """Sum of b(i) - b_opt(i) over all positions.

    Only meaningful for populations covering the whole feasible set, where
    the targets are pointwise lower bounds; a negative result therefore
    signals a bookkeeping or oracle bug and raises.
    """
    phi = int((counters.imbalances() - targets).sum())
    if phi < 0:
        raise RuntimeError(f"negative potential {phi}: counters or targets are corrupt")
    return phi
