"""Bit-string genomes, the three-objective LOTZ_k fitness, and dominance.

Genomes are numpy uint8 arrays of length n holding 0/1 values.  Positions
are 1-indexed in documentation and error messages (position 1 is the
leftmost bit, stored at array index 0), matching the usual LeadingOnes /
TrailingZeros convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ProblemParams:
    """Problem size n and feasibility width k of a LOTZ_k instance.

    A bit string is feasible when LO + TZ >= n - k; k ranges over [2..n].
    """

    n: int
    k: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"problem size n must be >= 2, got {self.n}")
        if not 2 <= self.k <= self.n:
            raise ValueError(f"k must be in [2..n]=[2..{self.n}], got {self.k}")

    @property
    def feasible_floor(self) -> int:
        """Smallest LO + TZ value a feasible bit string may have."""
        return self.n - self.k


class Fitness:
    """Fitness triple (lo, tz, h) of a genome.

    h is fully determined by lo + tz, so equality and hashing use the
    (lo, tz) pair only; h is carried along as a cache for dominance checks.
    """

    __slots__ = ("lo", "tz", "h")

    def __init__(self, lo: int, tz: int, h: int):
        self.lo = lo
        self.tz = tz
        self.h = h

    @property
    def key(self) -> tuple[int, int]:
        return (self.lo, self.tz)

    def is_feasible(self, params: ProblemParams) -> bool:
        return self.lo + self.tz >= params.feasible_floor

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fitness):
            return NotImplemented
        return self.lo == other.lo and self.tz == other.tz

    def __hash__(self) -> int:
        return hash((self.lo, self.tz))

    def __repr__(self) -> str:
        return f"Fitness(lo={self.lo}, tz={self.tz}, h={self.h})"


def genome_from_string(text: str) -> np.ndarray:
    """Parse a '0'/'1' string (position 1 first) into a genome array."""
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"genome text must be nonempty 0/1 characters, got {text!r}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def genome_to_string(bits: np.ndarray) -> str:
    """Render a genome as a '0'/'1' string, position 1 first."""
    return "".join("1" if b else "0" for b in bits)


def leading_ones(bits: np.ndarray) -> int:
    """Length of the longest all-ones prefix."""
    n = len(bits)
    for i in range(n):
        if bits[i] == 0:
            return i
    return n


def trailing_zeros(bits: np.ndarray) -> int:
    """Length of the longest all-zeros suffix."""
    n = len(bits)
    for i in range(n - 1, -1, -1):
        if bits[i] == 1:
            return n - 1 - i
    return n


def h_of(u: int, params: ProblemParams) -> int:
    """Third objective as a function of u = lo + tz.

    Zero below the feasibility floor; n + 1 - u at or above it, which makes
    every pair of feasible fitness vectors mutually non-dominating.
    """
    if not 0 <= u <= params.n:
        raise ValueError(f"u must be in [0..n], got {u}")
    if u < params.feasible_floor:
        return 0
    return params.n + 1 - u


def evaluate(bits: np.ndarray, params: ProblemParams) -> Fitness:
    """Evaluate a genome; raises on a genome/params length mismatch."""
    if len(bits) != params.n:
        raise ValueError(f"genome length {len(bits)} does not match n={params.n}")
    lo = leading_ones(bits)
    tz = trailing_zeros(bits)
    return Fitness(lo, tz, h_of(lo + tz, params))


def dominates(a: Fitness, b: Fitness) -> bool:
    """Component-wise >= on (lo, tz, h) with at least one strict >."""
    if a.lo < b.lo or a.tz < b.tz or a.h < b.h:
        return False
    return a.lo > b.lo or a.tz > b.tz or a.h > b.h
