"""Deterministic random number generation shared by all run engines.

The generator is xoshiro256** (Blackman/Vigna) seeded through splitmix64.
Both algorithms are fixed here, bit for bit, so that runs reproduce across
platforms and across the pure-Python and compiled engines.  Independent
streams (one per trial) are derived from a base seed and a stream index via
the splitmix64 finalizer; see :func:`derive_seed`.
"""
from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return state, z ^ (z >> 31)


def mix64(value: int) -> int:
    """splitmix64 finalizer: a fixed 64-bit avalanche hash."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *components: int) -> int:
    """Derive an independent stream seed from a base seed and integer labels.

    Each component is folded in with a golden-ratio step followed by the
    avalanche hash, so seeds for different (experiment, cell, run) labels are
    decorrelated regardless of the order cells are scheduled in.
    """
    z = mix64(base_seed)
    for c in components:
        z = mix64((z + ((c + 1) * _GOLDEN)) & MASK64)
    return z


class Xoshiro256:
    """xoshiro256** with helpers for doubles and unbiased bounded ints."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & MASK64
        state, self.s0 = splitmix64(state)
        state, self.s1 = splitmix64(state)
        state, self.s2 = splitmix64(state)
        state, self.s3 = splitmix64(state)

    def next_u64(self) -> int:
        s1 = self.s1
        x = (s1 * 5) & MASK64
        result = (((x << 7) | (x >> 57)) & MASK64) * 9 & MASK64
        t = (s1 << 17) & MASK64
        s2 = self.s2 ^ self.s0
        s3 = self.s3 ^ s1
        s1 ^= s2
        s0 = self.s0 ^ s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def next_double(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via Lemire's method on 32-bit lanes.

        bound must fit in 32 bits, which covers every population or position
        count used here.
        """
        x = self.next_u64() >> 32
        m = x * bound
        low = m & 0xFFFFFFFF
        if low < bound:
            threshold = (0x100000000 - bound) % bound
            while low < threshold:
                x = self.next_u64() >> 32
                m = x * bound
                low = m & 0xFFFFFFFF
        return m >> 32
