"""Deterministic random number generation.

All randomness in this package flows through SplitMix64, a 64-bit
counter-based generator (Steele, Lea & Flood, "Fast splittable
pseudorandom number generators", OOPSLA 2014). It is pure integer
arithmetic, so identical seeds yield identical streams on every
platform and Python version, which keeps golden files portable.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

ALGORITHM = "splitmix64"


class SplitMix64:
    """SplitMix64 stream seeded with an unsigned 64-bit integer."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Documented as next_u64() mod n;
        the modulo bias is < n / 2**64 and irrelevant next to the
        portability we get from keeping the mapping trivial."""
        if n <= 0:
            raise ValueError(f"n must be positive, got {n}")
        return self.next_u64() % n

    def chance(self, p: float) -> bool:
        """True with probability p, computed as a 53-bit fraction."""
        return (self.next_u64() >> 11) < p * (1 << 53)


def fisher_yates(n: int, rng: SplitMix64) -> list[int]:
    """Permutation of range(n) via the modern Fisher-Yates shuffle,
    drawing j = rng.below(i + 1) for i = n-1 .. 1."""
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def hash_string(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 bytes of ``text``."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK64
    return h


def derive_seed(seed: int, *parts: str | int) -> int:
    """Mix a base seed with string/int parts into a new 64-bit seed.

    Used to give each (example, operator) combination its own stream
    while staying a pure function of the inputs.
    """
    h = seed & _MASK64
    for part in parts:
        if isinstance(part, int):
            h ^= part & _MASK64
        else:
            h ^= hash_string(part)
        # one splitmix scramble so order of parts matters
        h = SplitMix64(h).next_u64()
    return h
