"""Platform-independent pseudo-random numbers.

Generator: xorshift64* (shifts 12, 25, 27; output multiplier
0x2545F4914F6CDD1D) over a 64-bit state.  The state is initialized by one
round of splitmix64 applied to the seed, replacing a zero result by the
splitmix increment so the state is never zero.

Bounded integers use rejection sampling: to draw from [0, n), 64-bit
outputs at or above the largest multiple of n not exceeding 2**64 are
discarded and the remainder modulo n of the first accepted output is
returned.  Only integer arithmetic is involved, so every platform produces
the same stream.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT = 0x2545F4914F6CDD1D


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class PortableRng:
    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed
        self.state = splitmix64(seed & MASK64) or _GOLDEN

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & MASK64

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n < 1:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def integers(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends included."""
        return lo + self.below(hi - lo + 1)

    def bit(self) -> int:
        return self.next_u64() >> 63

    def spins(self, n: int) -> np.ndarray:
        """n independent uniform spins, one output's top bit each."""
        return np.array([1 - 2 * (self.next_u64() >> 63) for _ in range(n)], dtype=np.int8)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def sample(self, n: int, count: int) -> list[int]:
        """``count`` distinct values from range(n) by a partial Fisher-Yates shuffle."""
        if not 0 <= count <= n:
            raise ValueError("sample larger than population")
        pool = list(range(n))
        for a in range(count):
            b = a + self.below(n - a)
            pool[a], pool[b] = pool[b], pool[a]
        return pool[:count]

    def shuffle(self, items: list) -> None:
        for a in range(len(items) - 1, 0, -1):
            b = self.below(a + 1)
            items[a], items[b] = items[b], items[a]
