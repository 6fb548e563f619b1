"""Seedable 64-bit PRNG with a pinned algorithm.

splitmix64: state advances by the golden-gamma constant and the output is
the standard two-round xor-multiply scramble.  Bounded draws use bitmask
rejection, shuffles are backward Fisher-Yates.  Everything here is pure
integer arithmetic, so traces reproduce across platforms and Python
versions (cross-checked by frozen test vectors).
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform draw from 0..n-1 (bitmask rejection, unbiased)."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        if n == 1:
            return 0
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            r = self.next_u64() & mask
            if r < n:
                return r

    def randint(self, a: int, b: int) -> int:
        """Uniform draw from a..b inclusive."""
        if a > b:
            raise ValueError("empty range")
        return a + self.randrange(b - a + 1)

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def choice(self, seq):
        return seq[self.randrange(len(seq))]


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed, order-sensitively."""
    h = 0
    for p in parts:
        h = SplitMix64(h ^ (p & _MASK)).next_u64()
    return h
