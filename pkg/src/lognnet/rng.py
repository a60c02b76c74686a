"""Deterministic 64-bit generator used for classifier initialization.

xorshift64* (Vigna 2016): shifts 12, 25, 27 and multiplier
0x2545F4914F6CDD1D.  The state is seeded through one splitmix64 step so any
integer seed, zero included, gives a non-zero state.  A uniform draw takes
the top 53 bits of the output and centres them in their bin,
``(k + 0.5) / 2**53``, which lies strictly inside (0, 1).

The whole thing is a few lines of integer arithmetic so another
implementation can reproduce the exact weight sequence.
"""
import numpy as np

MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x):
    x = (x + _GOLDEN) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed, index):
    """Independent but reproducible seed for sweep point ``index``."""
    return splitmix64((base_seed ^ splitmix64(index + 1)) & MASK64)


class XorShift64Star:
    def __init__(self, seed=0):
        state = splitmix64(int(seed) & MASK64)
        self.state = state or _GOLDEN

    def next_u64(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & MASK64

    def uniform(self):
        return ((self.next_u64() >> 11) + 0.5) * (1.0 / (1 << 53))

    def uniform_array(self, n):
        return np.array([self.uniform() for _ in range(n)])
