"""Self-contained deterministic random number generation.

Layout reproducibility must not depend on any library's RNG internals, so
the generator is pinned down to the bit level: a 64-bit seed expands through
splitmix64 into the four state words of xoshiro256**, uniforms take the top
53 bits, and Gaussians come from the Box-Muller transform. Any conforming
implementation of this recipe reproduces the exact same streams.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64_stream(seed: int):
    x = seed & _MASK64
    while True:
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def splitmix64(seed: int, count: int) -> list[int]:
    """First `count` outputs of splitmix64 for `seed`."""
    stream = _splitmix64_stream(seed)
    return [next(stream) for _ in range(count)]


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** seeded via splitmix64. Identical streams on every platform."""

    def __init__(self, seed: int):
        self._s = splitmix64(seed, 4)
        self._spare_gaussian: float | None = None

    def next_uint64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def gaussian(self) -> float:
        """Standard normal via Box-Muller; draws two uniforms per pair."""
        if self._spare_gaussian is not None:
            z = self._spare_gaussian
            self._spare_gaussian = None
            return z
        # u1 shifted into (0, 1] so log never sees zero.
        u1 = (self.next_uint64() >> 11) * 2.0**-53
        u1 = 1.0 - u1
        u2 = (self.next_uint64() >> 11) * 2.0**-53
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_gaussian = r * math.sin(theta)
        return r * math.cos(theta)

    def gaussians(self, shape: tuple[int, ...], std: float = 1.0) -> np.ndarray:
        n = 1
        for dim in shape:
            n *= dim
        values = np.array([self.gaussian() for _ in range(n)], dtype=np.float64)
        return (values * std).reshape(shape)
