"""Deterministic pseudo-random numbers for every stochastic simulation path.

The generator is xoshiro256** (Blackman & Vigna) seeded through splitmix64,
so a (seed, stream) pair fully pins every random draw in the package on any
platform.  numpy's Generator is deliberately not used on product paths: its
bit stream is not part of our config contract.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_SM_GAMMA = 0x9E3779B97F4A7C15
_DOUBLE_SCALE = 2.0 ** -53


def _splitmix64_next(state: int) -> tuple[int, int]:
    state = (state + _SM_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** with splitmix64 seeding.

    ``spawn(stream)`` derives an independent child generator from the same
    root seed; experiments use it to give each Monte Carlo item its own
    stream while staying reproducible under any execution order.
    """

    __slots__ = ("_s", "seed", "stream", "_gauss_spare")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        sm = self.seed
        if self.stream:
            # fold the stream id in through one extra splitmix64 scramble
            sm, z = _splitmix64_next(self.stream)
            sm = (self.seed ^ z) & _MASK64
        s = []
        for _ in range(4):
            sm, z = _splitmix64_next(sm)
            s.append(z)
        self._s = s
        self._gauss_spare: float | None = None

    def next_u64(self) -> int:
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

    def spawn(self, stream: int) -> "Xoshiro256StarStar":
        """Independent child generator for a named substream."""
        return Xoshiro256StarStar(self.seed, stream=(self.stream * 0x10001 + stream + 1) & _MASK64)

    # ---- scalar draws -------------------------------------------------

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * _DOUBLE_SCALE

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller, spare value cached for determinism."""
        if self._gauss_spare is not None:
            z = self._gauss_spare
            self._gauss_spare = None
        else:
            while True:
                u1 = self.random()
                if u1 > 0.0:
                    break
            u2 = self.random()
            r = math.sqrt(-2.0 * math.log(u1))
            z = r * math.cos(2.0 * math.pi * u2)
            self._gauss_spare = r * math.sin(2.0 * math.pi * u2)
        return mu + sigma * z

    def lognormal(self, median: float, sigma_log: float) -> float:
        """Lognormal parameterized by its median and log-space shape."""
        if sigma_log == 0.0:
            return float(median)
        return float(median) * math.exp(sigma_log * self.normal())

    def integer(self, n: int) -> int:
        """Uniform int in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    # ---- array draws ---------------------------------------------------

    def randoms(self, n: int) -> np.ndarray:
        return np.array([self.random() for _ in range(n)], dtype=np.float64)

    def normals(self, n: int, mu: float = 0.0, sigma: float = 1.0) -> np.ndarray:
        return np.array([self.normal(mu, sigma) for _ in range(n)], dtype=np.float64)

    def lognormals(self, n: int, median: float, sigma_log: float) -> np.ndarray:
        return np.array([self.lognormal(median, sigma_log) for _ in range(n)], dtype=np.float64)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of arange(n)."""
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.integer(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def bytes(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            out += self.next_u64().to_bytes(8, "little")
        return bytes(out[:n])
