"""SplitMix64 random stream.

The generator advances a 64-bit counter by the golden-ratio increment
``0x9E3779B97F4A7C15`` and mixes it with the finaliser

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

(all arithmetic mod 2**64). A real in [0, 1) is the top 53 bits of ``z``
times 2**-53. Only integer operations are involved, so the stream is
bit-identical on every platform.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


class RngStream:
    """Reproducible stream of reals in [0, 1)."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return _mix(self.state)

    def next(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def __iter__(self):
        return self

    def __next__(self) -> float:
        return self.next()

    def uniform(self, size: int) -> np.ndarray:
        """The next ``size`` outputs as an array (same values as repeated :meth:`next`)."""
        k = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + k * np.uint64(_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + size * _GAMMA) & _MASK
        return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def complex_uniform(self, size: int) -> np.ndarray:
        """Complex vector with real and imaginary parts uniform on [-1/2, 1/2)."""
        u = self.uniform(2 * size)
        return (u[0::2] - 0.5) + 1j * (u[1::2] - 0.5)


def rng_stream(seed: int) -> RngStream:
    return RngStream(seed)
