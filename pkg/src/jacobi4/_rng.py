"""SplitMix64: the package's fixed, documented PRNG.

Chosen so trial streams are reproducible bit-for-bit from (seed, trial
index) alone, independent of batching or thread fan-out, and trivially
portable to other languages.  Doubles are drawn as (u64 >> 11) * 2^-53.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return mix64(self.state)

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def sym_uniform(self) -> float:
        """Uniform in [-1, 1)."""
        return 2.0 * self.uniform() - 1.0


def trial_rng(seed: int, index: int) -> SplitMix64:
    """Independent, order-free stream for one trial of a seeded run."""
    return SplitMix64(mix64(seed ^ mix64(index + 1)))
