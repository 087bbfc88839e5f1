"""Seedable random generator with derived substreams.

Wraps the xoshiro256++ kernels (period 2**256 - 1, splitmix64 seeding).
Identical seeds give bit-identical streams on every platform, and
``substream(i)`` derives independent generators from a base seed by a fixed
64-bit mixing function, which is what makes parallel Monte Carlo results
independent of worker scheduling.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as _k

_MASK64 = 0xFFFFFFFFFFFFFFFF


class Rng:
    """Deterministic generator; state advances in place."""

    __slots__ = ("seed", "state", "_key")

    def __init__(self, seed: int):
        self._key = np.uint64(int(seed) & _MASK64)
        self.seed = int(self._key)
        self.state = np.empty(4, dtype=np.uint64)
        _k.seed_state(self.state, self._key)

    def substream(self, index: int) -> "Rng":
        """Independent generator for substream ``index`` of this seed."""
        return Rng(int(_k.derive_key(self._key, np.uint64(index))))

    def u64(self) -> int:
        return int(_k.next64(self.state))

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return int(_k.bounded(self.state, np.uint64(n)))

    def coin(self) -> int:
        """Fair bit (top bit of the next word)."""
        return int(_k.coin(self.state))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed})"


def derive_key(base: int, index: int) -> int:
    """The fixed (base, index) -> 64-bit substream key mixing function."""
    return int(_k.derive_key(np.uint64(base & _MASK64), np.uint64(index)))
