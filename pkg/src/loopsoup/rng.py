"""Counter-based random number streams.

Every sampler in the package takes an :class:`RngStream` rather than a bare
generator.  A stream is the pair ``(seed, stream)`` feeding a Philox 4x64
counter-based generator, so the same pair always reproduces the same output
and distinct pairs are statistically independent.  Parallel work splits into
substreams indexed by task number; results are then independent of scheduling
order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    # splitmix64 finalizer, used to spread substream indices over the key space
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """Reproducible, splittable source of randomness.

    Attributes
    ----------
    seed:
        64-bit run seed shared by every stream of one run.
    stream:
        64-bit stream id; substreams derive new ids deterministically.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = (self.seed & _MASK64, self.stream & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RngStream":
        """Derive an independent child stream for task ``index``."""
        child = _mix64((self.stream ^ _mix64(index)) + index)
        return RngStream(self.seed, child)

    def substreams(self, n: int) -> list["RngStream"]:
        return [self.substream(i) for i in range(n)]
