"""Seeded randomness: explicit (seed, stream) handles and a counter-based bit mixer.

All randomness in the package flows through an explicit :class:`RngSeed`; there is
no global RNG state.  Two independent mechanisms are provided:

* ``RngSeed.generator()`` — a numpy ``Generator`` (PCG64) for shuffling and
  sampling inside builders.
* ``splitmix64`` / ``mix_pairs`` — a stateless 64-bit mixer used by the lazy
  G(n,p) edge oracle, so that any single adjacency query is O(1) and the whole
  graph never has to be materialised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the splitmix64 finalizer (scalar, pure Python ints)."""
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def mix_u64(keys: np.ndarray, salt: int) -> np.ndarray:
    """Vectorised splitmix64 of ``keys`` (uint64 array) offset by ``salt``."""
    with np.errstate(over="ignore"):
        z = keys + np.uint64((salt + _GOLDEN) & _MASK)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class RngSeed:
    """A reproducible randomness handle: 64-bit seed plus a stream id.

    Identical (seed, stream) pairs always yield identical sample sequences,
    both through :meth:`generator` and through the pair-hash oracle.
    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not (0 <= int(self.seed) < (1 << 64)):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream),)))
        )

    def child(self, salt: int) -> "RngSeed":
        """Derive an independent sub-seed (used to give every stage its own stream)."""
        return RngSeed(splitmix64(self.seed ^ splitmix64(salt * 2 + 1)), self.stream)

    def salt(self) -> int:
        """Scalar mixing constant for the pair-hash oracle."""
        return splitmix64(self.seed ^ splitmix64(self.stream + 0x51ED2700))


def as_seed(rng: "RngSeed | int") -> RngSeed:
    if isinstance(rng, RngSeed):
        return rng
    return RngSeed(int(rng))
