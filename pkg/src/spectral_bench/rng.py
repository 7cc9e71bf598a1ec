"""Deterministic random number generation.

Every stochastic step in the package (shuffles, weight init, dropout masks,
embedding init) draws from an :class:`Rng`. The generator algorithm is
NumPy's ``PCG64`` bit generator seeded through ``SeedSequence``; NumPy
guarantees the stream of a fixed bit generator never changes, so a seed
produces the identical sequence on every platform and every release of this
package. Changing the generator would be a breaking change.
"""

from __future__ import annotations

import numpy as np

_U64 = 2**64


class Rng:
    """Seeded random stream with deterministic child-stream derivation.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed. The same seed always yields the same stream.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < _U64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    def __repr__(self):
        return f"Rng(seed={self.seed})"

    def child(self, *tags: int) -> "Rng":
        """Derive an independent stream keyed by integer tags.

        Used to hand disjoint streams to parallel units of work (e.g. one per
        cross-validation fold) without sharing generator state. The child seed
        comes from ``SeedSequence(seed, spawn_key=tags)``, so derivation is
        itself deterministic.
        """
        if not tags:
            raise ValueError("child() requires at least one tag")
        key = tuple(int(t) for t in tags)
        ss = np.random.SeedSequence(self.seed, spawn_key=key)
        return Rng(int(ss.generate_state(1, np.uint64)[0]))

    def integers(self, low: int, high: int | None = None) -> int:
        """One uniform integer in ``[low, high)`` (or ``[0, low)`` if high omitted)."""
        return int(self._gen.integers(low, high))

    def uniform(self, shape=None) -> np.ndarray:
        """Uniform floats in ``[0, 1)``."""
        return self._gen.random(shape)

    def standard_normal(self, shape=None) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def permutation(self, n: int) -> np.ndarray:
        """Uniform random permutation of ``range(n)``.

        Implemented by the generator's Fisher-Yates shuffle, consuming one
        bounded draw per position.
        """
        return self._gen.permutation(int(n))
