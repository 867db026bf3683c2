"""Reproducible random streams.

Independent streams are derived from a user seed plus an integer path
(e.g. a bootstrap draw index) through numpy's SeedSequence feeding a
Philox counter-based generator. Streams are bit-reproducible and do not
depend on execution order, which makes parallel maps deterministic.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for the stream identified by (seed, *path)."""
    entropy = (int(seed) & _MASK64, *(int(p) & _MASK64 for p in path))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *path: int) -> int:
    """A 63-bit sub-seed for components that take integer seeds."""
    entropy = (int(seed) & _MASK64, *(int(p) & _MASK64 for p in path))
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint64)
    return int((int(state[0]) ^ (int(state[1]) << 1)) & (_MASK64 >> 1))
