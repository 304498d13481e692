"""Reproducible random streams: one master seed, pure per-replicate substreams."""

from __future__ import annotations

import numpy as np

__all__ = ["substream_seed", "generator", "as_generator"]


def substream_seed(master_seed: int, *lane: int) -> int:
    """Derive a 64-bit seed for one replicate from a master seed and lane indices.

    Pure function of its arguments, so replicate i receives the same stream no
    matter how many workers run or in which order results arrive.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=lane)
    return int(ss.generate_state(1, np.uint64)[0])


def generator(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed directly by ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def as_generator(seed) -> np.random.Generator:
    """Accept either an integer seed or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return generator(int(seed))
