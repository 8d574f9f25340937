"""Counter-based random streams.

Every randomized computation draws from ``Generator(Philox(...))`` keyed by
the user seed and an integer cell index, so a sweep cell produces the same
numbers whether it runs first, last or on another worker.
"""

from __future__ import annotations

import numpy as np

SEED_MASK = (1 << 64) - 1


def cell_rng(seed: int, cell: int = 0) -> np.random.Generator:
    if seed is None:
        raise ValueError("a seed is required for randomized commands")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & SEED_MASK, int(cell)])))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an int seed or None (fresh entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.Generator(np.random.Philox())
    return cell_rng(int(rng))
