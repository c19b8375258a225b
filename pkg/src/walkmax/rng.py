"""Seedable, splittable pseudo-random generators."""

from __future__ import annotations

from typing import List

import numpy as np

PRNG_ID = "numpy.PCG64"


def make_generator(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Return a PCG64 generator for an integer seed or a spawned seed sequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def spawn_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    """Derive ``count`` independent child seed sequences from ``seed``."""
    return np.random.SeedSequence(seed).spawn(count)
