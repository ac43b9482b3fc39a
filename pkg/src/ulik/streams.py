"""Deterministic RNG substreams.

Streams are keyed by (seed, *key) through a counter-based Philox generator,
so independent consumers (cells, variate kinds, workers) can draw in any
order or in parallel without perturbing each other.
"""

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream identified by (seed, *key)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
