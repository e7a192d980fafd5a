"""Deterministic 64-bit seed derivation.

All randomness in the package flows from ``numpy.random.default_rng`` seeded
with values produced here, so every run is reproducible from a single master
seed. Sub-streams (GA restarts, instance draws, Monte Carlo chunks, ...) are
decorrelated by hashing the parent seed together with small integer tags via
a splitmix64 avalanche, which is platform independent.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

# Stream tags keep unrelated consumers of the same parent seed apart.
STREAM_INSTANCE_DRAWS = 0x01
STREAM_INSTANCE_SEED = 0x02
STREAM_GA_RESTART = 0x03
STREAM_TRIALS = 0x04
STREAM_RAND_BASELINE = 0x05
STREAM_SWEEP = 0x06
STREAM_TRIAL_CHUNK = 0x07


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(base: int, *parts: int) -> int:
    """Mix ``base`` with integer tags into a fresh 64-bit seed.

    The mix is a fixed splitmix64 chain: associative reorderings or different
    tag values always yield different (decorrelated) outputs.
    """
    acc = _splitmix64(int(base) & MASK64)
    for part in parts:
        acc = _splitmix64(acc ^ (int(part) & MASK64))
    return acc


def rng_from(base: int, *parts: int) -> np.random.Generator:
    """Generator seeded from ``derive_seed(base, *parts)``."""
    return np.random.default_rng(derive_seed(base, *parts))
