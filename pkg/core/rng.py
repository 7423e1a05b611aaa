# core/rng.py
"""Seeded random streams.

All randomness goes through Philox (counter-based, platform-stable) keyed by a
master seed plus a spawn key, so that the stream for, say, threshold 3 /
replicate 17 never depends on how many other streams were drawn first.
"""
import secrets
from typing import Sequence, Union

import numpy as np

RNG_ALGORITHM = "numpy.random.Philox"

SeedLike = Union[int, Sequence[int]]


def make_rng(seed: SeedLike, *key: int) -> np.random.Generator:
    if isinstance(seed, (int, np.integer)):
        entropy, spawn_key = int(seed), tuple(key)
    else:
        seed = tuple(int(s) for s in seed)
        entropy, spawn_key = seed[0], seed[1:] + tuple(key)
    if entropy < 0:
        raise ValueError("seed must be non-negative")
    sequence = np.random.SeedSequence(entropy, spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(sequence))


def fresh_seed() -> int:
    return secrets.randbits(63)
