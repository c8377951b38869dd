"""Deterministic RNG stream derivation.

Every independent unit of work (a fit, a replication, a subject) owns a stream
derived from (seed, key...) so that parallel execution order never changes
results.
"""

import numpy as np


def seed_sequence(seed, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))


def rng_from(seed, *key) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *key))


def child_seed(seed, *key) -> int:
    """A plain integer seed for a child stream keyed by (seed, key...)."""
    return int(seed_sequence(seed, *key).generate_state(1, np.uint64)[0])
