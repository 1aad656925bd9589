"""Deterministic seed derivation for replicate-level parallelism.

Every replicate (or bootstrap draw, or sweep cell) gets its own
``SeedSequence`` keyed by position, so results are identical for any
execution order or worker count.
"""

import numpy as np


def child_seed(master_seed, *key):
    """SeedSequence for the work item at position ``key`` under ``master_seed``."""
    return np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))


def rng_from(seed):
    """Build a Generator from an int seed, a SeedSequence, or pass one through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def fresh_seed():
    """Draw a new 63-bit master seed from OS entropy (printed by the CLI)."""
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0] >> np.uint64(1))
