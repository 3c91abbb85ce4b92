"""Deterministic random-number stream derivation.

All randomness in the package flows through numpy's PCG64 generator. A
stream is identified by a user-facing 64-bit seed plus an integer key
path, combined with ``numpy.random.SeedSequence(seed, spawn_key=key)``.
The same (seed, key) pair always yields the same stream on every
platform, which is what makes seeded pipelines bytewise reproducible.

Key paths are namespaced by the constants below so that independent
stages of a pipeline (e.g. up-sampling and augmentation) never share a
stream even when given the same seed.
"""

import numpy as np

NS_UPSAMPLE = 0
NS_AUGMENT = 1
NS_INIT = 3
NS_BATCH = 4
NS_DROPOUT = 5
NS_SALIENCY = 6
NS_SYNTH = 7
NS_CONDCONF = 8
NS_SWEEP = 9
NS_EPOCH_FILE = 10


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Return a PCG64 generator for the stream identified by (seed, key)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse (seed, key) into a plain integer seed for APIs that take one."""
    state = np.random.SeedSequence(seed, spawn_key=key).generate_state(1, np.uint64)
    return int(state[0])
