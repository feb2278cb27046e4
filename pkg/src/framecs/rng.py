"""Deterministic random streams derived from user-supplied integer seeds.

Every randomized operation takes an explicit seed; nothing touches numpy's
global state.  Substreams are keyed by (seed, index) so that parallel trial
execution cannot change results.
"""

import numpy as np

_MASK = (1 << 63) - 1


def rng_from_seed(seed: int) -> np.random.Generator:
    """Generator for a single stream identified by an integer seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed) & _MASK))


def rng_substream(seed: int, index: int) -> np.random.Generator:
    """Generator for substream `index` of the stream `seed`.

    Substreams for distinct indices are statistically independent and do not
    depend on the order in which they are created.
    """
    return np.random.default_rng(
        np.random.SeedSequence(int(seed) & _MASK, spawn_key=(int(index),))
    )


def derive_seed(seed: int, index: int) -> int:
    """Collapse substream (seed, index) to a plain integer seed."""
    ss = np.random.SeedSequence(int(seed) & _MASK, spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
