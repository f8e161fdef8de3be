"""Counter-based random streams.

Every randomized operation draws from a Philox generator keyed by
``(master seed, trial index, stream label)``.  Streams for different labels
are statistically independent and insensitive to the order in which other
streams are consumed, so refactoring or parallelizing trials cannot change
results.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(*keys: int | str) -> np.random.Generator:
    """Return a Generator keyed by the given ints / short string labels."""
    entropy = []
    for k in keys:
        if isinstance(k, str):
            entropy.append(zlib.crc32(k.encode("utf-8")))
        else:
            entropy.append(int(k) & _MASK64)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def seeded(seed, *labels: int | str) -> np.random.Generator:
    """Stream for an int or tuple seed plus operation labels."""
    if isinstance(seed, tuple):
        return stream(*seed, *labels)
    return stream(int(seed), *labels)


def substream(rng_or_seed, *keys: int | str) -> np.random.Generator:
    """Derive a labelled child stream from a seed, or pass a Generator through."""
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return seeded(rng_or_seed, *keys)
