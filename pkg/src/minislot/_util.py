"""Small shared helpers: RNG coercion and dB conversions."""

from __future__ import annotations

import numpy as np


def as_rng(seed) -> np.random.Generator:
    """Coerce an int / SeedSequence / Generator into a Generator.

    Passing a Generator through unchanged lets callers hand out substreams;
    everything else goes through default_rng so results are reproducible
    for a fixed integer seed.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def db_to_lin(x_db: float) -> float:
    return float(10.0 ** (np.asarray(x_db, dtype=float) / 10.0))


def lin_to_db(x: float) -> float:
    return float(10.0 * np.log10(x))
