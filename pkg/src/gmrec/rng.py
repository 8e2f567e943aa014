"""Seedable, splittable random streams.

Every stochastic operation in the package takes an explicit
``numpy.random.Generator``. Derived streams are keyed by integer paths so
that concurrent trials are reproducible independently of execution order:
``stream(seed, n, m, trial)`` always yields the same generator.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return a generator keyed by ``seed`` and an integer derivation path."""
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(p) & 0xFFFFFFFFFFFFFFFF for p in path]
    return np.random.default_rng(np.random.SeedSequence(key))
