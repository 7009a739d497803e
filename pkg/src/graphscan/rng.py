"""Deterministic per-replicate random streams.

Every Monte Carlo replicate draws from its own counter-based generator so that
results depend only on (seed, replicate index), never on how replicates are
scheduled across workers. The stream for a pair is a Philox4x64 bit generator
keyed with the 128-bit value ``seed * 2**64 + index``; normal variates come
from ``numpy.random.Generator.standard_normal`` on that stream.
"""
from __future__ import annotations

import numpy as np

__all__ = ["replicate_rng"]

_MASK64 = (1 << 64) - 1


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one replicate of a seeded experiment."""
    if index < 0:
        raise ValueError(f"replicate index must be nonnegative, got {index}")
    key = ((int(seed) & _MASK64) << 64) | (int(index) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))
