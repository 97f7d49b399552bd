"""Counter-based seeding: every (seed, stream) pair owns an independent generator."""
from __future__ import annotations

import numpy as np

# Stream ids kept apart from window indices, which are non-negative.
DYADIC_SAMPLE_STREAM = -1
LADDER_SAMPLE_STREAM = -2


def generator(seed: int, stream: int) -> np.random.Generator:
    """Generator keyed by ``(seed, stream)``, independent of call order."""

    key = [int(seed), int(stream) & 0xFFFFFFFFFFFFFFFF]
    return np.random.default_rng(np.random.SeedSequence(key))


def window_start(seed: int, index: int, X: int, h: int) -> int:
    """Uniform integer in ``[X, 2X - h]`` for window *index*."""

    return int(generator(seed, index).integers(X, 2 * X - h, endpoint=True))


def uniform_integers(seed: int, stream: int, low: int, high: int, count: int) -> np.ndarray:
    """*count* integers drawn uniformly with replacement from ``[low, high]``."""

    return generator(seed, stream).integers(low, high, size=count, endpoint=True, dtype=np.int64)


def entropy_seed() -> int:
    """Fresh 64-bit seed from operating-system entropy."""

    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
