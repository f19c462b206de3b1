"""Counter-based keyed hashing for reproducible randomness.

Every random decision in the package is a pure function of (seed, counter),
so generation order, segmentation, and worker count never change results.
The mixer is the splitmix64 finalizer, which passes the usual avalanche
tests and vectorizes cleanly over uint64 arrays.
"""

from __future__ import annotations

import numpy as np

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def mix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """Hash each uint64 counter with the seed; returns uint64 array."""
    offset = ((seed + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = counters.astype(np.uint64, copy=True)
    z += np.uint64(offset)
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def mix64_scalar(seed: int, counter: int) -> int:
    return int(mix64(seed, np.array([counter], dtype=np.uint64))[0])
