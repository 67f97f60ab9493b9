"""Deterministic 64-bit seed derivation.

Batch generation and experiment sweeps derive one child seed per work
item from a base seed plus integer (or bit-cast float) keys, so results
are reproducible and independent of scheduling order.  The mixer is the
standard splitmix64 finalizer (fixed constants below).
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1

__all__ = ["splitmix64", "derive_seed", "float_key"]


def splitmix64(x: int) -> int:
    """One splitmix64 avalanche step on a 64-bit value."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(base: int, *keys: int) -> int:
    """Mix a base seed with any number of integer keys.

    ``derive_seed(s)`` != ``s`` in general; every appended key fully
    rehashes the state, so ``(base, keys)`` tuples map to statistically
    independent streams.
    """
    state = splitmix64(base & _MASK)
    for k in keys:
        state = splitmix64(state ^ splitmix64(k & _MASK))
    return state


def float_key(x: float) -> int:
    """Bit-cast a float to an integer key for :func:`derive_seed`."""
    return int(np.float64(x).view(np.uint64))
