"""Deterministic seed derivation.

Every random decision in the toolkit flows from a 64-bit master seed
through splitmix64, so frames are independent of each other and of
generation order, and output is reproducible across platforms.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

SPLITMIX64_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, 64-bit output)."""
    state = (state + SPLITMIX64_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def mix(*values: int) -> int:
    """Hash an ordered tuple of integers into one 64-bit value.

    Feeds each value through a splitmix64 round, chaining the state.
    Used to derive per-frame and per-pixel seeds from the master seed.
    """
    state = 0
    for v in values:
        state, out = splitmix64((state ^ (int(v) & _MASK64)) & _MASK64)
        state ^= out
    _, out = splitmix64(state)
    return out


def frame_seed(master_seed: int, frame_index: int) -> int:
    """Seed for one frame; stable under reordering and parallelism."""
    return mix(master_seed, frame_index)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64-backed generator; the named, stable RNG for all sampling."""
    return np.random.Generator(np.random.PCG64(seed))
