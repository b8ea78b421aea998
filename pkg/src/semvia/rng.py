"""Counter-based SplitMix64 uniforms.

The n-th draw (n = 0, 1, ...) of a stream with 64-bit seed ``s`` is::

    z = (s + (n + 1) * 0x9E3779B97F4A7C15) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    z = z ^ (z >> 31)
    u = (z >> 11) * 2**-53

which is exactly the output sequence of the SplitMix64 generator seeded with
``s``, but addressable by counter. A simulated slot ``t >= 2`` consumes the
draws ``3(t-2)``, ``3(t-2)+1`` and ``3(t-2)+2`` as (source, sample, channel).

Replication ``r`` of a run seeded with ``s`` uses the seed
``s ^ mix64(r * 0x9E3779B97F4A7C15)``; ``mix64(0) == 0`` so replication 0
reuses ``s`` unchanged.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def uniform(seed: int, counter: int) -> float:
    return (mix64(seed + (counter + 1) * GOLDEN) >> 11) * INV_2_53


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized ``[uniform(seed, start + k) for k in range(count)]``."""
    n = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + n * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * INV_2_53


def derive_seed(seed: int, replication: int) -> int:
    return (int(seed) & MASK64) ^ mix64(int(replication) * GOLDEN)


def slot_draws(seed: int, t: int) -> tuple[float, float, float]:
    """Uniforms (source, sample, channel) for slot ``t >= 2``."""
    base = 3 * (t - 2)
    return uniform(seed, base), uniform(seed, base + 1), uniform(seed, base + 2)
