"""Counter-based SplitMix64 streams.

Every random draw in the package is a pure function of ``(key, counter)``.
A key is derived from a master seed plus a small tuple of integers
(stream tag, trial index, ...), so trials can be generated in any order or
in parallel without overlap. The scheme is versioned by ``GENERATOR_NAME``;
changing any constant here changes every derived code and trial.
"""

from __future__ import annotations

import numpy as np
from numba import njit

GENERATOR_NAME = "splitmix64-ctr-v1"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1

# stream tags keep message, channel and construction draws disjoint
STREAM_PERMUTATION = 1
STREAM_MESSAGE = 2
STREAM_CHANNEL = 3


@njit(cache=True)
def mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def derive_key(master, a, b):
    """Key for the stream ``(master, a, b)``."""
    k = mix64(np.uint64(master) + _GOLDEN)
    k = mix64(k ^ (np.uint64(a) * _GOLDEN + np.uint64(1)))
    k = mix64(k ^ (np.uint64(b) * _MIX1 + np.uint64(2)))
    return k


@njit(cache=True)
def draw_u64(key, counter):
    return mix64(np.uint64(key) + (np.uint64(counter) + np.uint64(1)) * _GOLDEN)


@njit(cache=True)
def draw_uniform(key, counter):
    """Double in [0, 1) with 53 random bits."""
    return float(draw_u64(key, counter) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def draw_bounded(key, counter, bound):
    """Unbiased integer in [0, bound); returns (value, next counter)."""
    b = np.uint64(bound)
    threshold = (np.uint64(0) - b) % b
    while True:
        x = draw_u64(key, counter)
        counter += 1
        if x >= threshold:
            return np.int64(x % b), counter


@njit(cache=True)
def draw_normal(key, counter):
    """Standard normal via Box-Muller; consumes counters ``counter`` and ``counter + 1``."""
    u1 = 1.0 - draw_uniform(key, counter)
    u2 = draw_uniform(key, counter + 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@njit(cache=True)
def fisher_yates(n, key):
    perm = np.arange(n)
    counter = 0
    for i in range(n - 1, 0, -1):
        j, counter = draw_bounded(key, counter, i + 1)
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return perm


def permutation(n: int, seed: int) -> np.ndarray:
    """Uniform permutation of ``range(n)`` determined by a 64-bit seed."""
    key = np.uint64(derive_key(np.uint64(seed & _MASK), STREAM_PERMUTATION, 0))
    return fisher_yates(n, key)


def derive_seed(master: int, *path: int) -> int:
    """Derive a child 64-bit seed, e.g. per-block permutation seeds from one CLI seed."""
    k = np.uint64(master & _MASK)
    for p in path:
        k = np.uint64(derive_key(k, STREAM_PERMUTATION, np.uint64(p & _MASK)))
    return int(k)
