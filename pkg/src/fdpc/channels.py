"""Seeded erasure and Gaussian channels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .rng import STREAM_CHANNEL, STREAM_MESSAGE, derive_key, draw_normal, draw_u64, draw_uniform

ERASED = 2


@dataclass(frozen=True)
class ChannelRng:
    """Deterministic randomness for one trial: ``(seed, trial)`` fixes every draw."""

    seed: int
    trial: int = 0

    def key(self, stream: int) -> np.uint64:
        return np.uint64(derive_key(np.uint64(self.seed), stream, np.uint64(self.trial)))


@dataclass
class ErasureWord:
    """Received word over {0, 1, ERASED}."""

    symbols: np.ndarray

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int8)
        if self.symbols.ndim != 1 or np.any((self.symbols < 0) | (self.symbols > ERASED)):
            raise ValueError("symbols must be a 1-D array over {0, 1, 2}")

    def __len__(self):
        return len(self.symbols)

    @property
    def erased(self) -> np.ndarray:
        return np.flatnonzero(self.symbols == ERASED)

    @classmethod
    def from_codeword(cls, c, erased=()) -> ErasureWord:
        sym = np.asarray(c, dtype=np.int8).copy()
        sym[list(erased)] = ERASED
        return cls(sym)


@njit(cache=True)
def bec_kernel(c, eps, key, out):
    for i in range(c.shape[0]):
        out[i] = ERASED if draw_uniform(key, i) < eps else c[i]


@njit(cache=True)
def awgn_kernel(c, sigma, key, out):
    for i in range(c.shape[0]):
        out[i] = (1.0 - 2.0 * c[i]) + sigma * draw_normal(key, 2 * i)


@njit(cache=True)
def message_kernel(key, out):
    word = np.uint64(0)
    for i in range(out.shape[0]):
        if i % 64 == 0:
            word = draw_u64(key, i // 64)
        out[i] = (word >> np.uint64(i % 64)) & np.uint64(1)


def bec_transmit(c, eps: float, rng: ChannelRng) -> ErasureWord:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability {eps} outside [0, 1]")
    c = np.asarray(c, dtype=np.int8)
    out = np.empty(c.shape[0], dtype=np.int8)
    bec_kernel(c, eps, rng.key(STREAM_CHANNEL), out)
    return ErasureWord(out)


def awgn_transmit(c, sigma: float, rng: ChannelRng) -> np.ndarray:
    """BPSK (0 -> +1, 1 -> -1) plus Gaussian noise; raw outputs, no LLR scaling."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    c = np.asarray(c, dtype=np.int8)
    out = np.empty(c.shape[0], dtype=np.float64)
    awgn_kernel(c, sigma, rng.key(STREAM_CHANNEL), out)
    return out


def random_message(k: int, rng: ChannelRng) -> np.ndarray:
    out = np.empty(k, dtype=np.uint8)
    message_kernel(rng.key(STREAM_MESSAGE), out)
    return out
