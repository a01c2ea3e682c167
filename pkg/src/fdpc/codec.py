"""Systematic encoding and codeword membership."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import gf2
from .construction import SparseBitMatrix


@dataclass(frozen=True)
class Encoder:
    """Generator rows packed as ``(k, n_words(n))``; ``positions[i]`` is where message bit ``i`` appears."""

    n: int
    generator: np.ndarray
    positions: np.ndarray

    @property
    def k(self) -> int:
        return len(self.positions)

    def generator_bits(self) -> np.ndarray:
        if self.k == 0:
            return np.zeros((0, self.n), dtype=np.uint8)
        return gf2.unpack(self.generator, self.n)


@njit(cache=True)
def encode_packed(generator, msg, out):
    out[:] = 0
    for i in range(msg.shape[0]):
        if msg[i]:
            for w in range(out.shape[0]):
                out[w] ^= generator[i, w]


def build_encoder(h: SparseBitMatrix) -> Encoder:
    # free columns of the reduced form become the message positions
    basis = gf2.nullspace_basis(h.dense)
    reduced, pivots = gf2.rref(h.dense)
    positions = np.setdiff1d(np.arange(h.cols), pivots)
    if basis:
        generator = gf2.pack(np.array(basis, dtype=np.uint8))
    else:
        generator = np.zeros((0, gf2.n_words(h.cols)), dtype=np.uint64)
    return Encoder(h.cols, np.ascontiguousarray(generator), positions.astype(np.int64))


def encode(e: Encoder, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape != (e.k,):
        raise ValueError(f"message length {msg.shape} does not match k={e.k}")
    out = np.zeros(gf2.n_words(e.n), dtype=np.uint64)
    encode_packed(e.generator, msg, out)
    return gf2.unpack(out, e.n)


def is_codeword(h: SparseBitMatrix, x) -> bool:
    return not gf2.syndrome(h.dense, x).any()
