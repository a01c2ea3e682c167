"""Dense GF(2) linear algebra on row-major packed 64-bit words.

Bit ``j`` of a row lives in word ``j // 64`` at bit position ``j % 64``.
Public functions take and return 0/1 ``uint8`` vectors; the packed form is
an implementation detail shared with the decoder kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

WORD = 64


def n_words(nbits: int) -> int:
    return (nbits + WORD - 1) // WORD


def pack(bits: np.ndarray) -> np.ndarray:
    """Pack a 1-D or 2-D 0/1 array along its last axis."""
    bits = np.asarray(bits, dtype=np.uint8)
    nbits = bits.shape[-1]
    padded = np.zeros(bits.shape[:-1] + (n_words(nbits) * WORD,), dtype=np.uint8)
    padded[..., :nbits] = bits & 1
    return np.packbits(padded, axis=-1, bitorder="little").view(np.uint64)


def unpack(words: np.ndarray, nbits: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype=np.uint64)
    bits = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return bits[..., :nbits]


@njit(cache=True)
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def rref_inplace(data, ncols):
    """Reduced row echelon form over GF(2); returns pivot columns in order."""
    nrows, nw = data.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for r in range(rank, nrows):
            if data[r, w] & bit:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(nw):
                tmp = data[rank, k]
                data[rank, k] = data[piv, k]
                data[piv, k] = tmp
        for r in range(nrows):
            if r != rank and (data[r, w] & bit):
                for k in range(w, nw):
                    data[r, k] ^= data[rank, k]
        pivots[rank] = col
        rank += 1
    return pivots[:rank]


@njit(cache=True)
def _syndrome_packed(data, x):
    nrows, nw = data.shape
    out = np.zeros(nrows, dtype=np.uint8)
    for r in range(nrows):
        acc = np.uint64(0)
        for k in range(nw):
            acc ^= data[r, k] & x[k]
        out[r] = popcount64(acc) & 1
    return out


@dataclass(frozen=True)
class BitMatrix:
    """Binary matrix stored as packed rows; ``data`` has shape ``(rows, n_words(cols))``."""

    rows: int
    cols: int
    data: np.ndarray

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if self.data.shape != (self.rows, n_words(self.cols)):
            raise ValueError(f"payload shape {self.data.shape} does not match {self.rows}x{self.cols}")

    @classmethod
    def from_dense(cls, dense) -> BitMatrix:
        dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8))
        rows, cols = dense.shape
        return cls(rows, cols, pack(dense).reshape(rows, n_words(cols)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, np.zeros((rows, n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return unpack(self.data, self.cols)

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and np.array_equal(self.data, other.data)

    __hash__ = None


def rank(m: BitMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref_inplace(m.data.copy(), m.cols))


def rref(m: BitMatrix) -> tuple[BitMatrix, np.ndarray]:
    """Return the reduced row echelon form (zero rows dropped) and its pivot columns."""
    work = m.data.copy()
    pivots = rref_inplace(work, m.cols) if m.rows and m.cols else np.empty(0, dtype=np.int64)
    r = len(pivots)
    return BitMatrix(r, m.cols, np.ascontiguousarray(work[:r])), pivots


def nullspace_basis(m: BitMatrix) -> list[np.ndarray]:
    """Basis of ``{v : m v = 0}``, one vector per non-pivot column.

    The vector for free column ``f`` has a one at ``f``, zeros at every other
    free column, and pivot entries read off the reduced form.
    """
    reduced, pivots = rref(m)
    dense = reduced.to_dense()
    pivot_set = set(int(p) for p in pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = np.zeros(m.cols, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = dense[i, f]
        basis.append(v)
    return basis


def syndrome(m: BitMatrix, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    if x.ndim != 1 or x.shape[0] != m.cols:
        raise ValueError(f"vector length {x.shape} does not match {m.cols} columns")
    if m.rows == 0:
        return np.zeros(0, dtype=np.uint8)
    return _syndrome_packed(m.data, pack(x))
