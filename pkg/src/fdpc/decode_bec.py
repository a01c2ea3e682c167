"""Message passing with progressive list splitting over the erasure channel."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit

from . import gf2
from .channels import ERASED, ErasureWord
from .construction import SparseBitMatrix

DECODED, NOT_UNIQUE, FAILURE = 0, 1, 2


class Status(str, Enum):
    DECODED = "decoded"
    NOT_UNIQUE = "not_unique"
    FAILURE = "failure"


_STATUS = {DECODED: Status.DECODED, NOT_UNIQUE: Status.NOT_UNIQUE, FAILURE: Status.FAILURE}


@dataclass
class DecodeResult:
    status: Status
    codeword: np.ndarray | None
    iterations: int = 0
    stages: int = 0
    peak_list: int = 1
    final_list: int = 1

    @property
    def decoded(self) -> bool:
        return self.status is Status.DECODED


@dataclass
class BecPath:
    word: np.ndarray
    alive: bool = True
    history: list[tuple[int, int]] = field(default_factory=list)

    @classmethod
    def start(cls, y) -> BecPath:
        sym = y.symbols if isinstance(y, ErasureWord) else y
        return cls(np.array(sym, dtype=np.int8))

    @property
    def n_erased(self) -> int:
        return int(np.count_nonzero(self.word == ERASED))


# -- kernels -------------------------------------------------------------------


@njit(cache=True)
def mp_iter_kernel(word, row_ptr, edge_var, scratch):
    """One flooding iteration in place. Returns (resolved count, dead flag)."""
    scratch[:] = word
    resolved = 0
    for j in range(row_ptr.shape[0] - 1):
        unknown = 0
        last = -1
        parity = 0
        for e in range(row_ptr[j], row_ptr[j + 1]):
            v = edge_var[e]
            s = word[v]
            if s == ERASED:
                unknown += 1
                last = v
                if unknown == 2:
                    break
            else:
                parity ^= s
        if unknown == 0:
            if parity:
                return resolved, True
        elif unknown == 1:
            cur = scratch[last]
            if cur == ERASED:
                scratch[last] = parity
                resolved += 1
            elif cur != parity:
                return resolved, True
    word[:] = scratch
    return resolved, False


@njit(cache=True)
def checks_satisfied(word, row_ptr, edge_var):
    for j in range(row_ptr.shape[0] - 1):
        parity = 0
        for e in range(row_ptr[j], row_ptr[j + 1]):
            parity ^= word[edge_var[e]]
        if parity:
            return False
    return True


@njit(cache=True)
def split_index_kernel(word, row_ptr, edge_var):
    best_row = -1
    best = 1 << 60
    for j in range(row_ptr.shape[0] - 1):
        m = 0
        for e in range(row_ptr[j], row_ptr[j + 1]):
            if word[edge_var[e]] == ERASED:
                m += 1
        if 0 < m < best:
            best = m
            best_row = j
    if best_row < 0:
        return -1
    for e in range(row_ptr[best_row], row_ptr[best_row + 1]):
        if word[edge_var[e]] == ERASED:
            return edge_var[e]
    return -1


@njit(cache=True)
def _count_erased(word):
    c = 0
    for i in range(word.shape[0]):
        if word[i] == ERASED:
            c += 1
    return c


@njit(cache=True)
def mppl_kernel(y, row_ptr, edge_var, max_list, lam, paths, alive, out):
    """Returns (status, stages, iterations, peak list, final list); codeword in ``out``."""
    n = y.shape[0]
    scratch = np.empty(n, dtype=np.int8)
    erased = np.empty(paths.shape[0], dtype=np.int64)
    finished = np.zeros(paths.shape[0], dtype=np.bool_)
    paths[0] = y
    alive[0] = True
    erased[0] = _count_erased(y)
    if erased[0] == 0:
        out[:] = y
        if checks_satisfied(y, row_ptr, edge_var):
            return DECODED, 0, 0, 1, 1
        return FAILURE, 0, 0, 1, 0
    nlist = 1
    peak = 1
    stages = 0
    iters = 0
    while True:
        stages += 1
        any_done = False
        for p in range(nlist):
            if not alive[p]:
                continue
            for _ in range(lam):
                res, dead = mp_iter_kernel(paths[p], row_ptr, edge_var, scratch)
                iters += 1
                if dead:
                    alive[p] = False
                    break
                erased[p] -= res
                if erased[p] == 0:
                    if checks_satisfied(paths[p], row_ptr, edge_var):
                        finished[p] = True
                        any_done = True
                    else:
                        alive[p] = False
                    break
                if res == 0:
                    break
        if any_done:
            first = -1
            distinct = False
            for p in range(nlist):
                if finished[p]:
                    if first < 0:
                        first = p
                    else:
                        for i in range(n):
                            if paths[p, i] != paths[first, i]:
                                distinct = True
                                break
            out[:] = paths[first]
            live = 0
            for p in range(nlist):
                if alive[p]:
                    live += 1
            return (NOT_UNIQUE if distinct else DECODED), stages, iters, peak, live
        live = 0
        for p in range(nlist):
            if alive[p]:
                if live != p:
                    paths[live] = paths[p]
                    erased[live] = erased[p]
                alive[live] = True
                live += 1
        if live == 0 or 2 * live > max_list:
            out[:] = y
            return FAILURE, stages, iters, peak, live
        for i in range(live):
            j = split_index_kernel(paths[i], row_ptr, edge_var)
            paths[live + i] = paths[i]
            paths[i, j] = 0
            paths[live + i, j] = 1
            erased[i] -= 1
            erased[live + i] = erased[i]
            alive[live + i] = True
        nlist = 2 * live
        if nlist > peak:
            peak = nlist


@njit(cache=True)
def ml_kernel(y, row_ptr, edge_var, out):
    """Solve for the erased positions. Returns status (FAILURE means inconsistent input)."""
    n = y.shape[0]
    nrows = row_ptr.shape[0] - 1
    pos = np.full(n, -1, dtype=np.int64)
    cols = np.empty(n, dtype=np.int64)
    e = 0
    for i in range(n):
        if y[i] == ERASED:
            pos[i] = e
            cols[e] = i
            e += 1
    nw = (e + 1 + 63) // 64
    a = np.zeros((nrows, nw), dtype=np.uint64)
    rhs_w = e >> 6
    rhs_b = np.uint64(1) << np.uint64(e & 63)
    for j in range(nrows):
        for k in range(row_ptr[j], row_ptr[j + 1]):
            v = edge_var[k]
            if pos[v] >= 0:
                p = pos[v]
                a[j, p >> 6] ^= np.uint64(1) << np.uint64(p & 63)
            elif y[v]:
                a[j, rhs_w] ^= rhs_b
    pivots = gf2.rref_inplace(a, e)
    r = pivots.shape[0]
    for j in range(r, nrows):
        if a[j, rhs_w] & rhs_b:
            return FAILURE
    for i in range(n):
        out[i] = y[i]
    for p in range(e):
        out[cols[p]] = 0
    for i in range(r):
        out[cols[pivots[i]]] = 1 if a[i, rhs_w] & rhs_b else 0
    return DECODED if r == e else NOT_UNIQUE


# -- public API --------------------------------------------------------------


def _symbols(y) -> np.ndarray:
    sym = y.symbols if isinstance(y, ErasureWord) else y
    return np.ascontiguousarray(sym, dtype=np.int8)


def mp_iter_bec(p: BecPath, h: SparseBitMatrix) -> tuple[BecPath, bool]:
    if not p.alive:
        raise ValueError("path is dead")
    row_ptr, edge_var = h.csr
    word = p.word.copy()
    resolved, dead = mp_iter_kernel(word, row_ptr, edge_var, np.empty_like(word))
    return BecPath(word, not dead, list(p.history)), resolved > 0


def path_split_index(p: BecPath, h: SparseBitMatrix) -> int:
    row_ptr, edge_var = h.csr
    j = split_index_kernel(p.word, row_ptr, edge_var)
    if j < 0:
        raise ValueError("path has no erasures")
    return int(j)


class BecWorkspace:
    """Reusable path storage for repeated decoding with one list size."""

    def __init__(self, n: int, max_list: int):
        self.paths = np.empty((max(max_list, 1) * 2, n), dtype=np.int8)
        self.alive = np.zeros(max(max_list, 1) * 2, dtype=np.bool_)
        self.out = np.empty(n, dtype=np.int8)


def decode_bec_mppl(y, h: SparseBitMatrix, max_list: int = 1024, lambda_it: int = 4, workspace=None) -> DecodeResult:
    if max_list < 1 or max_list & (max_list - 1):
        raise ValueError(f"list size must be a power of two, got {max_list}")
    if lambda_it < 1:
        raise ValueError("lambda_it must be >= 1")
    sym = _symbols(y)
    if sym.shape[0] != h.cols:
        raise ValueError(f"word length {sym.shape[0]} does not match {h.cols} columns")
    ws = workspace or BecWorkspace(h.cols, max_list)
    row_ptr, edge_var = h.csr
    status, stages, iters, peak, final = mppl_kernel(sym, row_ptr, edge_var, max_list, lambda_it, ws.paths, ws.alive, ws.out)
    cw = ws.out.astype(np.uint8) if status != FAILURE else None
    return DecodeResult(_STATUS[status], cw, int(iters), int(stages), int(peak), int(final))


def ml_oracle_bec(y, h: SparseBitMatrix) -> DecodeResult:
    """Gaussian elimination on the erased columns; ``NOT_UNIQUE`` returns one particular solution."""
    sym = _symbols(y)
    row_ptr, edge_var = h.csr
    out = np.empty(sym.shape[0], dtype=np.int8)
    status = ml_kernel(sym, row_ptr, edge_var, out)
    if status == FAILURE:
        raise ValueError("received word is inconsistent with every codeword")
    return DecodeResult(_STATUS[status], out.astype(np.uint8), 0, 0, 1, 1)
