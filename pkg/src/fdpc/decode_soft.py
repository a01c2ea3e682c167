"""Weighted min-sum with progressive list splitting for soft-output channels.

Messages follow the accumulate-and-scale form: check messages are plain
min-sum, each bit's running value absorbs ``beta`` times the sum of its
incoming check messages, and outgoing bit messages subtract the scaled
message of the destination check. Forced (split) bits sit at
``llr_max * scale`` where ``scale`` is the mean channel magnitude, so
multiplying the channel output by a positive constant scales every internal
quantity by the same constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .construction import SparseBitMatrix
from .decode_bec import DECODED, FAILURE, DecodeResult, Status, _STATUS

LLR_MAX = 64.0


@dataclass(frozen=True)
class SoftConfig:
    beta: float = 0.05
    iters_per_stage: int = 4
    max_stages: int = 16
    max_list: int = 2**16
    llr_max: float = LLR_MAX
    check_every_iteration: bool = True

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.iters_per_stage < 1 or self.max_stages < 1 or self.max_list < 1:
            raise ValueError("iteration, stage and list limits must be >= 1")

    @classmethod
    def min_sum(cls, iterations: int = 50, beta: float = 0.05) -> SoftConfig:
        """Single path, single stage: plain weighted min-sum."""
        return cls(beta=beta, iters_per_stage=iterations, max_stages=1, max_list=1)


@dataclass
class LlrState:
    y: np.ndarray
    q: np.ndarray
    r: np.ndarray
    beta: float
    scale: float = 1.0

    @classmethod
    def from_channel(cls, yin, h: SparseBitMatrix, beta: float = 0.05) -> LlrState:
        yin = np.asarray(yin, dtype=np.float64)
        _, edge_var = h.csr
        return cls(yin.copy(), yin[edge_var].copy(), np.zeros(edge_var.shape[0]), beta, _scale(yin))


@dataclass
class SoftPath:
    state: LlrState
    alive: bool = True
    split_history: list[tuple[int, int]] = field(default_factory=list)


@njit(cache=True)
def scale_kernel(yin):
    """Mean magnitude of the channel output (1 for an all-zero input)."""
    m = 0.0
    for i in range(yin.shape[0]):
        m += abs(yin[i])
    return m / yin.shape[0] if m > 0 else 1.0


def _scale(yin) -> float:
    return float(scale_kernel(np.ascontiguousarray(yin, dtype=np.float64)))


# -- kernels -------------------------------------------------------------------


@njit(cache=True)
def minsum_kernel(y, q, r, row_ptr, edge_var, col_ptr, col_edge, beta, sat, fvar, fsign, nforced):
    nrows = row_ptr.shape[0] - 1
    for j in range(nrows):
        a = row_ptr[j]
        b = row_ptr[j + 1]
        sgn = 1.0
        min1 = np.inf
        min2 = np.inf
        amin = -1
        for e in range(a, b):
            v = q[e]
            if v < 0:
                sgn = -sgn
                v = -v
            if v < min1:
                min2 = min1
                min1 = v
                amin = e
            elif v < min2:
                min2 = v
        for e in range(a, b):
            mag = min2 if e == amin else min1
            s = -sgn if q[e] < 0 else sgn
            r[e] = s * mag
    n = y.shape[0]
    for i in range(n):
        acc = 0.0
        for k in range(col_ptr[i], col_ptr[i + 1]):
            acc += r[col_edge[k]]
        v = y[i] + beta * acc
        if v > sat:
            v = sat
        elif v < -sat:
            v = -sat
        y[i] = v
    for f in range(nforced):
        y[fvar[f]] = fsign[f] * sat
    for i in range(n):
        yi = y[i]
        for k in range(col_ptr[i], col_ptr[i + 1]):
            e = col_edge[k]
            q[e] = yi - beta * r[e]


@njit(cache=True)
def _unsatisfied(y, row_ptr, edge_var, flags):
    total = 0
    for j in range(row_ptr.shape[0] - 1):
        parity = 0
        for e in range(row_ptr[j], row_ptr[j + 1]):
            if y[edge_var[e]] < 0:
                parity ^= 1
        flags[j] = parity
        total += parity
    return total


@njit(cache=True)
def deficiency_kernel(y, row_ptr, edge_var, col_ptr, col_edge, edge_row):
    flags = np.empty(row_ptr.shape[0] - 1, dtype=np.int64)
    _unsatisfied(y, row_ptr, edge_var, flags)
    n = y.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for k in range(col_ptr[i], col_ptr[i + 1]):
            out[i] += flags[edge_row[col_edge[k]]]
    return out


@njit(cache=True)
def _split_var(y, row_ptr, edge_var, col_ptr, col_edge, edge_row, fvar, nforced):
    d = deficiency_kernel(y, row_ptr, edge_var, col_ptr, col_edge, edge_row)
    best = -1
    bestd = -1
    for i in range(y.shape[0]):
        if d[i] > bestd:
            taken = False
            for f in range(nforced):
                if fvar[f] == i:
                    taken = True
                    break
            if not taken:
                best = i
                bestd = d[i]
    return best


@njit(cache=True)
def _hard(y, out):
    for i in range(y.shape[0]):
        out[i] = 1 if y[i] < 0 else 0


@njit(cache=True)
def mppl_soft_kernel(yin, row_ptr, edge_var, col_ptr, col_edge, edge_row, beta, sat,
                     iters_per_stage, max_stages, max_list, check_every, out):
    """Returns (status, stages, iterations, peak list, final list); hard decisions in ``out``."""
    n = yin.shape[0]
    ne = edge_var.shape[0]
    nrows = row_ptr.shape[0] - 1
    flags = np.empty(nrows, dtype=np.int64)
    r = np.empty(ne, dtype=np.float64)
    # the list grows in place: the minus child of path p goes to the free slot npaths + p.
    # rows of the buffers that are never reached stay uncommitted
    cap = 1
    while cap < max_list and cap < (1 << (max_stages - 1)):
        cap *= 2
    ys = np.empty((cap, n), dtype=np.float64)
    qs = np.empty((cap, ne), dtype=np.float64)
    fv = np.zeros((cap, max_stages), dtype=np.int64)
    fs = np.zeros((cap, max_stages), dtype=np.float64)
    for i in range(n):
        v = yin[i]
        ys[0, i] = min(max(v, -sat), sat)
    for e in range(ne):
        qs[0, e] = ys[0, edge_var[e]]
    nforced = 0
    if _unsatisfied(ys[0], row_ptr, edge_var, flags) == 0:
        _hard(ys[0], out)
        return DECODED, 0, 0, 1, 1
    npaths = 1
    peak = 1
    iters = 0
    stages = 0
    while True:
        stages += 1
        for p in range(npaths):
            for it in range(iters_per_stage):
                minsum_kernel(ys[p], qs[p], r, row_ptr, edge_var, col_ptr, col_edge, beta, sat,
                              fv[p], fs[p], nforced)
                iters += 1
                if check_every or it == iters_per_stage - 1:
                    if _unsatisfied(ys[p], row_ptr, edge_var, flags) == 0:
                        _hard(ys[p], out)
                        return DECODED, stages, iters, peak, npaths
        if stages >= max_stages or 2 * npaths > max_list:
            _hard(ys[0], out)
            return FAILURE, stages, iters, peak, npaths
        for p in range(npaths):
            j = _split_var(ys[p], row_ptr, edge_var, col_ptr, col_edge, edge_row, fv[p], nforced)
            c = npaths + p
            ys[c] = ys[p]
            qs[c] = qs[p]
            fv[c, :nforced] = fv[p, :nforced]
            fs[c, :nforced] = fs[p, :nforced]
            for d, sign in ((p, 1.0), (c, -1.0)):
                fv[d, nforced] = j
                fs[d, nforced] = sign
                ys[d, j] = sign * sat
                for k in range(col_ptr[j], col_ptr[j + 1]):
                    qs[d, col_edge[k]] = sign * sat
        nforced += 1
        npaths *= 2
        if npaths > peak:
            peak = npaths


# -- public API --------------------------------------------------------------


def _graph(h: SparseBitMatrix):
    row_ptr, edge_var = h.csr
    col_ptr, col_edge = h.csc
    edge_row = np.repeat(np.arange(h.rows), np.diff(row_ptr))
    return row_ptr, edge_var, col_ptr, col_edge, edge_row


def hard_decision(y) -> np.ndarray:
    """Bit 1 exactly where the soft value is negative (zero maps to bit 0)."""
    return (np.asarray(y) < 0).astype(np.uint8)


def min_sum_iteration(p: SoftPath, h: SparseBitMatrix) -> SoftPath:
    if not p.alive:
        raise ValueError("path is dead")
    row_ptr, edge_var, col_ptr, col_edge, _ = _graph(h)
    st = p.state
    y, q, r = st.y.copy(), st.q.copy(), st.r.copy()
    fvar = np.array([v for v, _ in p.split_history], dtype=np.int64)
    fsign = np.array([1.0 - 2.0 * b for _, b in p.split_history], dtype=np.float64)
    sat = LLR_MAX * st.scale
    minsum_kernel(y, q, r, row_ptr, edge_var, col_ptr, col_edge, st.beta, sat, fvar, fsign, len(fvar))
    return SoftPath(LlrState(y, q, r, st.beta, st.scale), True, list(p.split_history))


def deficiency(p: SoftPath, h: SparseBitMatrix) -> np.ndarray:
    return deficiency_kernel(p.state.y, *_graph(h))


def decode_soft_mppl(yin, h: SparseBitMatrix, cfg: SoftConfig | None = None) -> DecodeResult:
    cfg = cfg or SoftConfig()
    yin = np.ascontiguousarray(yin, dtype=np.float64)
    if yin.shape != (h.cols,):
        raise ValueError(f"input length {yin.shape} does not match {h.cols} columns")
    if np.any(h.row_weights < 2):
        raise ValueError("every check must involve at least two bits")
    out = np.empty(h.cols, dtype=np.uint8)
    sat = cfg.llr_max * _scale(yin)
    status, stages, iters, peak, final = mppl_soft_kernel(
        yin, *_graph(h), cfg.beta, sat, cfg.iters_per_stage, cfg.max_stages, cfg.max_list,
        cfg.check_every_iteration, out,
    )
    return DecodeResult(_STATUS[status], out.copy(), int(iters), int(stages), int(peak), int(final))
