"""Seeded Monte Carlo simulation over channel-parameter grids."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .bounds import snr_db_to_sigma
from .channels import awgn_kernel, bec_kernel, message_kernel
from .codec import Encoder, build_encoder, encode_packed
from .construction import CodeSpec, SparseBitMatrix, build_order_s
from .decode_bec import DECODED, NOT_UNIQUE, mppl_kernel
from .decode_soft import SoftConfig, _graph, mppl_soft_kernel, scale_kernel
from .rng import STREAM_CHANNEL, STREAM_MESSAGE, derive_key

CHANNELS = ("bec", "awgn")
CSV_FIELDS = ("param", "trials", "block_errors", "bler", "ber", "undetected", "not_unique",
              "avg_iters", "avg_list", "seconds")


@dataclass(frozen=True)
class BecConfig:
    max_list: int = 1024
    lambda_it: int = 4

    def __post_init__(self):
        if self.max_list < 1 or self.max_list & (self.max_list - 1):
            raise ValueError(f"max_list must be a power of two, got {self.max_list}")
        if self.lambda_it < 1:
            raise ValueError("lambda_it must be >= 1")


@dataclass(frozen=True)
class SimConfig:
    """One simulation campaign. For ``awgn`` the grid holds Eb/N0 values in dB."""

    code: CodeSpec
    channel: str
    grid: tuple[float, ...]
    decoder: BecConfig | SoftConfig
    trials: int
    seed: int = 1
    max_errors: int = 200
    workers: int = 1
    chunk: int = 0

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.grid:
            raise ValueError("parameter grid is empty")
        if self.max_errors < 0 or self.workers < 1 or self.chunk < 0:
            raise ValueError("max_errors >= 0, workers >= 1 and chunk >= 0 required")
        want = BecConfig if self.channel == "bec" else SoftConfig
        if not isinstance(self.decoder, want):
            raise ValueError(f"{self.channel} needs a {want.__name__}")
        for g in self.grid:
            if self.channel == "bec" and not 0.0 <= g <= 1.0:
                raise ValueError(f"erasure probability {g} outside [0, 1]")
            if self.channel == "awgn" and math.isnan(g):
                raise ValueError("SNR must be a number")
        if prepare(self.code).encoder.k == 0:
            raise ValueError("code has dimension 0; nothing to simulate")

    def describe(self) -> str:
        """Every resolved value, enough to reproduce any output row."""
        p = prepare(self.code)
        lines = [
            f"code: {self.code.dumps().strip().replace(chr(10), ' ')}",
            f"n={p.h.cols} k={p.encoder.k} rate={p.rate:.6f}",
            f"channel={self.channel} grid={','.join(repr(g) for g in self.grid)}",
            f"decoder={type(self.decoder).__name__}({', '.join(f'{k}={v}' for k, v in asdict(self.decoder).items())})",
            f"trials={self.trials} seed={self.seed} max_errors={self.max_errors} workers={self.workers}",
        ]
        return "\n".join(lines)


@dataclass
class SimRecord:
    param: float
    trials: int = 0
    block_errors: int = 0
    bit_errors: int = 0
    undetected: int = 0
    not_unique: int = 0
    iterations: int = 0
    list_total: int = 0
    n: int = 1
    seconds: float = field(default=0.0, compare=False)

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.n) if self.trials else 0.0

    @property
    def avg_iters(self) -> float:
        return self.iterations / self.trials if self.trials else 0.0

    @property
    def avg_list(self) -> float:
        return self.list_total / self.trials if self.trials else 0.0

    def row(self) -> dict:
        return {"param": repr(self.param), "trials": self.trials, "block_errors": self.block_errors,
                "bler": repr(self.bler), "ber": repr(self.ber), "undetected": self.undetected,
                "not_unique": self.not_unique, "avg_iters": repr(self.avg_iters),
                "avg_list": repr(self.avg_list), "seconds": f"{self.seconds:.3f}"}


def records_to_csv(records: list[SimRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


# -- prepared code -------------------------------------------------------------


@dataclass(frozen=True)
class Prepared:
    h: SparseBitMatrix
    encoder: Encoder

    @property
    def rate(self) -> float:
        return self.encoder.k / self.h.cols


@lru_cache(maxsize=8)
def prepare(code: CodeSpec) -> Prepared:
    h = build_order_s(code)
    return Prepared(h, build_encoder(h))


# -- trial kernels ---------------------------------------------------------------
# per-trial outputs: 0 block error, 1 bit errors, 2 undetected, 3 not unique, 4 iterations, 5 final list


@njit(cache=True)
def _transmitted(gen, k, n, seed, trial, msg, packed, c):
    message_kernel(derive_key(seed, STREAM_MESSAGE, trial), msg)
    encode_packed(gen, msg, packed)
    for i in range(n):
        c[i] = (packed[i >> 6] >> np.uint64(i & 63)) & np.uint64(1)
    return derive_key(seed, STREAM_CHANNEL, trial)


@njit(cache=True)
def _score(status, c, out, res, t):
    n = c.shape[0]
    diff = 0
    for i in range(n):
        if out[i] != c[i]:
            diff += 1
    res[t, 1] = diff
    if status == DECODED:
        if diff:
            res[t, 0] = 1
            res[t, 2] = 1
    else:
        res[t, 0] = 1
        if status == NOT_UNIQUE:
            res[t, 3] = 1


@njit(cache=True)
def bec_trials(gen, k, n, seed, start, stop, eps, row_ptr, edge_var, max_list, lam, paths, alive):
    res = np.zeros((stop - start, 6), dtype=np.int64)
    msg = np.empty(k, dtype=np.uint8)
    packed = np.empty(gen.shape[1], dtype=np.uint64)
    c = np.empty(n, dtype=np.int8)
    y = np.empty(n, dtype=np.int8)
    out = np.empty(n, dtype=np.int8)
    for t in range(stop - start):
        key = _transmitted(gen, k, n, seed, np.uint64(start + t), msg, packed, c)
        bec_kernel(c, eps, key, y)
        status, stages, iters, peak, final = mppl_kernel(y, row_ptr, edge_var, max_list, lam, paths, alive, out)
        _score(status, c, out, res, t)
        res[t, 4] = iters
        res[t, 5] = final
    return res


@njit(cache=True)
def awgn_trials(gen, k, n, seed, start, stop, sigma, row_ptr, edge_var, col_ptr, col_edge, edge_row,
                beta, llr_max, iters_per_stage, max_stages, max_list, check_every):
    res = np.zeros((stop - start, 6), dtype=np.int64)
    msg = np.empty(k, dtype=np.uint8)
    packed = np.empty(gen.shape[1], dtype=np.uint64)
    c = np.empty(n, dtype=np.int8)
    y = np.empty(n, dtype=np.float64)
    out = np.empty(n, dtype=np.uint8)
    for t in range(stop - start):
        key = _transmitted(gen, k, n, seed, np.uint64(start + t), msg, packed, c)
        awgn_kernel(c, sigma, key, y)
        sat = llr_max * scale_kernel(y)
        status, stages, iters, peak, final = mppl_soft_kernel(
            y, row_ptr, edge_var, col_ptr, col_edge, edge_row, beta, sat,
            iters_per_stage, max_stages, max_list, check_every, out)
        _score(status, c, out, res, t)
        res[t, 4] = iters
        res[t, 5] = final
    return res


def channel_parameter(cfg: SimConfig, param: float) -> float:
    """Erasure probability, or the noise deviation for an SNR grid value."""
    if cfg.channel == "bec":
        return param
    return snr_db_to_sigma(param, prepare(cfg.code).rate)


def run_trials(cfg: SimConfig, param: float, start: int, stop: int) -> np.ndarray:
    """Per-trial outcome rows for trial indices ``start .. stop - 1``."""
    p = prepare(cfg.code)
    gen, k, n = p.encoder.generator, p.encoder.k, p.h.cols
    seed = np.uint64(cfg.seed)
    x = channel_parameter(cfg, param)
    d = cfg.decoder
    if cfg.channel == "bec":
        row_ptr, edge_var = p.h.csr
        paths = np.empty((2 * d.max_list, n), dtype=np.int8)
        alive = np.zeros(2 * d.max_list, dtype=np.bool_)
        return bec_trials(gen, k, n, seed, start, stop, x, row_ptr, edge_var, d.max_list, d.lambda_it, paths, alive)
    return awgn_trials(gen, k, n, seed, start, stop, x, *_graph(p.h), d.beta, d.llr_max,
                       d.iters_per_stage, d.max_stages, d.max_list, d.check_every_iteration)


def _worker(args):
    cfg, param, start, stop = args
    return run_trials(cfg, param, start, stop)


def _chunk(cfg: SimConfig) -> int:
    if cfg.chunk:
        return cfg.chunk
    return 4096 if cfg.channel == "bec" else 256


def run_point(cfg: SimConfig, param: float, pool: ProcessPoolExecutor | None = None) -> SimRecord:
    """Trials are processed in index order; the early stop lands on the exact trial that
    produced the ``max_errors``-th block error, so sharding never changes the record."""
    p = prepare(cfg.code)
    rec = SimRecord(float(param), n=p.h.cols)
    t0 = time.perf_counter()
    size = _chunk(cfg)
    done = 0
    while done < cfg.trials:
        bounds = []
        for _ in range(cfg.workers):
            if done >= cfg.trials:
                break
            stop = min(done + size, cfg.trials)
            bounds.append((done, stop))
            done = stop
        if pool is not None and len(bounds) > 1:
            parts = list(pool.map(_worker, [(cfg, param, a, b) for a, b in bounds]))
        else:
            parts = [run_trials(cfg, param, a, b) for a, b in bounds]
        res = np.concatenate(parts)
        if cfg.max_errors:
            cum = rec.block_errors + np.cumsum(res[:, 0])
            hit = np.flatnonzero(cum >= cfg.max_errors)
            if hit.size:
                res = res[: hit[0] + 1]
                done = cfg.trials
        rec.trials += len(res)
        rec.block_errors += int(res[:, 0].sum())
        rec.bit_errors += int(res[:, 1].sum())
        rec.undetected += int(res[:, 2].sum())
        rec.not_unique += int(res[:, 3].sum())
        rec.iterations += int(res[:, 4].sum())
        rec.list_total += int(res[:, 5].sum())
    rec.seconds = time.perf_counter() - t0
    return rec


def run_grid(cfg: SimConfig, progress=None) -> list[SimRecord]:
    records = []
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for g in cfg.grid:
            rec = run_point(cfg, g, pool)
            records.append(rec)
            if progress is not None:
                progress(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return records
