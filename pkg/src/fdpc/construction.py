"""Fair-density parity-check matrices: base matrix, stacked order-s codes, shortening."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from numba import njit

from . import gf2
from .rng import derive_seed, mix64, permutation


@dataclass(frozen=True)
class CodeSpec:
    t: int
    s: int = 1
    perm_seeds: tuple[int, ...] = ()
    shortened_columns: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "perm_seeds", tuple(int(x) for x in self.perm_seeds))
        object.__setattr__(self, "shortened_columns", tuple(int(x) for x in self.shortened_columns))
        if self.t < 2:
            raise ValueError(f"t must be >= 2, got {self.t}")
        if self.s < 1:
            raise ValueError(f"order s must be >= 1, got {self.s}")
        if len(self.perm_seeds) != self.s - 1:
            raise ValueError(f"order {self.s} needs {self.s - 1} permutation seeds, got {len(self.perm_seeds)}")
        if any(not 0 <= x < 2**64 for x in self.perm_seeds):
            raise ValueError("permutation seeds must be 64-bit unsigned")
        cols = self.shortened_columns
        if len(set(cols)) != len(cols) or any(not 0 <= c < self.n for c in cols):
            raise ValueError("shortened columns must be distinct indices below n")

    @property
    def n(self) -> int:
        return 4 * self.t * self.t

    @classmethod
    def from_seed(cls, t: int, s: int, seed: int) -> CodeSpec:
        """Spec whose s-1 permutation seeds are derived from one master seed."""
        return cls(t, s, tuple(derive_seed(seed, i) for i in range(1, s)))

    def dumps(self) -> str:
        lines = [f"t={self.t}", f"n={self.n}", f"s={self.s}"]
        lines += [f"perm_seed_{i}={x}" for i, x in enumerate(self.perm_seeds, start=1)]
        lines.append("shortened_columns=" + ",".join(str(c) for c in self.shortened_columns))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> CodeSpec:
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed spec line: {line!r}")
            kv[key.strip()] = value.strip()
        t, s = int(kv["t"]), int(kv["s"])
        if "n" in kv and int(kv["n"]) != 4 * t * t:
            raise ValueError(f"n={kv['n']} inconsistent with t={t}")
        seeds = tuple(int(kv[f"perm_seed_{i}"]) for i in range(1, s))
        raw = kv.get("shortened_columns", "")
        cols = tuple(int(c) for c in raw.split(",") if c.strip())
        return cls(t, s, seeds, cols)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> CodeSpec:
        return cls.loads(Path(path).read_text())


class SparseBitMatrix:
    """Parity-check matrix held as check and variable adjacency lists.

    ``kept_columns`` maps each column to its index in the unshortened code;
    for matrices not produced by :func:`build_order_s` it is the identity.
    """

    def __init__(self, rows: int, cols: int, row_adj, kept_columns=None):
        self.rows = rows
        self.cols = cols
        self.row_adj = [np.unique(np.asarray(a, dtype=np.int64)) for a in row_adj]
        if len(self.row_adj) != rows:
            raise ValueError("one adjacency list per row required")
        col_lists = [[] for _ in range(cols)]
        for r, adj in enumerate(self.row_adj):
            if adj.size and (adj[0] < 0 or adj[-1] >= cols):
                raise ValueError(f"row {r} references a column outside [0, {cols})")
            for c in adj:
                col_lists[c].append(r)
        self.col_adj = [np.asarray(x, dtype=np.int64) for x in col_lists]
        if kept_columns is None:
            kept_columns = np.arange(cols)
        self.kept_columns = np.asarray(kept_columns, dtype=np.int64)

    @classmethod
    def from_dense(cls, dense) -> SparseBitMatrix:
        dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8))
        return cls(dense.shape[0], dense.shape[1], [np.flatnonzero(row) for row in dense])

    @cached_property
    def dense(self) -> gf2.BitMatrix:
        return gf2.BitMatrix.from_dense(self.to_array())

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, adj in enumerate(self.row_adj):
            out[r, adj] = 1
        return out

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(row_ptr, edge_var)``: edges numbered row-major."""
        deg = np.array([len(a) for a in self.row_adj], dtype=np.int64)
        ptr = np.zeros(self.rows + 1, dtype=np.int64)
        np.cumsum(deg, out=ptr[1:])
        var = np.concatenate(self.row_adj) if self.rows else np.zeros(0, dtype=np.int64)
        return ptr, var.astype(np.int64)

    @cached_property
    def csc(self) -> tuple[np.ndarray, np.ndarray]:
        """``(col_ptr, col_edge)``: for each column, the ids of its edges."""
        row_ptr, edge_var = self.csr
        order = np.argsort(edge_var, kind="stable")
        deg = np.bincount(edge_var, minlength=self.cols)
        ptr = np.zeros(self.cols + 1, dtype=np.int64)
        np.cumsum(deg, out=ptr[1:])
        return ptr, order.astype(np.int64)

    @cached_property
    def column_syndromes(self) -> np.ndarray:
        """Packed columns, shape ``(cols, n_words(rows))``."""
        return gf2.pack(self.to_array().T)

    @property
    def row_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self.row_adj], dtype=np.int64)

    @property
    def col_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self.col_adj], dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, SparseBitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and all(np.array_equal(a, b) for a, b in zip(self.row_adj, other.row_adj))
        )

    __hash__ = None

    def dumps(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(str(c + 1) for c in adj) for adj in self.row_adj]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> SparseBitMatrix:
        lines = text.splitlines()
        rows, cols = (int(x) for x in lines[0].split())
        body = lines[1 : rows + 1]
        body += [""] * (rows - len(body))
        return cls(rows, cols, [[int(x) - 1 for x in line.split()] for line in body])

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> SparseBitMatrix:
        return cls.loads(Path(path).read_text())


def base_pairs(t: int) -> list[tuple[int, int]]:
    """Row pairs (i, j), i < j, j - i odd, in lexicographic order."""
    m = 4 * t
    return [(i, j) for i in range(m) for j in range(i + 1, m) if (j - i) % 2 == 1]


def build_base(t: int) -> SparseBitMatrix:
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    rows = [[] for _ in range(4 * t)]
    for c, (i, j) in enumerate(base_pairs(t)):
        rows[i].append(c)
        rows[j].append(c)
    return SparseBitMatrix(4 * t, 4 * t * t, rows)


def build_order_s(spec: CodeSpec) -> SparseBitMatrix:
    base = build_base(spec.t)
    n = spec.n
    rows = [adj.copy() for adj in base.row_adj]
    for seed in spec.perm_seeds:
        perm = permutation(n, seed)
        # block column c carries base column perm[c]
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        rows += [np.sort(inv[adj]) for adj in base.row_adj]
    if not spec.shortened_columns:
        return SparseBitMatrix(len(rows), n, rows)
    keep = np.ones(n, dtype=bool)
    keep[list(spec.shortened_columns)] = False
    new_index = np.cumsum(keep) - 1
    rows = [new_index[adj[keep[adj]]] for adj in rows]
    return SparseBitMatrix(len(rows), int(keep.sum()), rows, kept_columns=np.flatnonzero(keep))


def code_dimension(h: SparseBitMatrix) -> int:
    return h.cols - gf2.rank(h.dense)


# -- low-weight codeword search ----------------------------------------------


@njit(cache=True)
def _hash_words(words):
    acc = np.uint64(0x243F6A8885A308D3)
    for k in range(words.shape[0]):
        acc = mix64(acc ^ words[k]) + np.uint64(k)
    return acc


@njit(cache=True)
def _pair_table(colsyn):
    n, nw = colsyn.shape
    m = n * (n - 1) // 2
    hashes = np.empty(m, dtype=np.uint64)
    left = np.empty(m, dtype=np.int64)
    right = np.empty(m, dtype=np.int64)
    tmp = np.empty(nw, dtype=np.uint64)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(nw):
                tmp[k] = colsyn[i, k] ^ colsyn[j, k]
            hashes[p] = _hash_words(tmp)
            left[p] = i
            right[p] = j
            p += 1
    return hashes, left, right


@njit(cache=True)
def _lowest_bit(words):
    for k in range(words.shape[0]):
        w = words[k]
        if w:
            b = 0
            while not (w >> np.uint64(b)) & np.uint64(1):
                b += 1
            return k * 64 + b
    return -1


@njit(cache=True)
def _same_sum(colsyn, i, j, target):
    for k in range(target.shape[0]):
        if (colsyn[i, k] ^ colsyn[j, k]) != target[k]:
            return False
    return True


@njit(cache=True)
def _append(buf, count, row):
    if count == buf.shape[0]:
        bigger = np.empty((2 * buf.shape[0], buf.shape[1]), dtype=buf.dtype)
        bigger[:count] = buf
        buf = bigger
    buf[count] = row
    return buf, count + 1


@njit(cache=True)
def _close_with_pair(colsyn, hashes, left, right, chosen, depth, target, buf, count):
    a = chosen[0]
    h = _hash_words(target)
    for q in range(np.searchsorted(hashes, h), hashes.shape[0]):
        if hashes[q] != h:
            break
        e, f = left[q], right[q]
        if e <= a or f <= a:
            continue
        clash = False
        for u in range(depth):
            if chosen[u] == e or chosen[u] == f:
                clash = True
        if clash or not _same_sum(colsyn, e, f, target):
            continue
        chosen[depth] = e
        chosen[depth + 1] = f
        buf, count = _append(buf, count, np.sort(chosen))
    return buf, count


@njit(cache=True)
def _extend_to_pairs(colsyn, row_ptr, edge_var, hashes, left, right, depth):
    """Supports of weight ``depth + 2`` with smallest column ``a``.

    Columns after ``a`` are taken from the lowest row left uncovered by the
    partial sum (some support column must hit it), and the last two are
    found with one pair-sum lookup.
    """
    n, nw = colsyn.shape
    buf = np.empty((64, depth + 2), dtype=np.int64)
    count = 0
    chosen = np.empty(depth + 2, dtype=np.int64)
    partial = np.empty((depth, nw), dtype=np.uint64)
    rowsel = np.empty(depth, dtype=np.int64)
    pos = np.empty(depth, dtype=np.int64)
    for a in range(n):
        chosen[0] = a
        partial[0] = colsyn[a]
        low = _lowest_bit(partial[0])
        if low < 0:
            continue
        if depth == 1:
            buf, count = _close_with_pair(colsyn, hashes, left, right, chosen, depth, partial[0], buf, count)
            continue
        level = 1
        rowsel[1] = low
        pos[1] = row_ptr[low]
        while level >= 1:
            if pos[level] >= row_ptr[rowsel[level] + 1]:
                level -= 1
                if level >= 1:
                    pos[level] += 1
                continue
            c = edge_var[pos[level]]
            ok = c > a
            for u in range(1, level):
                if chosen[u] == c:
                    ok = False
            if not ok:
                pos[level] += 1
                continue
            chosen[level] = c
            for k in range(nw):
                partial[level, k] = partial[level - 1, k] ^ colsyn[c, k]
            low = _lowest_bit(partial[level])
            if low < 0:
                # shorter codeword, reported by a smaller search
                pos[level] += 1
                continue
            if level < depth - 1:
                level += 1
                rowsel[level] = low
                pos[level] = row_ptr[low]
                continue
            buf, count = _close_with_pair(colsyn, hashes, left, right, chosen, depth, partial[level], buf, count)
            pos[level] += 1
    return buf[:count]


def _sorted_pair_table(h: SparseBitMatrix):
    hashes, left, right = _pair_table(h.column_syndromes)
    order = np.argsort(hashes, kind="stable")
    return hashes[order], left[order], right[order]


def find_low_weight_codewords(h: SparseBitMatrix, wmax: int) -> list[tuple[int, ...]]:
    """All codeword supports of weight 1..wmax, sorted by (weight, support).

    Weight four uses a meet-in-the-middle join over column-pair sums; weights
    five and six fix columns along the lowest uncovered row and close the
    support with one pair-sum lookup. Supports that split into lighter
    codewords are added as disjoint unions.
    """
    if wmax not in (4, 6):
        raise ValueError(f"wmax must be 4 or 6, got {wmax}")
    colsyn = h.column_syndromes
    hashes, left, right = _sorted_pair_table(h)
    found: set[tuple[int, ...]] = set()

    zero_cols = [c for c in range(h.cols) if not colsyn[c].any()]
    found.update((c,) for c in zero_cols)

    # equal-hash groups of pair sums
    boundaries = np.flatnonzero(np.diff(hashes)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(hashes)]))
    sums = colsyn[left] ^ colsyn[right]
    for a, b in zip(starts, ends):
        for p in range(a, b):
            i, j = int(left[p]), int(right[p])
            if not sums[p].any():
                found.add((i, j))
            for q in range(p + 1, b):
                k, l = int(left[q]), int(right[q])
                if len({i, j, k, l}) == 4 and np.array_equal(sums[p], sums[q]):
                    found.add(tuple(sorted((i, j, k, l))))

    row_ptr, edge_var = h.csr
    for depth in ((1,) if wmax == 4 else (1, 3, 4)):
        for sup in _extend_to_pairs(colsyn, row_ptr, edge_var, hashes, left, right, depth):
            found.add(tuple(int(x) for x in sup))
    return sorted(_disjoint_unions(found, wmax), key=lambda s: (len(s), s))


def _disjoint_unions(found: set[tuple[int, ...]], wmax: int) -> set[tuple[int, ...]]:
    # the searches above see every minimal support; any other codeword is a
    # disjoint union of minimal ones
    parts = sorted(found)
    out = set(found)
    frontier = set(found)
    while frontier:
        grown = set()
        for a in frontier:
            for b in parts:
                if len(a) + len(b) <= wmax and not set(a) & set(b):
                    u = tuple(sorted(a + b))
                    if u not in out:
                        grown.add(u)
        out |= grown
        frontier = grown
    return out


def shorten(spec: CodeSpec, alphas: dict[int, int]) -> CodeSpec:
    """Remove columns to kill low-weight codewords; ``alphas`` maps weight to removals."""
    if not alphas:
        return spec
    for w in alphas:
        if w not in (4, 6):
            raise ValueError(f"shortening targets weights 4 and 6 only, got {w}")
    h = build_order_s(spec)
    total = sum(alphas.values())
    if total >= code_dimension(h):
        raise ValueError(f"{total} removals would exhaust a dimension-{code_dimension(h)} code")
    removed = list(spec.shortened_columns)
    for w in sorted(alphas):
        supports = [
            tuple(int(h.kept_columns[c]) for c in sup)
            for sup in find_low_weight_codewords(h, w)
            if len(sup) == w
        ]
        for _ in range(alphas[w]):
            if supports:
                col = supports[0][0]
            else:
                col = next(c for c in range(spec.n) if c not in removed)
            removed.append(col)
            supports = [sup for sup in supports if col not in sup]
        h = build_order_s(CodeSpec(spec.t, spec.s, spec.perm_seeds, tuple(removed)))
    return CodeSpec(spec.t, spec.s, spec.perm_seeds, tuple(removed))
