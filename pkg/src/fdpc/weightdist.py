"""Weight distributions of the base code and the order-2 ensemble.

Counts are exact integers or fractions throughout; conversion to float
happens only when a bound is evaluated.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from numba import njit

from . import gf2
from .codec import is_codeword
from .construction import SparseBitMatrix, code_dimension

EXACT = "exact"
UPPER_BOUND = "upper_bound"
ENSEMBLE_AVERAGE = "ensemble_average"
KINDS = (EXACT, UPPER_BOUND, ENSEMBLE_AVERAGE)

MAX_EXHAUSTIVE_DIMENSION = 26


@dataclass
class WeightSpectrum:
    """Map weight -> (count, kind). Counts are ``int`` or ``Fraction``."""

    entries: dict[int, tuple[int | Fraction, str]] = field(default_factory=dict)

    def set(self, w: int, value, kind: str) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        if w in self.entries and self.entries[w][1] != kind:
            raise ValueError(f"weight {w} already stored as {self.entries[w][1]}")
        self.entries[w] = (value, kind)

    def value(self, w: int):
        return self.entries[w][0]

    def kind(self, w: int) -> str:
        return self.entries[w][1]

    def get(self, w: int, default=0):
        return self.entries[w][0] if w in self.entries else default

    @property
    def weights(self) -> list[int]:
        return sorted(self.entries)

    def nonzero_weights(self) -> list[int]:
        return [w for w in self.weights if w > 0 and self.entries[w][0] != 0]

    def __len__(self):
        return len(self.entries)

    def __contains__(self, w):
        return w in self.entries

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["weight", "value", "kind"])
        for w in self.weights:
            value, kind = self.entries[w]
            writer.writerow([w, str(value), kind])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> WeightSpectrum:
        spec = cls()
        for row in csv.DictReader(io.StringIO(text)):
            spec.set(int(row["weight"]), Fraction(row["value"]), row["kind"])
        return spec


def irreducible_count(t: int, m: int) -> int:
    """Number of weight-``m`` codewords of the base code whose Tanner subgraph is one loop."""
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    if m % 2 or m < 4 or m > 4 * t:
        return 0
    num = 1
    for i in range(m // 2):
        num *= (2 * t - i) ** 2
    count, rem = divmod(num, m)
    assert rem == 0
    return count


def _overlapping_square_pairs(t: int) -> int:
    """Unordered pairs of distinct weight-4 loops sharing at least one column.

    A weight-4 loop is a choice of two odd and two even check rows; two loops
    share a column iff both their odd pairs and their even pairs intersect.
    """
    half = 2 * t
    pairs = comb(half, 2)
    intersecting = pairs * pairs - pairs * comb(half - 2, 2)
    return (intersecting * intersecting - pairs * pairs) // 2


@lru_cache(maxsize=None)
def _composition_table(t: int, wmax: int, disjoint_squares: bool) -> tuple[int, ...]:
    # ways[w] accumulates products of C(A_m, a_m) over m processed so far
    ways = [0] * (wmax + 1)
    ways[0] = 1
    for m in range(4, min(4 * t, wmax) + 1, 2):
        am = irreducible_count(t, m)
        new = [0] * (wmax + 1)
        for w in range(wmax + 1):
            if not ways[w]:
                continue
            a = 0
            while w + a * m <= wmax:
                factor = comb(am, a)
                if m == 4 and a == 2 and disjoint_squares:
                    factor -= _overlapping_square_pairs(t)
                new[w + a * m] += ways[w] * factor
                a += 1
        ways = new
    return tuple(ways)


def weight_upper_bound(t: int, w: int) -> int:
    """Sum over loop compositions of products of binomials; bounds the base-code ``A_w``."""
    if w < 0 or w % 2:
        return 0
    return _composition_table(t, w, False)[w]


def weight_upper_bound_pairwise(t: int, w: int) -> int:
    """:func:`weight_upper_bound` with the two-square term restricted to column-disjoint squares.

    Only the ``a_4 = 2`` term is corrected; it is exact for every ``t``. Other
    terms keep their uncorrected counts, so the result stays an upper bound.
    """
    if w < 0 or w % 2:
        return 0
    return _composition_table(t, w, True)[w]


def ensemble_avg_weight(n: int, w: int, aw) -> float:
    return float(ensemble_avg_weight_exact(n, w, aw))


def ensemble_avg_weight_exact(n: int, w: int, aw) -> Fraction:
    if w % 2 or w < 4:
        return Fraction(0)
    return Fraction(aw) ** 2 / comb(n, w)


def closed_form_avg_w4(n: int) -> float:
    rn = n**0.5
    return 3 * n * (rn - 1) ** 4 / (2 * (n - 1) * (n - 2) * (n - 3))


def closed_form_avg_w6(n: int) -> float:
    rn = n**0.5
    return 20 * n * (rn - 1) ** 4 * (rn - 2) ** 4 / ((n - 1) * (n - 2) * (n - 3) * (n - 4) * (n - 5))


def ensemble_spectrum(t: int, wmax: int, pairwise: bool = True) -> WeightSpectrum:
    """Average order-2 spectrum for weights 4..wmax.

    Weights 4 and 6 use the exact base counts; larger weights square an
    upper bound on the base count (capped at ``C(n, w)``) and are tagged as
    upper bounds.
    """
    n = 4 * t * t
    out = WeightSpectrum()
    bound = weight_upper_bound_pairwise if pairwise else weight_upper_bound
    for w in range(4, wmax + 1, 2):
        if w <= 6:
            out.set(w, ensemble_avg_weight_exact(n, w, irreducible_count(t, w)), ENSEMBLE_AVERAGE)
        else:
            aw = min(bound(t, w), comb(n, w))
            out.set(w, ensemble_avg_weight_exact(n, w, aw), UPPER_BOUND)
    return out


def base_bound_spectrum(t: int, wmax: int, pairwise: bool = False) -> WeightSpectrum:
    """Upper bounds on the base-code spectrum (weights 4 and 6 are exact)."""
    out = WeightSpectrum()
    bound = weight_upper_bound_pairwise if pairwise else weight_upper_bound
    for w in range(4, wmax + 1, 2):
        if w <= 6:
            out.set(w, irreducible_count(t, w), EXACT)
        else:
            out.set(w, bound(t, w), UPPER_BOUND)
    return out


# -- exhaustive oracles -------------------------------------------------------


@njit(cache=True)
def _trailing_zeros(x):
    b = 0
    while not (x >> b) & 1:
        b += 1
    return b


@njit(cache=True)
def _gray_spectrum(basis, n):
    k, nw = basis.shape
    counts = np.zeros(n + 1, dtype=np.int64)
    cw = np.zeros(nw, dtype=np.uint64)
    counts[0] = 1
    for g in range(1, 1 << k):
        idx = _trailing_zeros(g)
        wt = 0
        for w in range(nw):
            cw[w] ^= basis[idx, w]
            wt += gf2.popcount64(cw[w])
        counts[wt] += 1
    return counts


@njit(cache=True)
def _single_loop(cw, rowmask, col_rows):
    """True iff the support induces one loop (each touched row hit exactly twice, connected)."""
    nrows, nw = rowmask.shape
    start = -1
    weight = 0
    for w in range(nw):
        weight += gf2.popcount64(cw[w])
    if weight == 0:
        return False
    for r in range(nrows):
        c = 0
        for w in range(nw):
            c += gf2.popcount64(cw[w] & rowmask[r, w])
        if c != 0 and c != 2:
            return False
    for w in range(nw):
        if cw[w]:
            start = w * 64 + _trailing_zeros(cw[w])
            break
    # walk the 2-regular induced graph from `start`
    v = start
    row = col_rows[v, 0]
    steps = 0
    while True:
        nxt = -1
        for w in range(nw):
            m = cw[w] & rowmask[row, w]
            while m:
                b = _trailing_zeros(m)
                u = w * 64 + b
                if u != v:
                    nxt = u
                m &= m - np.uint64(1)
        v = nxt
        steps += 1
        row = col_rows[v, 1] if col_rows[v, 0] == row else col_rows[v, 0]
        if v == start:
            break
    return steps == weight


@njit(cache=True)
def _gray_loops(basis, n, rowmask, col_rows):
    k, nw = basis.shape
    counts = np.zeros(n + 1, dtype=np.int64)
    loops = np.zeros(n + 1, dtype=np.int64)
    cw = np.zeros(nw, dtype=np.uint64)
    counts[0] = 1
    for g in range(1, 1 << k):
        idx = _trailing_zeros(g)
        wt = 0
        for w in range(nw):
            cw[w] ^= basis[idx, w]
            wt += gf2.popcount64(cw[w])
        counts[wt] += 1
        if _single_loop(cw, rowmask, col_rows):
            loops[wt] += 1
    return counts, loops


def _packed_basis(h: SparseBitMatrix) -> np.ndarray:
    k = code_dimension(h)
    if k > MAX_EXHAUSTIVE_DIMENSION:
        raise ValueError(f"dimension {k} exceeds exhaustive limit {MAX_EXHAUSTIVE_DIMENSION}")
    basis = gf2.nullspace_basis(h.dense)
    if not basis:
        return np.zeros((0, gf2.n_words(h.cols)), dtype=np.uint64)
    return np.ascontiguousarray(gf2.pack(np.array(basis, dtype=np.uint8)))


def enumerate_exhaustive(h: SparseBitMatrix) -> WeightSpectrum:
    """Exact spectrum by Gray-code stepping through all ``2^k`` codewords."""
    counts = _gray_spectrum(_packed_basis(h), h.cols)
    out = WeightSpectrum()
    for w in np.flatnonzero(counts):
        out.set(int(w), int(counts[w]), EXACT)
    return out


def count_single_loops(h_b: SparseBitMatrix) -> tuple[WeightSpectrum, dict[int, int]]:
    """Exact spectrum plus, per weight, how many codewords are a single loop.

    Requires column weight two (an order-1 matrix).
    """
    if np.any(h_b.col_weights != 2):
        raise ValueError("single-loop classification needs column weight 2")
    basis = _packed_basis(h_b)
    rowmask = gf2.pack(h_b.to_array())
    col_rows = np.array([adj for adj in h_b.col_adj], dtype=np.int64)
    counts, loops = _gray_loops(basis, h_b.cols, rowmask, col_rows)
    spectrum = WeightSpectrum()
    for w in np.flatnonzero(counts):
        spectrum.set(int(w), int(counts[w]), EXACT)
    return spectrum, {int(w): int(loops[w]) for w in np.flatnonzero(loops)}


def is_single_loop(h_b: SparseBitMatrix, x) -> bool:
    x = np.asarray(x, dtype=np.uint8)
    support = np.flatnonzero(x)
    if support.size == 0:
        return False
    rowmask = gf2.pack(h_b.to_array())
    col_rows = np.array([adj for adj in h_b.col_adj], dtype=np.int64)
    return bool(_single_loop(gf2.pack(x), rowmask, col_rows))


def decompose_into_loops(h_b: SparseBitMatrix, c) -> list[np.ndarray]:
    """Split a base-code codeword into column-disjoint single-loop codewords.

    Walks from the lowest remaining column, always taking the lowest-indexed
    untried neighbour, until a row repeats; the closed loop is peeled off and
    the walk restarts on what is left.
    """
    c = np.asarray(c, dtype=np.uint8)
    if not is_codeword(h_b, c):
        raise ValueError("input is not a codeword")
    remaining = set(int(i) for i in np.flatnonzero(c))
    pieces = []
    while remaining:
        v0 = min(remaining)
        trail = [v0]
        rows_seen = {}  # row -> position in trail of the column that left through it
        came_from = -1
        while True:
            v = trail[-1]
            row = next(int(r) for r in h_b.col_adj[v] if r != came_from)
            if row in rows_seen:
                loop = trail[rows_seen[row] + 1 :]
                break
            members = [int(u) for u in h_b.row_adj[row] if u in remaining and u != v]
            if v0 in members and len(trail) > 1:
                loop = trail
                break
            u = min(x for x in members if x not in trail)
            rows_seen[row] = len(trail) - 1
            trail.append(u)
            came_from = row
        piece = np.zeros(h_b.cols, dtype=np.uint8)
        piece[loop] = 1
        pieces.append(piece)
        remaining.difference_update(loop)
    return pieces
