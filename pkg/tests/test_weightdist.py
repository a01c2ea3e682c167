from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdpc import gf2
from fdpc.codec import build_encoder, encode
from fdpc.construction import SparseBitMatrix, build_base, find_low_weight_codewords
from fdpc.weightdist import (
    ENSEMBLE_AVERAGE,
    EXACT,
    UPPER_BOUND,
    WeightSpectrum,
    closed_form_avg_w4,
    closed_form_avg_w6,
    count_single_loops,
    decompose_into_loops,
    enumerate_exhaustive,
    ensemble_avg_weight,
    ensemble_avg_weight_exact,
    ensemble_spectrum,
    irreducible_count,
    is_single_loop,
    weight_upper_bound,
    weight_upper_bound_pairwise,
)

T2_SPECTRUM = {0: 1, 4: 36, 6: 96, 8: 246, 10: 96, 12: 36, 16: 1}


def brute_spectrum(h: SparseBitMatrix) -> dict[int, int]:
    basis = np.array(gf2.nullspace_basis(h.dense), dtype=np.int64).reshape(-1, h.cols)
    k = len(basis)
    msgs = (np.arange(2**k)[:, None] >> np.arange(k)) & 1
    w = ((msgs @ basis) % 2).sum(axis=1)
    vals, counts = np.unique(w, return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def brute_loops(h_b: SparseBitMatrix) -> dict[int, int]:
    """Count codewords whose support induces one connected 2-regular check graph."""
    basis = np.array(gf2.nullspace_basis(h_b.dense), dtype=np.int64)
    k = len(basis)
    out: dict[int, int] = {}
    for m in range(1, 2**k):
        bits = np.array([(m >> i) & 1 for i in range(k)])
        c = (bits @ basis) % 2
        sup = np.flatnonzero(c)
        edges = [tuple(h_b.col_adj[v]) for v in sup]
        adj: dict[int, list[int]] = {}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        if any(len(v) != 2 for v in adj.values()):
            continue
        start = next(iter(adj))
        seen, stack = {start}, [start]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) == len(adj):
            out[len(sup)] = out.get(len(sup), 0) + 1
    return out


def test_irreducible_examples():
    assert irreducible_count(2, 4) == 36
    assert irreducible_count(2, 6) == 96
    assert irreducible_count(2, 8) == 72
    assert irreducible_count(2, 10) == 0
    assert irreducible_count(2, 5) == 0


def test_irreducible_matches_loop_oracle():
    t = 2
    assert brute_loops(build_base(t)) == {m: irreducible_count(t, m) for m in range(4, 4 * t + 1, 2) if irreducible_count(t, m)}


def test_exhaustive_t2(hb2):
    spec = enumerate_exhaustive(hb2)
    assert {w: spec.value(w) for w in spec.weights} == T2_SPECTRUM
    assert sum(T2_SPECTRUM.values()) == 512
    assert brute_spectrum(hb2) == T2_SPECTRUM
    spectrum, loops = count_single_loops(hb2)
    assert loops == {4: 36, 6: 96, 8: 72}


def test_exhaustive_zero_dimension():
    h = SparseBitMatrix.from_dense(np.eye(5, dtype=np.uint8))
    spec = enumerate_exhaustive(h)
    assert spec.weights == [0] and spec.value(0) == 1


def test_exhaustive_rejects_large_dimension():
    with pytest.raises(ValueError):
        enumerate_exhaustive(build_base(4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(5, 14), st.integers(3, 8))
def test_exhaustive_matches_brute_force(seed, n, m):
    d = np.random.default_rng(seed).integers(0, 2, size=(m, n), dtype=np.uint8)
    h = SparseBitMatrix.from_dense(d)
    spec = enumerate_exhaustive(h)
    assert {w: spec.value(w) for w in spec.weights} == brute_spectrum(h)


def test_upper_bound_examples():
    assert weight_upper_bound(2, 4) == 36
    assert weight_upper_bound(2, 8) == comb(36, 2) + 72 == 702
    for w, a in T2_SPECTRUM.items():
        if w:
            assert weight_upper_bound(2, w) >= a
            assert weight_upper_bound_pairwise(2, w) >= a
    assert weight_upper_bound_pairwise(2, 8) == 270


def test_pairwise_two_square_term_is_exact_count():
    # brute-force count of column-disjoint pairs of weight-4 loops for t=2,3
    for t in (2, 3):
        h = build_base(t)
        loops = []
        rows_odd = range(1, 4 * t, 2)
        rows_even = range(0, 4 * t, 2)
        pair_col = {tuple(sorted(adj)): c for c, adj in enumerate(h.col_adj)}
        for a in rows_even:
            for b in rows_even:
                if b <= a:
                    continue
                for x in rows_odd:
                    for y in rows_odd:
                        if y <= x:
                            continue
                        cols = {pair_col[tuple(sorted(p))] for p in ((a, x), (a, y), (b, x), (b, y))}
                        loops.append(cols)
        disjoint = sum(1 for i in range(len(loops)) for j in range(i + 1, len(loops)) if not loops[i] & loops[j])
        assert len(loops) == irreducible_count(t, 4)
        assert weight_upper_bound_pairwise(t, 8) - irreducible_count(t, 8) == disjoint


def test_ensemble_average_values():
    assert ensemble_avg_weight(64, 4, irreducible_count(4, 4)) == pytest.approx(0.96739, abs=5e-6)
    v = ensemble_avg_weight(1024, 4, irreducible_count(16, 4))
    assert v == pytest.approx(1.32888, abs=1e-5) and v < 1.5
    assert ensemble_avg_weight(1024, 6, irreducible_count(16, 6)) < 20
    assert ensemble_avg_weight_exact(16, 4, 36) == Fraction(36 * 36, comb(16, 4))
    assert ensemble_avg_weight(16, 5, 3) == 0


@pytest.mark.parametrize("n", [64, 256, 1024, 16384])
def test_closed_forms(n):
    t = int(round(n**0.5)) // 2
    assert ensemble_avg_weight(n, 4, irreducible_count(t, 4)) == pytest.approx(closed_form_avg_w4(n), rel=1e-12)
    assert ensemble_avg_weight(n, 6, irreducible_count(t, 6)) == pytest.approx(closed_form_avg_w6(n), rel=1e-12)


def test_ensemble_spectrum_kinds_and_cap():
    s = ensemble_spectrum(2, 16)
    assert s.kind(4) == ENSEMBLE_AVERAGE and s.kind(8) == UPPER_BOUND
    for w in s.weights:
        assert s.value(w) <= comb(16, w)


def test_spectrum_csv_roundtrip_and_kind_guard():
    s = WeightSpectrum()
    s.set(4, Fraction(7, 3), ENSEMBLE_AVERAGE)
    s.set(6, 20, UPPER_BOUND)
    assert WeightSpectrum.from_csv(s.to_csv()) == s
    with pytest.raises(ValueError):
        s.set(4, 1, EXACT)
    with pytest.raises(ValueError):
        s.set(8, 1, "guess")


def _random_codeword(h, seed):
    e = build_encoder(h)
    return encode(e, np.random.default_rng(seed).integers(0, 2, e.k).astype(np.uint8))


def test_decompose_examples(hb2, example1, example2_word):
    (piece,) = decompose_into_loops(example1, example2_word)
    assert np.array_equal(piece, example2_word)
    assert decompose_into_loops(hb2, np.zeros(16, dtype=np.uint8)) == []
    # two column-disjoint weight-4 loops
    h = build_base(3)
    squares = find_low_weight_codewords(h, 4)
    a = squares[0]
    b = next(x for x in squares if not set(x) & set(a))
    c = np.zeros(h.cols, dtype=np.uint8)
    c[list(a + b)] = 1
    parts = decompose_into_loops(h, c)
    assert sorted(tuple(np.flatnonzero(p)) for p in parts) == sorted([a, b])
    with pytest.raises(ValueError):
        decompose_into_loops(hb2, np.eye(16, dtype=np.uint8)[0])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32))
def test_decomposition_properties(t, seed):
    h = build_base(t)
    c = _random_codeword(h, seed)
    parts = decompose_into_loops(h, c)
    total = np.zeros(h.cols, dtype=np.uint8)
    for p in parts:
        assert is_single_loop(h, p)
        assert not (total & p).any()
        total |= p
    assert np.array_equal(total, c)
