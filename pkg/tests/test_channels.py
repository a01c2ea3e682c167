from __future__ import annotations

import numpy as np
import pytest

from fdpc.bounds import qfunc
from fdpc.channels import ERASED, ChannelRng, ErasureWord, awgn_transmit, bec_transmit, random_message


def test_bec_extremes():
    c = np.random.default_rng(0).integers(0, 2, 500).astype(np.uint8)
    y = bec_transmit(c, 0.0, ChannelRng(1, 0))
    assert np.array_equal(y.symbols, c) and len(y.erased) == 0
    assert np.all(bec_transmit(c, 1.0, ChannelRng(1, 0)).symbols == ERASED)
    with pytest.raises(ValueError):
        bec_transmit(c, -0.1, ChannelRng(1, 0))


def test_bec_erasure_rate():
    n = 10**6
    y = bec_transmit(np.zeros(n, dtype=np.uint8), 0.15, ChannelRng(7, 3))
    frac = len(y.erased) / n
    assert abs(frac - 0.15) < 4 * np.sqrt(0.15 * 0.85 / n)
    assert not np.any(y.symbols == 1)


def test_awgn_noiseless_and_moments():
    c = np.array([0, 1, 1, 0], dtype=np.uint8)
    assert list(awgn_transmit(c, 0.0, ChannelRng(1))) == [1.0, -1.0, -1.0, 1.0]
    n = 10**6
    y = awgn_transmit(np.zeros(n, dtype=np.uint8), 1.0, ChannelRng(2, 5))
    assert abs(y.mean() - 1.0) < 4 / np.sqrt(n)
    assert abs(y.var() - 1.0) < 4 * np.sqrt(2 / n)


def test_awgn_flip_probability():
    n = 10**6
    sigma = 0.8
    y = awgn_transmit(np.zeros(n, dtype=np.uint8), sigma, ChannelRng(4))
    p = qfunc(1 / sigma)
    assert abs(np.mean(y < 0) - p) < 4 * np.sqrt(p * (1 - p) / n)


def test_trials_are_reproducible_and_distinct():
    c = np.zeros(64, dtype=np.uint8)
    a = awgn_transmit(c, 1.0, ChannelRng(9, 4))
    assert np.array_equal(a, awgn_transmit(c, 1.0, ChannelRng(9, 4)))
    assert not np.array_equal(a, awgn_transmit(c, 1.0, ChannelRng(9, 5)))
    m = random_message(200, ChannelRng(9, 4))
    assert np.array_equal(m, random_message(200, ChannelRng(9, 4)))
    assert set(np.unique(m)) <= {0, 1}
    assert random_message(0, ChannelRng(1)).shape == (0,)


def test_erasure_word():
    w = ErasureWord.from_codeword([0, 1, 1, 0], erased=[1, 3])
    assert list(w.symbols) == [0, ERASED, 1, ERASED]
    assert list(w.erased) == [1, 3] and len(w) == 4
    with pytest.raises(ValueError):
        ErasureWord(np.array([0, 3]))
