"""Truncated union bounds on ML block error for the erasure and Gaussian channels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from .weightdist import WeightSpectrum

_PREC = 60  # decimal digits for term accumulation


class GammaError(ValueError):
    """Raised when the shortened-ensemble correction is inapplicable (gamma >= 1)."""


@dataclass(frozen=True)
class BoundConfig:
    wt: int
    d: int = 3
    alphas: dict[int, int] = field(default_factory=dict)
    param: float | None = None

    def __post_init__(self):
        if self.wt % 2:
            raise ValueError(f"truncation weight must be even, got {self.wt}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.wt < 2 * self.d:
            raise ValueError(f"truncation weight {self.wt} below target distance {2 * self.d}")


def qfunc(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _as_mpf(value):
    if hasattr(value, "numerator"):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def _truncated_sum(spectrum: WeightSpectrum, wmin: int, wt: int, term) -> mpmath.mpf:
    with mpmath.workdps(_PREC):
        total = mpmath.mpf(0)
        for w in spectrum.weights:
            if w < max(wmin, 1) or w > wt:
                continue
            total += _as_mpf(spectrum.value(w)) * term(w)
        return total


def bec_union_bound(spectrum: WeightSpectrum, eps: float, wt: int) -> float:
    if not len(spectrum):
        raise ValueError("empty spectrum")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability {eps} outside [0, 1]")
    e = mpmath.mpf(eps)
    return float(_truncated_sum(spectrum, 1, wt, lambda w: e**w))


def _q_mp(x):
    return mpmath.erfc(x / mpmath.sqrt(2)) / 2


def awgn_union_bound(spectrum: WeightSpectrum, sigma: float, wt: int) -> float:
    if not len(spectrum):
        raise ValueError("empty spectrum")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    s = mpmath.mpf(sigma)
    return float(_truncated_sum(spectrum, 1, wt, lambda w: _q_mp(mpmath.sqrt(w) / s)))


def gamma(avg: WeightSpectrum, alphas: dict[int, float], d: int) -> float:
    """Markov mass of ensemble members keeping a codeword lighter than ``2d``."""
    total = 0.0
    for i in range(2, d):
        w = 2 * i
        if w not in avg:
            raise KeyError(f"ensemble average for weight {w} missing")
        alpha = alphas.get(w, 0)
        if math.isinf(alpha):
            continue
        total += float(avg.value(w)) / (alpha + 1)
    return total


def _check_premises(cfg: BoundConfig, avg: WeightSpectrum) -> float:
    g = gamma(avg, cfg.alphas, cfg.d)
    if g >= 1:
        raise GammaError(f"gamma = {g:.6g} >= 1: increase the shortening counts")
    for i in range(2, cfg.d):
        w = 2 * i
        alpha = cfg.alphas.get(w, 0)
        if alpha < math.floor(float(avg.value(w))):
            raise ValueError(f"alpha_{w} = {alpha} below floor of average count {float(avg.value(w)):.6g}")
    return g


def ensemble_bound_bec(cfg: BoundConfig, avg: WeightSpectrum, eps: float | None = None) -> float:
    eps = cfg.param if eps is None else eps
    g = _check_premises(cfg, avg)
    e = mpmath.mpf(eps)
    s = _truncated_sum(avg, 2 * cfg.d, cfg.wt, lambda w: e**w)
    return float(s / (1 - mpmath.mpf(g)))


def ensemble_bound_awgn(cfg: BoundConfig, avg: WeightSpectrum, sigma: float | None = None) -> float:
    sigma = cfg.param if sigma is None else sigma
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    g = _check_premises(cfg, avg)
    s_ = mpmath.mpf(sigma)
    s = _truncated_sum(avg, 2 * cfg.d, cfg.wt, lambda w: _q_mp(mpmath.sqrt(w) / s_))
    return float(s / (1 - mpmath.mpf(g)))


def snr_db_to_sigma(snr_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at the given per-information-bit SNR."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return 1.0 / math.sqrt(2.0 * rate * 10.0 ** (snr_db / 10.0))
