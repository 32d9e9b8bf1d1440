"""Beta prior fitted to normalised instance features by maximum likelihood.

The fit maximises the Beta log-likelihood over a clamped shape box via
Newton-Raphson on the two digamma stationarity conditions

    psi(a) - psi(a+b) = mean(ln x),    psi(b) - psi(a+b) = mean(ln(1-x)),

starting from the method-of-moments estimate.  Any failure mode (fewer
than two samples, near-constant data, non-finite intermediates, or
non-convergence) resolves to the uniform fallback Beta(1, 1).

Digamma and trigamma use the standard recurrence-plus-asymptotic-series
construction with an accuracy budget of 1e-12 relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DELTA = 1e-6  # support clamp for samples, matching the feature floor
SHAPE_MIN = 1e-2
SHAPE_MAX = 1e3
_NEWTON_TOL = 1e-8
_NEWTON_MAX_ITER = 200
_MIN_VARIANCE = 1e-12


class DomainError(ValueError):
    """Likelihood evaluated outside the open support (0, 1)."""


@dataclass(frozen=True)
class BetaParams:
    """Fitted shape parameters; fallback_used marks the uniform fallback."""

    alpha: float
    beta: float
    fallback_used: bool = False


_FALLBACK = BetaParams(1.0, 1.0, fallback_used=True)


def digamma(x: float) -> float:
    """psi(x) for x > 0 via upward recurrence and the asymptotic series."""
    if x <= 0.0:
        raise ValueError("digamma defined here for positive arguments only")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (
        1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760)))))
    return acc + math.log(x) - 0.5 * inv - inv2 * series


def trigamma(x: float) -> float:
    """psi'(x) for x > 0, same construction as digamma."""
    if x <= 0.0:
        raise ValueError("trigamma defined here for positive arguments only")
    acc = 0.0
    while x < 10.0:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 1.0 + inv * (0.5 + inv * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (
        1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66))))))
    return acc + inv * series


def log_beta(alpha: float, beta: float) -> float:
    """ln B(a, b) through the log-gamma function."""
    return math.lgamma(alpha) + math.lgamma(beta) - math.lgamma(alpha + beta)


def log_likelihood(data, params: BetaParams) -> float:
    """Beta log-likelihood of data under params; data must lie in (0, 1)."""
    x = np.asarray(data, dtype=float)
    if x.size == 0:
        raise DomainError("empty data")
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise DomainError("data must lie strictly inside (0, 1)")
    a, b = params.alpha, params.beta
    return float(np.sum((a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x))
                 - x.size * log_beta(a, b))


def _clamp(value: float) -> float:
    return min(max(value, SHAPE_MIN), SHAPE_MAX)


def fit_beta_mle(data) -> BetaParams:
    """Maximum-likelihood Beta fit; failure modes fall back to Beta(1, 1)."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2 or not np.all(np.isfinite(x)):
        return _FALLBACK
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        return _FALLBACK
    variance = float(np.var(x))
    if variance < _MIN_VARIANCE:
        return _FALLBACK

    mean_log = float(np.mean(np.log(x)))
    mean_log1m = float(np.mean(np.log1p(-x)))
    if not (math.isfinite(mean_log) and math.isfinite(mean_log1m)):
        return _FALLBACK

    # Method-of-moments start; v < m(1-m) holds strictly for interior data.
    mean = float(np.mean(x))
    common = mean * (1.0 - mean) / variance - 1.0
    if not math.isfinite(common) or common <= 0.0:
        alpha, beta = 1.0, 1.0
    else:
        alpha, beta = _clamp(mean * common), _clamp((1.0 - mean) * common)

    for _ in range(_NEWTON_MAX_ITER):
        psi_ab = digamma(alpha + beta)
        g1 = digamma(alpha) - psi_ab - mean_log
        g2 = digamma(beta) - psi_ab - mean_log1m
        tri_ab = trigamma(alpha + beta)
        j11 = trigamma(alpha) - tri_ab
        j22 = trigamma(beta) - tri_ab
        det = j11 * j22 - tri_ab * tri_ab
        if not math.isfinite(det) or det == 0.0:
            return _FALLBACK
        step_a = (j22 * g1 + tri_ab * g2) / det
        step_b = (tri_ab * g1 + j11 * g2) / det
        new_alpha = _clamp(alpha - step_a)
        new_beta = _clamp(beta - step_b)
        if not (math.isfinite(new_alpha) and math.isfinite(new_beta)):
            return _FALLBACK
        moved = max(abs(new_alpha - alpha), abs(new_beta - beta))
        alpha, beta = new_alpha, new_beta
        if moved < _NEWTON_TOL:
            return BetaParams(alpha, beta, fallback_used=False)
    return _FALLBACK


def sample_beta(params: BetaParams, count: int, rng: np.random.Generator) -> np.ndarray:
    """count draws from Beta(alpha, beta), clamped into [DELTA, 1 - DELTA]."""
    if count < 0:
        raise ValueError("count must be non-negative")
    draws = rng.beta(params.alpha, params.beta, size=count)
    return np.clip(draws, DELTA, 1.0 - DELTA)
