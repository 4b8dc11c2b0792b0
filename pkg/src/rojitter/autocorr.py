"""Bit-pair probabilities and delay-k autocorrelation.

The analytic side integrates the erf-difference density of the bit after a
known ``1`` in closed form; the empirical side is the usual +/-1 product
average over a measured stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfcx

from .params import (DEFAULT_TAU, SourceParams, as_bits, canonicalize,
                     tail_indices)

# beyond this accumulated variance C_k equals its decorrelated limit in doubles
MAX_LAG_VARIANCE = 100.0

_SQRT_PI = math.sqrt(math.pi)


class ProbabilityError(ArithmeticError):
    """Computed probabilities drifted outside the round-off budget."""


@dataclass(frozen=True)
class PairProbs:
    p00: float
    p01: float
    p10: float
    p11: float

    def as_array(self) -> np.ndarray:
        """Probabilities in pattern order 00, 01, 10, 11."""
        return np.array([self.p00, self.p01, self.p10, self.p11])


@dataclass(frozen=True)
class AutocorrVector:
    """Autocorrelation by lag; ``values[0]`` holds the bias ``2D - 1``.

    ``n_bits`` is the length of the stream an empirical vector was measured
    on, or ``None`` for an analytic vector.
    """

    values: np.ndarray
    n_bits: int | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("autocorrelation vector must be 1-D and nonempty")
        if np.abs(v).max() > 1.0 + 1e-12:
            raise ValueError("autocorrelation values must lie in [-1, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def k_max(self) -> int:
        return self.values.size - 1

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return self.values.size


def s1(x: float, params: SourceParams, tau: float = DEFAULT_TAU) -> float:
    """Antiderivative of the density of the bit following a ``1``.

    Literal truncated sum over the tailcut index range. The sum itself is
    only defined up to the symmetric truncation; use differences such as
    ``s1(D) - s1(0)``.
    """
    params.require_nondegenerate()
    r = math.sqrt(2.0 * params.sigma2)
    i = tail_indices(params.sigma, tau)
    a = (x + i - params.F) / r
    b = (x + i - params.F - params.D) / r
    terms = (a * erf(a) - b * erf(b)
             + (np.exp(-a * a) - np.exp(-b * b)) / _SQRT_PI)
    return float(0.5 * r * terms.sum())


def _excess(a):
    # a*erf(a) + exp(-a^2)/sqrt(pi) - |a|, without cancellation at large |a|
    a = np.abs(a)
    return np.exp(-a * a) * (1.0 / _SQRT_PI - a * erfcx(a))


def p11_array(F, D, sigma2, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Vectorized ``Pr(z_i = 1, z_{i+1} = 1)``.

    Evaluates ``s1(D) - s1(0)`` as a second difference of
    ``g(a) = a erf(a) + exp(-a^2)/sqrt(pi)``. Splitting ``g = |a| + excess``
    makes the ``|a|`` part exact (it only survives for shifts with
    ``|i - F| < D``) and leaves a Gaussian-tailed remainder to truncate.
    """
    F, D, sigma2 = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64)
                                         for v in (F, D, sigma2)))
    sigma_hi = math.sqrt(float(sigma2.max()))
    i = np.arange(math.floor(-tau * sigma_hi) - 1, math.ceil(tau * sigma_hi) + 2)
    u = i - F[..., None]
    Dx = D[..., None]
    r = np.sqrt(2.0 * sigma2)[..., None]
    linear = np.maximum(Dx - np.abs(u), 0.0).sum(axis=-1)
    tail = (_excess((u + Dx) / r) - 2.0 * _excess(u / r)
            + _excess((u - Dx) / r))
    return linear + 0.5 * (r[..., 0] * tail.sum(axis=-1))


def _clamp_p11(p11, D):
    lo = np.maximum(0.0, 2.0 * D - 1.0)
    hi = D
    drift = np.maximum(lo - p11, p11 - hi)
    if np.any(drift > 1e-6):
        raise ProbabilityError(f"pair probability out of range by {np.max(drift):g}")
    return np.clip(p11, lo, hi)


def pair_probs(params: SourceParams, tau: float = DEFAULT_TAU) -> PairProbs:
    """Adjacent bit-pair probabilities.

    Only ``p11`` is integrated; the others follow from the marginal
    ``Pr(z=1) = D`` and edge balance, ``p01 = p10 = D - p11`` and
    ``p00 = 1 - 2D + p11``.
    """
    params.require_nondegenerate()
    D = params.D
    p11 = float(_clamp_p11(p11_array(params.F, D, params.sigma2, tau), D))
    p01 = D - p11
    return PairProbs(1.0 - 2.0 * D + p11, p01, p01, p11)


def decorrelated_limit(D: float) -> float:
    """``C_k`` of independent bits with ``Pr(1) = D``."""
    return (2.0 * D - 1.0) ** 2


def c1_array(F, D, sigma2, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Vectorized lag-1 autocorrelation ``4 (p11 - D) + 1``."""
    D = np.asarray(D, dtype=np.float64)
    p11 = _clamp_p11(p11_array(F, D, sigma2, tau), D)
    return 4.0 * (p11 - D) + 1.0


def c_k(params: SourceParams, k: int, tau: float = DEFAULT_TAU) -> float:
    """Lag-``k`` autocorrelation.

    ``k`` steps of the walk add up to one step with mean ``k F`` and
    variance ``k sigma2``, so this is the lag-1 value of the substituted
    source.
    """
    if k < 1:
        raise ValueError(f"lag k must be >= 1, got {k}")
    params.require_nondegenerate()
    if k * params.sigma2 > MAX_LAG_VARIANCE:
        return decorrelated_limit(params.D)
    sub = canonicalize((k * params.F) % 1.0, params.D, k * params.sigma2)
    return float(c1_array(sub.F, sub.D, sub.sigma2, tau))


def autocorr_vector(params: SourceParams, k_max: int,
                    tau: float = DEFAULT_TAU) -> AutocorrVector:
    """Analytic vector: bias ``2D - 1`` at lag 0, then ``c_k`` for k = 1..k_max."""
    values = [2.0 * params.D - 1.0]
    values += [c_k(params, k, tau) for k in range(1, k_max + 1)]
    return AutocorrVector(np.array(values))


def estimate_autocorr(bits, k_max: int) -> AutocorrVector:
    """Empirical autocorrelation of a measured bit stream.

    Lag 0 is the mean of ``2z - 1``; lag ``k`` averages
    ``(2z_i - 1)(2z_{i+k} - 1)`` over the ``n - k`` available pairs.
    """
    z = as_bits(bits)
    n = z.size
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if n <= k_max:
        raise ValueError(f"stream of {n} bits is too short for lag {k_max}")
    y = 2.0 * z - 1.0
    values = np.empty(k_max + 1)
    values[0] = y.sum() / n
    for k in range(1, k_max + 1):
        values[k] = np.dot(y[:-k], y[k:]) / (n - k)
    return AutocorrVector(values, n_bits=n)
