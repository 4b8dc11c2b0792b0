"""Shannon, min- and max-entropy of bit patterns, plus jitter-only lower bounds."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .autocorr import pair_probs
from .bitpattern import all_patterns, maxprob_pattern_depthfirst
from .params import (DEFAULT_M, DEFAULT_TAU, SIGMA2_MIN, DegenerateSourceError,
                     SourceParams)

LN2 = math.log(2.0)
SUPPORT_THRESHOLD = 1e-12
METHODS = ("exhaustive", "greedy-maxprob")


@dataclass(frozen=True)
class EntropyReport:
    """Entropy of ``n``-bit patterns of a source.

    ``H1`` is ``None`` for the greedy method, which only visits one
    pattern. ``rate_bracket`` brackets the limiting Shannon rate between a
    jitter-only lower bound and ``H1/n`` (when known).
    """

    n: int
    H1: float | None
    Hinf: float
    method: str
    rate_bracket: tuple[float, float] | None = None

    @property
    def h1_rate(self) -> float | None:
        return None if self.H1 is None else self.H1 / self.n

    @property
    def hinf_rate(self) -> float:
        return self.Hinf / self.n


@dataclass(frozen=True)
class LowerBounds:
    sigma2: float
    p_e: float
    h1_lb: float
    hinf_lb: float
    tanh_pe_ub: float
    phase_noise_h1_lb: float


def _values(probabilities) -> np.ndarray:
    if isinstance(probabilities, Mapping):
        probabilities = list(probabilities.values())
    p = np.asarray(probabilities, dtype=np.float64).reshape(-1)
    if p.size == 0:
        raise ValueError("empty probability distribution")
    return p


def min_entropy(probabilities) -> float:
    """``-log2`` of the largest probability, in bits.

    Accepts a mapping pattern -> probability or an array (as returned by
    :func:`all_patterns`). Only the maximum matters, so zero entries are
    tolerated as long as one probability is positive.
    """
    p = _values(probabilities)
    if np.any(p < 0.0) or np.any(p > 1.0 + 1e-12):
        raise ValueError("probabilities must lie in [0, 1]")
    pmax = float(p.max())
    if pmax <= 0.0:
        raise ValueError("no outcome has positive probability")
    return max(0.0, -math.log2(pmax))


def shannon_entropy(probabilities) -> float:
    """Shannon entropy in bits; zero-probability outcomes contribute nothing."""
    p = _values(probabilities)
    if np.any(p < 0.0):
        raise ValueError("negative probability")
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    nz = p[p > 0.0]
    return max(0.0, float(-(nz * np.log2(nz)).sum()))


def max_entropy(probabilities, threshold: float = SUPPORT_THRESHOLD) -> float:
    """Hartley entropy: log2 of the number of outcomes above ``threshold``."""
    p = _values(probabilities)
    count = int((p > threshold).sum())
    if count == 0:
        raise ValueError("no outcome above the support threshold")
    return math.log2(count)


def entropy_rate_chain(params: SourceParams, n_max: int, m: int = DEFAULT_M,
                       tau: float = DEFAULT_TAU) -> tuple[np.ndarray, np.ndarray]:
    """``H1(Z_n)/n`` and ``Hinf(Z_n)/n`` for ``n = 1..n_max``.

    The Shannon sequence cannot increase (joint entropy is subadditive);
    the min-entropy sequence carries no such guarantee.
    """
    h1 = np.empty(n_max)
    hinf = np.empty(n_max)
    for n in range(1, n_max + 1):
        p = all_patterns(params, n, m, tau)
        h1[n - 1] = shannon_entropy(p) / n
        hinf[n - 1] = min_entropy(p) / n
    return h1, hinf


def prediction_probability(sigma2: float, tau: float = DEFAULT_TAU) -> float:
    """Chance of guessing the next bit of an unbiased source from its phase.

    With the previous phase known the frequency drops out, leaving
    ``p00 + p11`` of the source ``F = 0, D = 1/2``.
    """
    if not sigma2 >= SIGMA2_MIN:
        raise DegenerateSourceError(f"sigma2={sigma2:g} is below {SIGMA2_MIN:g}")
    pp = pair_probs(SourceParams(0.0, 0.5, sigma2), tau)
    return min(1.0, max(0.5, pp.p00 + pp.p11))


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def phase_noise_bound(Q: float) -> float:
    """Shannon bound of the phase-noise model, ``1 - 4/(pi^2 ln 2) exp(-4 pi^2 Q)``.

    ``Q`` is the accumulated jitter variance per sample (``sigma2`` here).
    Only the two leading terms are kept, the ``O(exp(-6 pi^2 Q))`` remainder
    is dropped, so treat it as a reference curve. At ``Q = 0`` it still
    reports 0.4154 bits, so it overstates the entropy of quiet sources.
    """
    if Q < 0.0:
        raise ValueError(f"Q must be >= 0, got {Q}")
    return 1.0 - 4.0 / (math.pi ** 2 * LN2) * math.exp(-4.0 * math.pi ** 2 * Q)


def prediction_bounds(sigma2: float, tau: float = DEFAULT_TAU) -> LowerBounds:
    """Frequency-independent entropy bounds for an unbiased source.

    ``h1_lb`` is the binary entropy of the prediction probability ``p_e``
    and ``hinf_lb = -log2 p_e``. The latter is an asymptotic estimate, not
    a proven bound: near-harmonic frequencies at low jitter can sit below
    it.
    """
    p_e = prediction_probability(sigma2, tau)
    return LowerBounds(
        sigma2=sigma2,
        p_e=p_e,
        h1_lb=binary_entropy(p_e),
        hinf_lb=max(0.0, -math.log2(p_e)),
        tanh_pe_ub=1.0 - 0.5 * math.tanh(math.pi * math.sqrt(sigma2)),
        phase_noise_h1_lb=phase_noise_bound(sigma2),
    )


def entropy_report(params: SourceParams, n: int, method: str = "exhaustive",
                   m: int = DEFAULT_M, tau: float = DEFAULT_TAU) -> EntropyReport:
    """Entropy of ``Z_n`` by full enumeration or by the greedy max-probability path."""
    if method == "exhaustive":
        p = all_patterns(params, n, m, tau)
        H1, Hinf = shannon_entropy(p), min_entropy(p)
    elif method == "greedy-maxprob":
        res = maxprob_pattern_depthfirst(params, n, m, tau)
        H1, Hinf = None, max(0.0, -res.log2_probability)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    bracket = None
    if params.D == 0.5:
        lb = prediction_bounds(params.sigma2, tau).h1_lb
        bracket = (lb, H1 / n if H1 is not None else 1.0)
    return EntropyReport(n=n, H1=H1, Hinf=Hinf, method=method, rate_bracket=bracket)
