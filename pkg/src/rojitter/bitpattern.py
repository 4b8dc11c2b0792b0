"""Bit-pattern probabilities by chop-and-convolve on a discretized phase density.

The phase density is held as ``m`` cell masses on the unit circle.
Observing a bit multiplies it by the 0/1 duty-cycle mask for that bit
("chop"); one sampling step is a cyclic convolution with the step grid,
done as a pointwise product with the step grid's real FFT, computed once
per source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import (DEFAULT_M, DEFAULT_TAU, GridDensity, SourceParams,
                     as_bits, bits_to_str, check_grid_size)
from .stepdist import step_grid

MAX_EXHAUSTIVE_N = 20
TIE_EPS = 1e-12
CLAMP_BUDGET = 1e-6

# rows per batched transform in all_patterns (about 32 MB at m=4096)
_BATCH_CELLS = 1 << 22


class ClampBudgetError(ArithmeticError):
    """Transform round-off produced more negative mass than allowed."""


@dataclass(frozen=True)
class PatternResult:
    """A bit pattern with its probability and the phase density after it.

    ``conditional`` carries the unnormalized density after the last chop and
    step, so its mass equals ``probability``. ``log2_probability`` is
    accumulated step by step and stays finite where ``probability`` would
    underflow.
    """

    pattern: np.ndarray
    probability: float
    log2_probability: float
    conditional: GridDensity
    ties: int = 0

    @property
    def bits(self) -> str:
        return bits_to_str(self.pattern)


def chop_masks(D: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell fraction of ``[j/m, (j+1)/m)`` where the sampled bit is 0 / 1."""
    m = check_grid_size(m, min_m=1)
    if not 0.0 < D < 1.0:
        raise ValueError(f"duty cycle D must lie in (0, 1), got {D}")
    g1 = np.clip(m * D - np.arange(m), 0.0, 1.0)
    g0 = 1.0 - g1
    g0.setflags(write=False)
    g1.setflags(write=False)
    return g0, g1


class StepKernel:
    """Precomputed masks and step-grid spectrum for one ``(params, m, tau)``."""

    def __init__(self, params: SourceParams, m: int = DEFAULT_M,
                 tau: float = DEFAULT_TAU):
        params.require_nondegenerate()
        self.params = params
        self.m = check_grid_size(m)
        self.step = step_grid(params, self.m, tau)
        self.spectrum = np.fft.rfft(self.step.coeffs)
        self.spectrum.setflags(write=False)
        self.masks = chop_masks(params.D, self.m)

    def convolve(self, v: np.ndarray) -> tuple[np.ndarray, float]:
        """Cyclic convolution along the last axis; returns (result, clamped mass)."""
        out = np.fft.irfft(np.fft.rfft(v, axis=-1) * self.spectrum, self.m, axis=-1)
        neg = out < 0.0
        clamped = float(-out[neg].sum())
        out[neg] = 0.0
        return out, clamped


@lru_cache(maxsize=32)
def _kernel(params: SourceParams, m: int, tau: float) -> StepKernel:
    return StepKernel(params, m, tau)


def step_kernel(params: SourceParams, m: int = DEFAULT_M,
                tau: float = DEFAULT_TAU) -> StepKernel:
    return _kernel(params, int(m), float(tau))


class _Walker:
    """Chop-and-convolve state kept normalized to unit mass, with a log2 scale."""

    def __init__(self, kernel: StepKernel):
        self.kernel = kernel
        self.v = np.full(kernel.m, 1.0 / kernel.m)
        self.log2p = 0.0
        self.clamped = 0.0

    def masses(self) -> tuple[float, float]:
        g0, g1 = self.kernel.masks
        return float(self.v @ g0), float(self.v @ g1)

    def advance(self, bit: int, mass: float | None = None) -> None:
        t = self.v * self.kernel.masks[bit]
        q = float(t.sum()) if mass is None else mass
        if q <= 0.0:
            self.log2p = -math.inf
            self.v = np.zeros_like(self.v)
            return
        self.log2p += math.log2(q)
        self.v, clamped = self.kernel.convolve(t / q)
        self.clamped += clamped
        if self.clamped > CLAMP_BUDGET:
            raise ClampBudgetError(
                f"clamped {self.clamped:g} of negative mass (budget {CLAMP_BUDGET:g})")

    def result(self, pattern: np.ndarray, ties: int = 0) -> PatternResult:
        p = 2.0 ** self.log2p
        return PatternResult(pattern, p, self.log2p, GridDensity(self.v * p), ties)


def pattern_probability(params: SourceParams, pattern, m: int = DEFAULT_M,
                        tau: float = DEFAULT_TAU) -> PatternResult:
    """Probability of observing ``pattern`` from a stationary (uniform) phase."""
    z = as_bits(pattern)
    walker = _Walker(step_kernel(params, m, tau))
    for bit in z:
        walker.advance(int(bit))
        if walker.log2p == -math.inf:
            break
    return walker.result(z)


def all_patterns(params: SourceParams, n: int, m: int = DEFAULT_M,
                 tau: float = DEFAULT_TAU) -> np.ndarray:
    """Probabilities of all ``2**n`` patterns of length ``n``.

    Index ``i`` holds the pattern whose binary expansion (first bit most
    significant) is ``i``; see :func:`pattern_from_index`. Prefix densities
    are shared, so the cost is about ``2**n`` transforms rather than
    ``n * 2**n``.
    """
    if not 1 <= n <= MAX_EXHAUSTIVE_N:
        raise ValueError(f"exhaustive enumeration needs 1 <= n <= {MAX_EXHAUSTIVE_N}, got {n}")
    kernel = step_kernel(params, m, tau)
    g = np.stack(kernel.masks)                        # (2, m)
    max_rows = max(2, _BATCH_CELLS // kernel.m)
    clamped = [0.0]

    def expand(v: np.ndarray, depth: int) -> np.ndarray:
        # v: (B, m) densities after `depth` bits; returns (B * 2**(n-depth),)
        if depth == n - 1:
            return (v @ g.T).reshape(-1)
        t = (v[:, None, :] * g[None, :, :]).reshape(-1, kernel.m)
        parts = []
        for lo in range(0, t.shape[0], max_rows):
            w, c = kernel.convolve(t[lo:lo + max_rows])
            clamped[0] += c
            parts.append(expand(w, depth + 1))
        return np.concatenate(parts)

    probs = expand(np.full((1, kernel.m), 1.0 / kernel.m), 0)
    if clamped[0] > CLAMP_BUDGET * n:
        raise ClampBudgetError(f"clamped {clamped[0]:g} of negative mass")
    return probs


def pattern_from_index(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def pattern_index(pattern) -> int:
    return int(bits_to_str(as_bits(pattern)), 2)


def maxprob_pattern_depthfirst(params: SourceParams, n: int, m: int = DEFAULT_M,
                               tau: float = DEFAULT_TAU) -> PatternResult:
    """Greedy most-likely pattern: always follow the heavier chopped half.

    This is a heuristic. Its probability never exceeds the true maximum
    and can fall short of it, because the best ``n``-bit pattern need not
    extend the best shorter one. Near-ties (within 1e-12) go to bit 0 and
    are counted in ``ties``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    walker = _Walker(step_kernel(params, m, tau))
    bits = np.empty(n, dtype=np.uint8)
    ties = 0
    for i in range(n):
        q0, q1 = walker.masses()
        if abs(q0 - q1) < TIE_EPS:
            ties += 1
            bit = 0
        else:
            bit = int(q1 > q0)
        bits[i] = bit
        walker.advance(bit, (q0, q1)[bit])
    return walker.result(bits, ties)


def peak_path_pattern(params: SourceParams, n: int, x0: float) -> np.ndarray:
    """Zero-jitter pattern from phase ``x0``: ``x_i = x0 + i F (mod 1)``."""
    if not 0.0 <= x0 < 1.0:
        raise ValueError(f"x0 must lie in [0, 1), got {x0}")
    phases = np.mod(x0 + params.F * np.arange(1, n + 1), 1.0)
    return (phases < params.D).astype(np.uint8)
