"""Wrapped-Gaussian step density of the phase walk and its distance to uniform."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import (DEFAULT_M, DEFAULT_TAU, SIGMA2_MIN, DegenerateSourceError,
                     GridDensity, SourceParams, check_grid_size, tail_indices)

LN2 = math.log(2.0)

# below this the leading Fourier term of f_s - 1 is exact to double precision
_LEADING_TERM_CUTOFF = 1e-6


@dataclass(frozen=True)
class StepExtrema:
    f_min: float
    f_max: float
    max_dev: float
    log2_max_dev: float


def step_density(params: SourceParams, x, tau: float = DEFAULT_TAU):
    """Evaluate the 1-periodic step density ``f_s`` at phase(s) ``x``.

    Parameters
    ----------
    params : SourceParams
        Source triple; only ``F`` and ``sigma2`` are used.
    x : float or array_like
        Phase values. Any real is accepted and reduced mod 1.
    tau : float
        Tailcut in standard deviations.

    Returns
    -------
    float or ndarray
        Density values, same shape as ``x``.
    """
    params.require_nondegenerate()
    sigma2 = params.sigma2
    x = np.asarray(x, dtype=np.float64)
    # offset from the peak, reduced to [-1/2, 1/2) so the tailcut range is centred
    d = np.mod(x - params.F + 0.5, 1.0) - 0.5
    i = tail_indices(params.sigma, tau)
    terms = np.exp(-(d[..., None] + i) ** 2 / (2.0 * sigma2))
    out = terms.sum(axis=-1) / math.sqrt(2.0 * math.pi * sigma2)
    return float(out) if out.ndim == 0 else out


def log2_leading_deviation(sigma: float) -> float:
    """log2 of ``2 exp(-2 pi^2 sigma^2)``, the largest Fourier term of ``f_s - 1``."""
    return 1.0 - 2.0 * math.pi ** 2 * sigma * sigma / LN2


def step_extrema(sigma: float, tau: float = DEFAULT_TAU) -> StepExtrema:
    """Minimum and maximum of the step density for jitter ``sigma``.

    The maximum sits at the mean step ``F`` and the minimum half a period
    away, so ``F`` drops out. Once ``f_s`` is within about 1e-6 of flat the
    deviation is reported from the leading Fourier term in log space, which
    stays meaningful long after ``f_max - 1`` has rounded to zero.
    """
    if not sigma * sigma >= SIGMA2_MIN:
        raise DegenerateSourceError(f"sigma={sigma:g} is below sqrt({SIGMA2_MIN:g})")
    p = SourceParams(0.0, 0.5, sigma * sigma)
    f_max = step_density(p, 0.0, tau)
    f_min = step_density(p, 0.5, tau)
    max_dev = max(f_max - 1.0, 1.0 - f_min)
    log2_lead = log2_leading_deviation(sigma)
    if log2_lead < math.log2(_LEADING_TERM_CUTOFF):
        log2_dev = log2_lead
    else:
        log2_dev = math.log2(max_dev)
    return StepExtrema(f_min, f_max, max_dev, log2_dev)


def step_grid(params: SourceParams, m: int = DEFAULT_M,
              tau: float = DEFAULT_TAU) -> GridDensity:
    """Sample ``f_s(j/m)/m`` at the cell left edges and renormalize to mass 1."""
    m = check_grid_size(m)
    s = step_density(params, np.arange(m) / m, tau) / m
    mass = s.sum()
    if abs(mass - 1.0) > 1e-2:
        raise ValueError(
            f"grid m={m} under-resolves sigma={params.sigma:g} "
            f"(sampled mass {mass:g}); increase m")
    return GridDensity(s / mass)
