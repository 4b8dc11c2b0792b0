"""Recover ``(F, D, sigma2)`` from measured autocorrelation by least squares.

``D`` comes straight from the lag-0 bias. ``F`` and ``sigma2`` are found by
a coarse grid over ``[0, 1/2] x [1e-6, 10]`` (log-spaced in ``sigma2``)
followed by coordinate descent with golden-section line searches from the
best few grid minima, finished by a bounded Gauss-Newton (trust-region)
polish on the residual vector. The objective is cheap but multi-modal in
``F``, and its valleys curve in the ``(F, log sigma2)`` plane, where line
searches alone crawl.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .autocorr import (MAX_LAG_VARIANCE, AutocorrVector, autocorr_vector,
                       c1_array, decorrelated_limit)
from .params import DEFAULT_TAU, SourceParams, canonicalize

log = logging.getLogger(__name__)

F_CELLS = 256
SIGMA2_CELLS = 64
SIGMA2_RANGE = (1e-6, 10.0)
RESIDUAL_TOL = 1e-10
NOISELESS_THRESHOLD = 1e-12
# log2 deviation of the step density from flat treated as indistinguishable
UNIFORM_LOG2_DEV = -256.0


@dataclass(frozen=True)
class FitResult:
    params: SourceParams
    residual: float
    k_used: int
    converged: bool
    candidates: list[tuple[SourceParams, float]] = field(default_factory=list)
    sigma2_lower_bound: float | None = None


def model_autocorr(params: SourceParams, k_max: int,
                   tau: float = DEFAULT_TAU) -> AutocorrVector:
    """Analytic vector with ``values[0] = 2D - 1`` and ``values[k] = c_k``."""
    return autocorr_vector(params, k_max, tau)


def _model_lags(F, D: float, sigma2, k_fit: int, tau: float) -> np.ndarray:
    """``c_1..c_k_fit`` for arrays of ``F`` (and matching or scalar ``sigma2``).

    Returns shape ``F.shape + (k_fit,)``.
    """
    F = np.asarray(F, dtype=np.float64)
    sigma2 = np.broadcast_to(np.asarray(sigma2, dtype=np.float64), F.shape)
    k = np.arange(1, k_fit + 1)
    fk = np.mod(F[..., None] * k, 1.0)
    fk = np.minimum(fk, 1.0 - fk)
    sk = sigma2[..., None] * k
    out = np.full(fk.shape, decorrelated_limit(D))
    live = sk <= MAX_LAG_VARIANCE
    if live.any():
        out[live] = c1_array(fk[live], D, sk[live], tau)
    return out


def _residual(F, D, sigma2, target, tau) -> np.ndarray:
    diff = _model_lags(F, D, sigma2, target.size, tau) - target
    return (diff * diff).sum(axis=-1)


def _profile_minima(res: np.ndarray, count: int) -> list[tuple[int, int]]:
    """Local minima in ``F`` of the residual profiled over ``sigma2``."""
    best_j = res.argmin(axis=1)
    prof = res[np.arange(res.shape[0]), best_j]
    padded = np.pad(prof, 1, mode="edge")
    is_min = (prof <= padded[:-2]) & (prof <= padded[2:])
    idx = np.flatnonzero(is_min)
    idx = idx[np.argsort(prof[idx])][:count]
    return [(int(i), int(best_j[i])) for i in idx]


def _polish(F, logs2, D, target, tau):
    def lags(x):
        return _model_lags(np.array([x[0]]), D, math.exp(x[1]), target.size, tau)[0] - target

    lo = (0.0, math.log(SIGMA2_RANGE[0]) - 2.0)
    hi = (0.5, math.log(MAX_LAG_VARIANCE))
    x0 = np.clip([F, logs2], lo, hi)
    r = least_squares(lags, x0, bounds=(lo, hi), method="trf", x_scale="jac",
                      jac="3-point", diff_step=1e-6,
                      xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    return float(r.x[0]), float(r.x[1]), float(2.0 * r.cost), r.status > 0


def _coordinate_descent(F, logs2, bounds_F, bounds_s, objective, max_sweeps=50):
    """Alternate golden-section minimizations in ``F`` and ``log sigma2``."""
    best = objective(F, logs2)
    wF = bounds_F[1] - bounds_F[0]
    ws = bounds_s[1] - bounds_s[0]
    for _ in range(max_sweeps):
        prev = best
        lo, hi = max(0.0, F - wF), min(0.5, F + wF)
        r = minimize_scalar(lambda f: objective(f, logs2), bounds=(lo, hi),
                            method="bounded", options={"xatol": 1e-13})
        if r.fun < best:
            F, best = float(r.x), float(r.fun)
        lo, hi = logs2 - ws, logs2 + ws
        r = minimize_scalar(lambda s: objective(F, s), bounds=(lo, hi),
                            method="bounded", options={"xatol": 1e-12})
        if r.fun < best:
            logs2, best = float(r.x), float(r.fun)
        if prev - best < RESIDUAL_TOL * max(best, 1e-10) or best == 0.0:
            return F, logs2, best, True
        # shrink the windows as the iterate settles
        wF = max(wF * 0.5, 1e-9)
        ws = max(ws * 0.5, 1e-9)
    return F, logs2, best, False


def sigma2_lower_bound(D: float, threshold: float | None) -> float:
    """Smallest ``sigma2`` whose correlations hide below ``threshold``.

    Uses the worst case ``F = 0``, lag 1, where the leading term of
    ``C_1 - (2D-1)^2`` is ``8 sin^2(pi D) / pi^2 * exp(-2 pi^2 sigma2)``.
    With no threshold (a noiseless vector) the bound is where the step
    density itself is within ``2**-256`` of flat.
    """
    if threshold is None:
        return (1.0 - UNIFORM_LOG2_DEV) * math.log(2.0) / (2.0 * math.pi ** 2)
    amp = 8.0 * math.sin(math.pi * D) ** 2 / math.pi ** 2
    return max(0.0, math.log(amp / threshold) / (2.0 * math.pi ** 2))


def fit_params(measured: AutocorrVector, k_fit: int = 8, tau: float = DEFAULT_TAU,
               n_starts: int = 8) -> FitResult:
    """Least-squares fit of a source model to an autocorrelation vector.

    Parameters
    ----------
    measured : AutocorrVector
        Lags ``0..k_fit`` at least. ``measured.n_bits`` (the stream length)
        sets the noise floor of the identifiability check; ``None`` means
        noiseless.
    k_fit : int
        Number of lags in the residual, unit weights.
    n_starts : int
        Grid minima refined locally; all refined optima are returned in
        ``candidates``, best first.

    Returns
    -------
    FitResult
        ``converged`` is False when the measured correlations are
        indistinguishable from independent bits; then ``sigma2`` is only a
        lower bound (also in ``sigma2_lower_bound``) and ``F`` is
        meaningless.
    """
    if k_fit < 3:
        raise ValueError("k_fit must be >= 3 to identify three parameters")
    if measured.k_max < k_fit:
        raise ValueError(f"measured vector has lags up to {measured.k_max}, need {k_fit}")
    v = np.asarray(measured.values[:k_fit + 1])
    D = float(np.clip((v[0] + 1.0) / 2.0, 1e-9, 1.0 - 1e-9))
    target = v[1:]

    noise = None if measured.n_bits is None else 5.0 / math.sqrt(measured.n_bits)
    if np.abs(target - decorrelated_limit(D)).max() < (noise or NOISELESS_THRESHOLD):
        lb = sigma2_lower_bound(D, noise)
        p = canonicalize(0.0, D, lb)
        resid = float(_residual(0.0, D, lb, target, tau))
        log.info("correlations below noise floor; sigma2 >= %.4g", lb)
        return FitResult(p, resid, k_fit, False, [], lb)

    F_grid = np.linspace(0.0, 0.5, F_CELLS)
    logs2_grid = np.linspace(math.log(SIGMA2_RANGE[0]), math.log(SIGMA2_RANGE[1]),
                             SIGMA2_CELLS)
    res = np.empty((F_CELLS, SIGMA2_CELLS))
    for j, ls in enumerate(logs2_grid):
        res[:, j] = _residual(F_grid, D, math.exp(ls), target, tau)

    def objective(F, logs2):
        return float(_residual(np.array([F]), D, math.exp(logs2), target, tau)[0])

    dF = F_grid[1] - F_grid[0]
    ds = logs2_grid[1] - logs2_grid[0]
    found = []
    for i, j in _profile_minima(res, n_starts):
        F, ls, r, _ = _coordinate_descent(F_grid[i], logs2_grid[j], (0.0, dF),
                                          (0.0, ds), objective)
        F2, ls2, r2, ok = _polish(F, ls, D, target, tau)
        if r2 <= r:
            F, ls, r = F2, ls2, r2
        found.append((r, F, ls, ok))
    found.sort()
    candidates = []
    for r, F, ls, _ in found:
        p = canonicalize(F, D, math.exp(ls))
        if all(abs(p.F - q.F) > 1e-6 or abs(math.log(p.sigma2 / q.sigma2)) > 1e-6
               for q, _ in candidates):
            candidates.append((p, r))
    r, _, _, ok = found[0]
    return FitResult(candidates[0][0], r, k_fit, ok, candidates)
