"""Seeded Monte Carlo simulation of the sampled phase walk.

Random numbers come from Philox4x64-10 keyed with the seed (``key = seed``,
counter starting at zero), taken as raw 64-bit words in generation order:

* if no initial phase is given, the first word gives ``x0 = (w >> 11) / 2**53``;
* every following word gives one Gaussian step,
  ``F + sigma * Phi^-1(((w >> 11) + 1/2) / 2**53)``, where ``Phi^-1`` is the
  standard normal quantile function.

Burn-in steps consume words like ordinary steps. Inverse-CDF sampling uses
exactly one word per variate, so the stream is fixed by the seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

_CHUNK = 1 << 20        # steps generated per block
_CUMSUM_SPAN = 4096     # steps summed before reducing mod 1 again
_TWO53 = float(1 << 53)


@dataclass(frozen=True)
class SimConfig:
    """Simulation request. ``F`` may be any real; it is used unreduced."""

    F: float
    D: float
    sigma2: float
    n: int
    seed: int = 0
    x0: float | None = None
    burn_in: int = 0

    def __post_init__(self):
        for name in ("F", "D", "sigma2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 < self.D < 1.0:
            raise ValueError(f"duty cycle D must lie in (0, 1), got {self.D}")
        if self.sigma2 < 0.0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if not 0 <= self.seed < 1 << 128:
            raise ValueError("seed must be a non-negative integer below 2**128")
        if self.x0 is not None and not 0.0 <= self.x0 < 1.0:
            raise ValueError(f"x0 must lie in [0, 1), got {self.x0}")

    @classmethod
    def from_params(cls, params, n: int, seed: int = 0, **kwargs) -> "SimConfig":
        return cls(params.F, params.D, params.sigma2, n, seed, **kwargs)


def _uniform53(words: np.ndarray, offset: float = 0.0) -> np.ndarray:
    return ((words >> np.uint64(11)).astype(np.float64) + offset) / _TWO53


def _steps(words: np.ndarray, F: float, sigma: float) -> np.ndarray:
    return F + sigma * ndtri(_uniform53(words, 0.5))


def _walk(x: float, steps: np.ndarray) -> np.ndarray:
    """Phases ``x_i = (x_{i-1} + step_i) mod 1`` for a block of steps."""
    steps = np.mod(steps, 1.0)
    out = np.empty_like(steps)
    for lo in range(0, steps.size, _CUMSUM_SPAN):
        seg = x + np.cumsum(steps[lo:lo + _CUMSUM_SPAN])
        np.mod(seg, 1.0, out=seg)
        out[lo:lo + _CUMSUM_SPAN] = seg
        x = seg[-1]
    return out


def _run(config: SimConfig, keep_phases: bool):
    gen = np.random.Philox(key=config.seed)
    sigma = math.sqrt(config.sigma2)
    x = config.x0
    if x is None:
        x = float(_uniform53(gen.random_raw(1))[0])
    skip = config.burn_in
    while skip:
        take = min(skip, _CHUNK)
        x = float(_walk(x, _steps(gen.random_raw(take), config.F, sigma))[-1])
        skip -= take
    bits = np.empty(config.n, dtype=np.uint8)
    phases = np.empty(config.n) if keep_phases else None
    for lo in range(0, config.n, _CHUNK):
        take = min(_CHUNK, config.n - lo)
        ph = _walk(x, _steps(gen.random_raw(take), config.F, sigma))
        x = float(ph[-1])
        bits[lo:lo + take] = ph < config.D
        if keep_phases:
            phases[lo:lo + take] = ph
    return bits, phases


def simulate(config: SimConfig) -> np.ndarray:
    """Simulate ``config.n`` output bits; identical configs give identical bits."""
    return _run(config, keep_phases=False)[0]


def simulate_with_phases(config: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`simulate`, also returning the phases ``x_1..x_n``."""
    return _run(config, keep_phases=True)


def simulate_runs(config: SimConfig, runs: int) -> np.ndarray:
    """``runs`` independent stationary replicates of ``config.n`` bits each.

    Every run draws its own uniform initial phase followed by its ``n``
    steps, so rows are independent samples of ``Z_n``. ``x0`` and
    ``burn_in`` are not used. Returns a ``(runs, n)`` uint8 array.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    gen = np.random.Philox(key=config.seed)
    sigma = math.sqrt(config.sigma2)
    n = config.n
    out = np.empty((runs, n), dtype=np.uint8)
    block = max(1, _CHUNK // (n + 1))
    for lo in range(0, runs, block):
        r = min(block, runs - lo)
        words = gen.random_raw(r * (n + 1)).reshape(r, n + 1)
        x = _uniform53(words[:, 0])
        steps = _steps(words[:, 1:], config.F, sigma)
        phases = np.mod(x[:, None] + np.cumsum(np.mod(steps, 1.0), axis=1), 1.0)
        out[lo:lo + r] = phases < config.D
    return out
