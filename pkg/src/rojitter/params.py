"""Shared parameter and density types.

A noise source is described by the triple ``(F, D, sigma2)``: relative
oscillator frequency, duty cycle and per-sample accumulated jitter
variance, all dimensionless with time measured in sampling periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

DEFAULT_TAU = 10.0
DEFAULT_M = 4096
MIN_M = 64

SIGMA2_MIN = 1e-8
EPS_NORM = 1e-9
EPS_NEG = 1e-12


class DegenerateSourceError(ValueError):
    """Jitter variance too small for the analytic (grid or erf) routines."""


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def reduce_frequency(f_raw: float) -> float:
    """Map any real frequency onto ``[0, 1/2]`` using mod 1 and F -> 1-F."""
    f = _finite("F", f_raw) % 1.0
    return min(f, 1.0 - f)


@dataclass(frozen=True)
class SourceParams:
    """Canonical ``(F, D, sigma2)`` triple.

    Build instances with :func:`canonicalize` unless ``F`` is already
    known to lie in ``[0, 1/2]``.
    """

    F: float
    D: float
    sigma2: float

    def __post_init__(self):
        for name in ("F", "D", "sigma2"):
            _finite(name, getattr(self, name))
        if not 0.0 <= self.F <= 0.5:
            raise ValueError(f"F={self.F} is not canonical; use canonicalize()")
        if not 0.0 < self.D < 1.0:
            raise ValueError(f"duty cycle D must lie in (0, 1), got {self.D}")
        if self.sigma2 < 0.0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def degenerate(self) -> bool:
        return self.sigma2 < SIGMA2_MIN

    def require_nondegenerate(self) -> "SourceParams":
        if self.degenerate:
            raise DegenerateSourceError(
                f"sigma2={self.sigma2:g} is below {SIGMA2_MIN:g}; the wrapped "
                "Gaussian step collapses to a point mass that the analytic "
                "routines cannot represent (use the simulator instead)")
        return self

    def with_(self, **changes) -> "SourceParams":
        values = {"F": self.F, "D": self.D, "sigma2": self.sigma2}
        values.update(changes)
        return canonicalize(values["F"], values["D"], values["sigma2"])


def canonicalize(f_raw: float, d: float, sigma2: float) -> SourceParams:
    """Validate a raw triple and reduce ``F`` into ``[0, 1/2]``.

    >>> canonicalize(2.85, 0.625, 0.04).F  # doctest: +ELLIPSIS
    0.15...
    """
    d = _finite("D", d)
    sigma2 = _finite("sigma2", sigma2)
    if not 0.0 < d < 1.0:
        raise ValueError(f"duty cycle D must lie in (0, 1), got {d}")
    if sigma2 < 0.0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    return SourceParams(reduce_frequency(f_raw), d, sigma2)


def tail_indices(sigma: float, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Integer shifts ``floor(-tau*sigma) <= i <= ceil(tau*sigma)``."""
    if not tau > 0.0:
        raise ValueError(f"tailcut tau must be positive, got {tau}")
    return np.arange(math.floor(-tau * sigma), math.ceil(tau * sigma) + 1)


def check_grid_size(m: int, min_m: int = MIN_M) -> int:
    m = int(m)
    if m < min_m or m & (m - 1):
        raise ValueError(f"grid size m must be a power of two >= {min_m}, got {m}")
    return m


@dataclass(frozen=True)
class GridDensity:
    """Probability density on the unit circle, discretized into ``m`` cells.

    ``coeffs[i]`` approximates the mass on ``[i/m, (i+1)/m)``. The array is
    stored read-only; negatives within ``EPS_NEG`` are clamped to zero.
    """

    coeffs: np.ndarray
    mass: float = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64)
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        check_grid_size(c.size)
        if c.min() < -EPS_NEG:
            raise ValueError(f"negative coefficient {c.min():g} in density")
        np.maximum(c, 0.0, out=c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "mass", float(c.sum()))

    @property
    def m(self) -> int:
        return self.coeffs.size

    @classmethod
    def uniform(cls, m: int = DEFAULT_M) -> "GridDensity":
        m = check_grid_size(m)
        return cls(np.full(m, 1.0 / m))


def as_bits(bits: str | Iterable[int] | np.ndarray) -> np.ndarray:
    """Coerce a bit string or sequence to a nonempty ``uint8`` array of 0/1."""
    if isinstance(bits, str):
        s = "".join(bits.split())
        if s.strip("01"):
            raise ValueError(f"bit string may only contain '0' and '1': {bits!r}")
        arr = np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise ValueError("bit sequence must be one-dimensional")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("bit sequence may only contain 0 and 1")
        arr = arr.astype(np.uint8)
    if arr.size == 0:
        raise ValueError("bit sequence is empty")
    return arr


def bits_to_str(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)
