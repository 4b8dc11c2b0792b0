import math

import numpy as np
import pytest

from rojitter.params import canonicalize
from rojitter.simulate import SimConfig, simulate_runs

# unbiased source with known maximal patterns, used throughout
GOLDEN = canonicalize(0.15, 0.5, 0.04)
# biased source used for pair-probability checks
BIASED = canonicalize(0.1, 0.625, 0.04)


def random_triples(count, seed, sigma=(0.05, 1.0), F=(0.0, 0.5), D=(0.2, 0.8)):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        s = rng.uniform(*sigma)
        out.append(canonicalize(rng.uniform(*F), rng.uniform(*D), s * s))
    return out


def replicate_runs(params, length, total_bits, seed):
    """Independent stationary runs; rows are independent samples of Z_length."""
    runs = total_bits // length
    return simulate_runs(SimConfig.from_params(params, length, seed=seed), runs)


def mc_autocorr(runs, k):
    """Lag-k autocorrelation from the first and (1+k)-th bit of each run."""
    y0 = 2.0 * runs[:, 0] - 1.0
    yk = 2.0 * runs[:, k] - 1.0
    return float(np.mean(y0 * yk))


def binomial_se(p, n):
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def biased():
    return BIASED
