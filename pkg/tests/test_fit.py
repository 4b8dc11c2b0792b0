import math

import numpy as np
import pytest

from conftest import BIASED
from rojitter.autocorr import AutocorrVector, c_k, estimate_autocorr
from rojitter.fit import fit_params, model_autocorr, sigma2_lower_bound
from rojitter.params import canonicalize
from rojitter.simulate import SimConfig, simulate


def sq_residual(params, measured, k_fit=8):
    model = model_autocorr(params, k_fit).values[1:]
    return float(((model - measured.values[1:k_fit + 1]) ** 2).sum())


def assert_recovers(fit, truth, tol):
    p = fit.params
    assert abs(p.F - truth.F) <= tol and abs(p.D - truth.D) <= tol
    assert abs(p.sigma2 - truth.sigma2) <= tol


def test_model_autocorr_examples():
    flat = model_autocorr(canonicalize(0.3, 0.5, 9.0), 8)
    assert np.abs(flat.values[1:]).max() < 1e-9
    assert model_autocorr(canonicalize(0.2, 0.5, 0.04), 3)[0] == 0.0
    v = model_autocorr(BIASED, 4)
    assert v.values[1:].tolist() == [c_k(BIASED, k) for k in range(1, 5)]


def test_model_matches_simulation():
    n = 10 ** 6
    est = estimate_autocorr(simulate(SimConfig.from_params(BIASED, n, seed=23)), 8)
    model = model_autocorr(BIASED, 8)
    # correlated stream: allow a few times the independent-sample error
    assert np.abs(est.values - model.values).max() < 10 / math.sqrt(n)


def test_noiseless_biased_source():
    fit = fit_params(model_autocorr(BIASED, 8))
    assert fit.converged
    assert_recovers(fit, BIASED, 1e-4)
    assert fit.residual < 1e-12


def test_noiseless_round_trips():
    rng = np.random.default_rng(77)
    for _ in range(20):
        truth = canonicalize(rng.uniform(0.02, 0.48), rng.uniform(0.3, 0.7),
                             math.exp(rng.uniform(math.log(0.005), math.log(0.5))))
        fit = fit_params(model_autocorr(truth, 8))
        assert_recovers(fit, truth, 1e-3)


def test_simulated_round_trip_example():
    truth = canonicalize(0.3, 0.5, 0.01)
    n = 10 ** 7
    measured = estimate_autocorr(simulate(SimConfig.from_params(truth, n, seed=31)), 8)
    fit = fit_params(measured)
    assert abs(fit.params.F - truth.F) <= 0.01
    assert abs(fit.params.sigma2 / truth.sigma2 - 1.0) <= 0.2
    # the returned optimum is at least as good as the truth on the measured vector
    assert sq_residual(truth, measured) >= fit.residual - 1e-12
    assert fit.residual == pytest.approx(sq_residual(fit.params, measured), rel=1e-9, abs=1e-15)


def test_unidentifiable_all_zero():
    fit = fit_params(AutocorrVector(np.zeros(9)))
    assert not fit.converged
    assert fit.params.sigma2 >= 9.0
    assert fit.sigma2_lower_bound == fit.params.sigma2


def test_unidentifiable_noisy_stream():
    z = simulate(SimConfig(0.21, 0.5, 4.0, 10 ** 5, seed=2))
    fit = fit_params(estimate_autocorr(z, 8))
    assert not fit.converged
    assert fit.sigma2_lower_bound == sigma2_lower_bound(fit.params.D, 5 / math.sqrt(10 ** 5))
    lb = fit.sigma2_lower_bound
    assert lb <= 4.0
    # at the bound the worst-case lag-1 correlation sits at the noise floor
    assert abs(c_k(canonicalize(0.0, 0.5, lb), 1)) == pytest.approx(5 / math.sqrt(10 ** 5), rel=1e-3)


def test_biased_decorrelated_vector_is_unidentifiable():
    D = 0.7
    v = np.full(9, (2 * D - 1) ** 2)
    v[0] = 2 * D - 1
    fit = fit_params(AutocorrVector(v))
    assert not fit.converged and fit.params.D == pytest.approx(D)


def test_raw_frequency_streams_fit_alike():
    n = 2 * 10 ** 6
    fits = {}
    for raw in (0.3, 1.3, 0.7):
        z = simulate(SimConfig(raw, 0.5, 0.01, n, seed=44))
        fits[raw] = fit_params(estimate_autocorr(z, 8)).params
    # 0.3 and 1.3 produce the same phase walk up to rounding
    assert fits[0.3].F == pytest.approx(fits[1.3].F, abs=1e-6)
    assert fits[0.3].sigma2 == pytest.approx(fits[1.3].sigma2, rel=1e-5)
    # 0.7 is the mirror image; same source up to noise
    assert abs(fits[0.7].F - 0.3) <= 0.01
    assert abs(fits[0.7].sigma2 / 0.01 - 1.0) <= 0.2


def test_noiseless_raw_frequency_invariance():
    a = fit_params(model_autocorr(canonicalize(0.7, 0.45, 0.03), 8)).params
    b = fit_params(model_autocorr(canonicalize(0.3, 0.45, 0.03), 8)).params
    assert a.F == pytest.approx(b.F, abs=1e-9)
    assert a.sigma2 == pytest.approx(b.sigma2, rel=1e-9)
    assert a.D == b.D


def test_fit_argument_checks():
    with pytest.raises(ValueError):
        fit_params(model_autocorr(BIASED, 8), k_fit=2)
    with pytest.raises(ValueError):
        fit_params(model_autocorr(BIASED, 4), k_fit=8)


def test_lower_bound_noiseless_is_flat_density():
    # step density within 2**-256 of flat
    s2 = sigma2_lower_bound(0.5, None)
    assert 1.0 - 2.0 * math.pi ** 2 * s2 / math.log(2) == pytest.approx(-256.0)
    assert s2 >= 9.0
