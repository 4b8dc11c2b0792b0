import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import GOLDEN, random_triples
from rojitter.bitpattern import all_patterns
from rojitter.entropy import (binary_entropy, entropy_rate_chain, entropy_report,
                              max_entropy, min_entropy, phase_noise_bound,
                              prediction_bounds, prediction_probability,
                              shannon_entropy)
from rojitter.params import DegenerateSourceError, canonicalize
from rojitter.simulate import SimConfig, simulate_with_phases


def test_min_entropy_examples():
    assert min_entropy({"0": 0.5, "1": 0.5}) == 1.0
    assert min_entropy([0.0, 0.25, 0.75]) == pytest.approx(-math.log2(0.75))
    with pytest.raises(ValueError):
        min_entropy([0.0, 0.0])
    with pytest.raises(ValueError):
        min_entropy([-0.1, 1.1])


@pytest.mark.parametrize("n, rate", [(3, 0.844807), (4, 0.849297), (5, 0.846341)])
def test_min_entropy_golden(n, rate):
    assert min_entropy(all_patterns(GOLDEN, n)) / n == pytest.approx(rate, abs=1e-5)


def test_shannon_examples():
    for n in (1, 4, 10):
        assert shannon_entropy(np.full(2 ** n, 2.0 ** -n)) == pytest.approx(n, abs=1e-12)
    # binary entropy of 0.625, evaluated independently
    h = -(0.625 * math.log2(0.625) + 0.375 * math.log2(0.375))
    assert shannon_entropy({"0": 0.375, "1": 0.625}) == pytest.approx(h, abs=1e-12)
    assert h == pytest.approx(0.954434, abs=1e-6)
    assert shannon_entropy(all_patterns(canonicalize(0.3, 0.5, 9.0), 4)) == pytest.approx(4.0, abs=1e-6)
    with pytest.raises(ValueError):
        shannon_entropy([0.5, 0.4])


def test_max_entropy():
    assert max_entropy([0.5, 0.5, 0.0, 1e-13]) == 1.0
    assert max_entropy(np.full(8, 1 / 8)) == 3.0
    with pytest.raises(ValueError):
        max_entropy([0.0, 1e-13])


def test_entropy_ordering_on_patterns():
    p = all_patterns(GOLDEN, 6)
    assert min_entropy(p) <= shannon_entropy(p) <= max_entropy(p) + 1e-12


def test_chain_flat_source():
    h1, hinf = entropy_rate_chain(canonicalize(0.2, 0.5, 9.0), 5)
    assert np.allclose(h1, 1.0, atol=1e-9) and np.allclose(hinf, 1.0, atol=1e-9)


def test_chain_golden_source():
    h1, hinf = entropy_rate_chain(GOLDEN, 8)
    assert np.all(np.diff(h1) <= 1e-12)
    assert hinf[3] > hinf[2] and hinf[4] < hinf[3]
    assert hinf[2:5] == pytest.approx([0.844807, 0.849297, 0.846341], abs=1e-5)
    assert np.all(hinf <= h1 + 1e-12)


def test_chain_monotone_random():
    for p in random_triples(50, seed=41):
        h1, hinf = entropy_rate_chain(p, 10)
        assert np.all(np.diff(h1) <= 1e-9), p
        assert hinf[-1] <= h1[-1] + 1e-12


def test_prediction_limits():
    b = prediction_bounds(9.0)
    assert b.p_e == pytest.approx(0.5, abs=1e-12)
    assert b.h1_lb == pytest.approx(1.0, abs=1e-12) and b.hinf_lb == pytest.approx(1.0, abs=1e-12)
    quiet = prediction_bounds(1e-4)
    assert quiet.p_e > 0.98 and quiet.hinf_lb < 0.025
    with pytest.raises(DegenerateSourceError):
        prediction_probability(0.0)


def test_prediction_small_sigma_closed_form():
    # near-deterministic: a bit flips only when the step crosses the phase boundary
    for sigma in (0.01, 0.003):
        assert prediction_probability(sigma * sigma) == pytest.approx(
            1.0 - 2.0 * sigma * math.sqrt(2.0 / math.pi), abs=1e-9)


def test_bounds_ordering_and_relaxation():
    for sigma in np.linspace(0.01, 3.0, 100):
        b = prediction_bounds(sigma * sigma)
        assert b.hinf_lb <= b.h1_lb + 1e-15
        assert b.p_e <= b.tanh_pe_ub + 1e-12


def test_p_e_strictly_decreasing():
    pe = [prediction_probability(s2) for s2 in np.geomspace(1e-4, 1.0, 200)]
    assert np.all(np.diff(pe) < 0)


def test_prediction_against_simulated_predictor():
    n = 10 ** 7
    bits, phases = simulate_with_phases(SimConfig(0.0, 0.5, 0.04, n, seed=17))
    guess = (phases[:-1] < 0.5).astype(np.uint8)
    hit = (guess == bits[1:]).astype(np.float64)
    # successive hits share a phase, so use batch means for the error bar
    means = hit[: (hit.size // 1000) * 1000].reshape(1000, -1).mean(axis=1)
    se = means.std(ddof=1) / math.sqrt(means.size)
    assert abs(hit.mean() - prediction_probability(0.04)) <= 4 * se


def test_phase_noise_examples():
    assert phase_noise_bound(0.0) == pytest.approx(0.4154, abs=1e-3)
    assert abs(phase_noise_bound(1.0) - (1.0 - 4.0 / (math.pi ** 2 * math.log(2)) * math.exp(-4 * math.pi ** 2))) < 1e-15
    assert phase_noise_bound(1.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        phase_noise_bound(-0.1)


def test_phase_noise_exceeds_shannon_bound_at_q005():
    assert phase_noise_bound(0.05) > prediction_bounds(0.05).h1_lb


def test_phase_noise_exceeds_jitter_bounds_when_quiet():
    for q in np.geomspace(1e-4, 5e-3, 20):
        b = prediction_bounds(q)
        assert b.phase_noise_h1_lb > b.h1_lb
    for q in np.geomspace(1e-4, 1.0, 50):
        b = prediction_bounds(q)
        assert b.phase_noise_h1_lb > b.hinf_lb


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0


def test_entropy_report():
    r = entropy_report(GOLDEN, 4)
    assert r.hinf_rate == pytest.approx(0.849297, abs=1e-5)
    lo, hi = r.rate_bracket
    assert lo <= hi == pytest.approx(r.h1_rate)
    g = entropy_report(GOLDEN, 4, method="greedy-maxprob")
    assert g.H1 is None and g.h1_rate is None
    assert g.Hinf >= r.Hinf - 1e-9
    assert entropy_report(canonicalize(0.1, 0.6, 0.04), 3).rate_bracket is None
    with pytest.raises(ValueError):
        entropy_report(GOLDEN, 3, method="bogus")


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(0.01, 1.0))
def test_greedy_rate_never_below_exhaustive(f, s2):
    p = canonicalize(f, 0.5, s2)
    assert (entropy_report(p, 8, "greedy-maxprob").Hinf
            >= entropy_report(p, 8).Hinf - 1e-9)
