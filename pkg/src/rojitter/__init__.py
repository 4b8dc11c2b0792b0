"""Entropy, autocorrelation and bit-pattern analysis of sampled ring oscillators.

The source model is a phase walk on the unit circle,
``x_i = (x_{i-1} + N(F, sigma2)) mod 1``, sampled as ``z_i = [x_i < D]``.
"""

__version__ = "0.1.0"

from .autocorr import (AutocorrVector, PairProbs, c_k, estimate_autocorr,
                       pair_probs, s1)
from .bitpattern import (PatternResult, all_patterns, chop_masks,
                         maxprob_pattern_depthfirst, pattern_probability,
                         peak_path_pattern)
from .entropy import (EntropyReport, LowerBounds, entropy_rate_chain, entropy_report,
                      max_entropy, min_entropy, phase_noise_bound, prediction_bounds,
                      shannon_entropy)
from .fit import FitResult, fit_params, model_autocorr
from .params import (DegenerateSourceError, GridDensity, SourceParams, as_bits,
                     canonicalize)
from .simulate import SimConfig, simulate, simulate_runs, simulate_with_phases
from .stepdist import StepExtrema, step_density, step_extrema, step_grid

__all__ = [
    "AutocorrVector", "DegenerateSourceError", "EntropyReport", "FitResult",
    "GridDensity", "LowerBounds", "PairProbs", "PatternResult", "SimConfig",
    "SourceParams", "StepExtrema", "all_patterns", "as_bits", "c_k", "canonicalize", "chop_masks", "entropy_rate_chain", "entropy_report",
    "estimate_autocorr", "fit_params", "max_entropy", "maxprob_pattern_depthfirst",
    "min_entropy", "model_autocorr", "pair_probs", "pattern_probability",
    "peak_path_pattern", "phase_noise_bound", "prediction_bounds", "s1", "shannon_entropy", "simulate",
    "simulate_runs", "simulate_with_phases", "step_density", "step_extrema", "step_grid",
]
