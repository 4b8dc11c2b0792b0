"""Golden-value checks run by ``rojitter selftest``."""

from __future__ import annotations

from .bitpattern import all_patterns
from .entropy import min_entropy, phase_noise_bound
from .params import canonicalize
from .stepdist import step_extrema

# sigma -> (f_min, f_max)
EXTREMA = {
    0.10: (0.000030, 3.989423),
    0.20: (0.175283, 1.994726),
    0.30: (0.663191, 1.340089),
    0.50: (0.985616, 1.014384),
    0.75: (0.999970, 1.000030),
}
# sigma -> log2 of the deviation from flat
RANGE_EXPONENTS = {
    1.0: -27.47766,
    1.5: -63.07473,
    2.0: -112.9106,
    2.5: -176.9854,
    3.0: -255.2989,
}
# (F, D, sigma2) = (0.15, 1/2, 0.04): n -> (Hinf/n, max p_z, maximizing patterns)
MAXPROB = {
    3: (0.844807, 0.172609, {"000", "111"}),
    4: (0.849297, 0.0949171, {"0000", "1111"}),
    5: (0.846341, 0.0532267, {"00011", "00111", "11000", "11100"}),
}
MAXPROB_PARAMS = (0.15, 0.5, 0.04)


def _row(name, expected, computed, tol):
    ok = abs(computed - expected) <= tol
    return (name, expected, computed, tol, "pass" if ok else "FAIL")


def run_selftest(m: int = 4096) -> list[tuple]:
    """Evaluate every golden check; rows are ``(name, expected, computed, tol, status)``."""
    rows = []
    for sigma, (lo, hi) in EXTREMA.items():
        ex = step_extrema(sigma)
        rows.append(_row(f"f_min sigma={sigma}", lo, ex.f_min, 1e-6))
        rows.append(_row(f"f_max sigma={sigma}", hi, ex.f_max, 1e-6))
    for sigma, e in RANGE_EXPONENTS.items():
        rows.append(_row(f"log2 range sigma={sigma}", e, step_extrema(sigma).log2_max_dev, 0.01))

    params = canonicalize(*MAXPROB_PARAMS)
    for n, (rate, pmax, best) in MAXPROB.items():
        p = all_patterns(params, n, m)
        rows.append(_row(f"Hinf/n n={n}", rate, min_entropy(p) / n, 1e-5))
        rows.append(_row(f"max p n={n}", pmax, float(p.max()), 1e-5))
        argmax = {format(i, f"0{n}b") for i, v in enumerate(p) if abs(v - p.max()) <= 1e-9}
        rows.append(("argmax n=%d" % n, " ".join(sorted(best)), " ".join(sorted(argmax)),
                     0, "pass" if argmax == best else "FAIL"))

    total = float(all_patterns(canonicalize(0.15, 0.5, 0.04), 8, m).sum())
    rows.append(_row("pattern sum n=8", 1.0, total, 1e-7))
    rows.append(_row("phase-noise bound Q=0", 0.4154, phase_noise_bound(0.0), 1e-3))
    rows.append(_row("phase-noise bound Q=1", 1.0, phase_noise_bound(1.0), 1e-12))
    return rows
