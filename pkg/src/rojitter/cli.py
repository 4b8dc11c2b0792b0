"""Command-line front end.

Every subcommand writes CSV or JSON to standard output (or ``--out``) and
diagnostics to standard error. Failures exit nonzero after printing a JSON
object ``{"error": ..., "message": ...}`` to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .autocorr import autocorr_vector, estimate_autocorr
from .bitio import FORMATS, read_bits, write_bits
from .bitpattern import (all_patterns, maxprob_pattern_depthfirst,
                         pattern_from_index, pattern_probability)
from .entropy import METHODS, entropy_report, phase_noise_bound, prediction_bounds
from .fit import fit_params, model_autocorr
from .params import DEFAULT_M, DEFAULT_TAU, canonicalize
from .simulate import SimConfig, simulate
from .stepdist import step_density, step_extrema

log = logging.getLogger("rojitter")

SCAN_COUNT_LIMIT = 10_000


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("usage", message, code=2)


def _fail(kind: str, message: str, code: int = 1):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


# output helpers

def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(obj, out) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", out)


def _emit_csv(header, rows, out) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                    for v in row])
    _emit(buf.getvalue(), out)


def _log2(p: float) -> float | None:
    return math.log2(p) if p > 0 else None


def _params(args):
    return canonicalize(args.f, args.d, args.sigma2)


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if not 0 < lo <= hi:
        raise argparse.ArgumentTypeError("range needs 0 < LO <= HI")
    return lo, hi


# subcommands

def cmd_density(args):
    params = _params(args)
    if args.summary:
        ex = step_extrema(params.sigma, args.tau)
        _emit_json({"sigma": params.sigma, "f_min": ex.f_min, "f_max": ex.f_max,
                    "max_dev": ex.max_dev, "log2_max_dev": ex.log2_max_dev,
                    "m": args.m}, args.out)
        return
    x = np.arange(args.m) / args.m
    _emit_csv(["x", "density"], zip(x, step_density(params, x, args.tau)), args.out)


def cmd_autocorr(args):
    if args.input:
        bits = read_bits(args.input, args.format, args.nbits)
        vec = estimate_autocorr(bits, args.k)
    else:
        if args.sigma2 is None:
            raise CLIError("give --sigma2 (analytic mode) or --input (empirical mode)")
        vec = autocorr_vector(_params(args), args.k, args.tau)
    _emit_csv(["lag", "value"], enumerate(vec.values), args.out)


def cmd_pattern(args):
    res = pattern_probability(_params(args), args.pattern, args.m, args.tau)
    _emit_json({"pattern": res.bits, "probability": res.probability,
                "log2prob": res.log2_probability}, args.out)


def cmd_maxpat(args):
    params = _params(args)
    if args.method == "greedy":
        res = maxprob_pattern_depthfirst(params, args.n, args.m, args.tau)
        obj = {"method": "greedy", "n": args.n, "patterns": [res.bits],
               "probability": res.probability, "log2prob": res.log2_probability,
               "ties": res.ties}
    else:
        p = all_patterns(params, args.n, args.m, args.tau)
        pmax = float(p.max())
        best = np.flatnonzero(p >= pmax * (1.0 - 1e-9))
        obj = {"method": "exhaustive", "n": args.n,
               "patterns": [pattern_from_index(int(i), args.n) for i in best],
               "probability": pmax, "log2prob": _log2(pmax)}
    _emit_json(obj, args.out)


def cmd_entropy(args):
    method = "greedy-maxprob" if args.method == "greedy" else args.method
    rep = entropy_report(_params(args), args.n, method, args.m, args.tau)
    _emit_json({"n": rep.n, "method": rep.method, "h1": rep.H1, "hinf": rep.Hinf,
                "h1_rate": rep.h1_rate, "hinf_rate": rep.hinf_rate,
                "rate_bracket": rep.rate_bracket}, args.out)


def cmd_bounds(args):
    if args.sweep:
        lo, hi = args.sweep
        s2 = np.logspace(math.log10(lo), math.log10(hi), args.count)
    elif args.sigma2 is not None:
        s2 = [args.sigma2]
    else:
        raise CLIError("give --sigma2 or --sweep LO:HI")
    rows = []
    for v in s2:
        b = prediction_bounds(float(v), args.tau)
        rows.append((b.sigma2, b.p_e, b.h1_lb, b.hinf_lb, b.tanh_pe_ub, b.phase_noise_h1_lb))
    _emit_csv(["sigma2", "p_e", "h1_lb", "hinf_lb", "tanh_ub", "phase_noise_lb"], rows, args.out)


def cmd_simulate(args):
    cfg = SimConfig(args.f, args.d, args.sigma2, args.n, args.seed, args.x0, args.burn_in)
    write_bits(simulate(cfg), args.out or "-", args.format)


def cmd_fit(args):
    bits = read_bits(args.input, args.format, args.nbits)
    measured = estimate_autocorr(bits, args.k)
    res = fit_params(measured, args.k, args.tau)
    p = res.params
    _emit_json({
        "f": p.F, "d": p.D, "sigma2": p.sigma2, "residual": res.residual,
        "k_used": res.k_used, "converged": res.converged,
        "sigma2_lower_bound": res.sigma2_lower_bound, "n_bits": int(bits.size),
        "candidates": [{"f": q.F, "d": q.D, "sigma2": q.sigma2, "residual": r}
                       for q, r in res.candidates],
    }, args.out)
    if args.csv:
        model = model_autocorr(p, args.k, args.tau).values
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lag", "measured", "model"])
        for k in range(args.k + 1):
            w.writerow([k, repr(float(measured[k])), repr(float(model[k]))])
        Path(args.csv).write_text(buf.getvalue(), encoding="utf-8")


def scan_row(sigma2: float, F: float, n: int, m: int, tau: float) -> tuple:
    """One comparison point: greedy min-entropy rate against the bound curves."""
    params = canonicalize(F, 0.5, sigma2)
    greedy = maxprob_pattern_depthfirst(params, n, m, tau)
    b = prediction_bounds(sigma2, tau)
    return (sigma2, F, -greedy.log2_probability / n, b.hinf_lb, b.h1_lb,
            phase_noise_bound(sigma2))


def scan_points(lo: float, hi: float, count: int, f_mode: str, seed: int,
                f_cells: int = 8) -> list[tuple[float, float]]:
    s2 = np.logspace(math.log10(lo), math.log10(hi), count)
    if f_mode == "random":
        F = np.random.default_rng(seed).uniform(0.0, 0.5, count)
        return list(zip(s2.tolist(), F.tolist()))
    grid = np.linspace(0.0, 0.5, f_cells)
    return [(float(v), float(f)) for v in s2 for f in grid]


def cmd_scan(args):
    if args.count > SCAN_COUNT_LIMIT and not args.force:
        raise CLIError(f"--count above {SCAN_COUNT_LIMIT} needs --force")
    points = scan_points(*args.sigma2_range, args.count, args.f_mode, args.seed,
                         args.f_cells)
    ns, ms, taus = [args.n] * len(points), [args.m] * len(points), [args.tau] * len(points)
    s2s, Fs = [p[0] for p in points], [p[1] for p in points]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(scan_row, s2s, Fs, ns, ms, taus, chunksize=8))
    else:
        rows = list(map(scan_row, s2s, Fs, ns, ms, taus))
    _emit_csv(["sigma2", "F", "hinf_rate_greedy", "hinf_lb", "h1_lb", "phase_noise_lb"],
              rows, args.out)
    if args.emit_dir:
        # raw samples for an external min-entropy estimator
        d = Path(args.emit_dir)
        d.mkdir(parents=True, exist_ok=True)
        for i, (v, f) in enumerate(points):
            bits = simulate(SimConfig(f, 0.5, v, args.sim_bits, args.seed + i))
            write_bits(bits, d / f"scan_{i:05d}.bin", "byteper")
        log.info("wrote %d sample files to %s", len(points), d)


def cmd_selftest(args):
    from .selftest import run_selftest
    rows = run_selftest()
    _emit_csv(["check", "expected", "computed", "tolerance", "status"], rows, args.out)
    failed = [r[0] for r in rows if r[4] != "pass"]
    if failed:
        raise CLIError(f"{len(failed)} self-test checks failed: {', '.join(failed)}")


# parser

def _add_params(p, required=True, f_required=None):
    f_required = required if f_required is None else f_required
    p.add_argument("--f", type=float, default=None if f_required else 0.0,
                   required=f_required, help="relative frequency F (any real)")
    p.add_argument("--d", type=float, default=0.5,
                   help="duty cycle D in (0, 1) (default 0.5)")
    p.add_argument("--sigma2", type=float, required=required,
                   help="per-sample jitter variance")


def _add_grid(p):
    p.add_argument("--m", type=int, default=DEFAULT_M, help="grid size (power of two)")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU, help="tailcut in sigmas")


def _add_bitfile(p, required):
    p.add_argument("--input", required=required, help="bit file ('-' for stdin)")
    p.add_argument("--format", choices=FORMATS, default="byteper")
    p.add_argument("--nbits", type=int, help="bit count for packed input")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rojitter", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("density", help="step density on the grid, or its extrema")
    _add_params(p, f_required=False)
    _add_grid(p)
    p.add_argument("--summary", action="store_true", help="print extrema as JSON")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("autocorr", help="analytic or measured autocorrelation")
    _add_params(p, required=False)
    _add_grid(p)
    _add_bitfile(p, required=False)
    p.add_argument("--k", type=int, default=8, help="largest lag")
    p.set_defaults(func=cmd_autocorr)

    p = sub.add_parser("pattern", help="probability of one bit pattern")
    _add_params(p)
    _add_grid(p)
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("maxpat", help="most likely n-bit pattern")
    _add_params(p)
    _add_grid(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("greedy", "exhaustive"), default="greedy")
    p.set_defaults(func=cmd_maxpat)

    p = sub.add_parser("entropy", help="entropy of n-bit patterns")
    _add_params(p)
    _add_grid(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("exhaustive", "greedy") + METHODS[1:],
                   default="exhaustive")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("bounds", help="jitter-only entropy bounds")
    p.add_argument("--sigma2", type=float)
    p.add_argument("--sweep", type=_range, help="log-spaced sigma2 range LO:HI")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="simulate a bit stream")
    _add_params(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x0", type=float)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--format", choices=FORMATS, default="byteper")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit (F, D, sigma2) to a measured stream")
    _add_bitfile(p, required=True)
    p.add_argument("--k", type=int, default=8, help="lags used in the fit")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--csv", help="also write measured-vs-model autocorrelation CSV here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scan", help="greedy min-entropy against bounds over sigma2")
    p.add_argument("--sigma2-range", type=_range, default=(1e-4, 1.0))
    p.add_argument("--f-mode", choices=("random", "grid"), default="random")
    p.add_argument("--f-cells", type=int, default=8, help="F values per sigma2 in grid mode")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--force", action="store_true")
    p.add_argument("--emit-dir", help="write simulated byteper samples here")
    p.add_argument("--sim-bits", type=int, default=1_000_000)
    _add_grid(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("selftest", help="check golden values")
    p.set_defaults(func=cmd_selftest)

    for sp in sub.choices.values():
        sp.add_argument("--out", help="output file (default stdout)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (CLIError, ValueError, ArithmeticError, OSError) as exc:
        _fail(type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
