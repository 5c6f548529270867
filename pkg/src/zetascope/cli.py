"""Command-line front end; every subcommand writes one CSV table.

Columns per subcommand:

    primes      index, prime
    zero, scan  n, t, n_primes, delta, predicted_error, residual, iterations
    tilde       n, tilde_t
    rn          t, n_primes, abs_direct, abs_estimate
    argscan     t, n_primes, a_exact, a_euler
    deltastats  bin_lo, bin_hi, center, count, density, normal_density
                (with --summary: count, mean, stddev, chi2_pvalue, ks_pvalue)
    paircorr    u, empirical, gue
    kac         n_primes, T, samples, seed, mean, variance, chi2_pvalue, ks_pvalue
    smooth      n

Solved zeros are also appended, with run time and configuration, to a
results ledger (``results.csv`` in the cache directory unless --ledger is
given).  Exit status: 0 on success, 2 on bad usage, 1 when a computation fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .eulerprod import a_euler_scan, r_n_estimate
from .hpnum import HComplex, HReal, PrecisionPolicy
from .primes import MAX_COUNT, cache_dir, cached_primes, enumerate_smooth
from .refzeta import a_exact, r_n_direct
from .solver import SolveConfig, ZeroResult, parse_index, scan_zeros, solve_zero, tilde_t
from .stats import (
    delta_stats,
    kac_experiment,
    load_zeros,
    pair_correlation,
    sample_model_zeros,
)

log = logging.getLogger("zetascope")

LEDGER_COLUMNS = ["timestamp", "version", "n", "t", "n_primes", "delta", "working_digits",
                  "predicted_error", "residual", "iterations", "seconds"]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    n_primes: int = 5_000_000
    delta: float = 1e-6
    fraction_digits: int = 10
    seed: int = 0
    workers: int = 1
    output: str | None = None
    cache: Path | None = None
    ledger: Path | None = None

    def precision(self) -> PrecisionPolicy:
        return PrecisionPolicy(target_fractional_digits=max(12, self.fraction_digits + 2))

    def cache_directory(self) -> Path:
        return self.cache or cache_dir()

    def ledger_path(self) -> Path:
        return self.ledger or self.cache_directory() / "results.csv"


def num(x) -> str:
    """Shortest round-trip decimal of a float (or a plain integer)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _positive_int(text: str) -> int:
    try:
        v = parse_index(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _index(text: str) -> int:
    return _positive_int(text)


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return v


def _float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return v


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if hi < lo:
        raise UsageError("--tmax must not be below --tmin")
    k = int(math.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(k + 1)


def _zero_row(r: ZeroResult, digits: int) -> list[str]:
    return [str(r.n), r.t.fixed(digits), str(r.n_primes), num(r.delta), num(r.predicted_error),
            num(r.residual), str(r.iterations)]


ZERO_HEADER = ["n", "t", "n_primes", "delta", "predicted_error", "residual", "iterations"]


def _append_ledger(cfg: RunConfig, results: list[ZeroResult], digits: int):
    path = cfg.ledger_path()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fresh = not path.exists()
        with open(path, "a", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if fresh:
                w.writerow(LEDGER_COLUMNS)
            stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
            for r in results:
                w.writerow([stamp, __version__, r.n, r.t.fixed(digits), r.n_primes, num(r.delta),
                            cfg.precision().digits_for(r.t), num(r.predicted_error), num(r.residual),
                            r.iterations, f"{r.seconds:.3f}"])
    except OSError as exc:
        log.warning("could not append to results ledger %s: %s", path, exc)


def cmd_primes(args, cfg):
    if args.count > MAX_COUNT:
        raise UsageError(f"--count is limited to {MAX_COUNT}")
    table = cached_primes(args.count, cfg.cache_directory())
    rows = ([i + 1, int(p)] for i, p in enumerate(table.primes))
    return ["index", "prime"], rows


def _solve_config(args, cfg) -> SolveConfig:
    return SolveConfig(delta=cfg.delta, n_primes=cfg.n_primes, precision=cfg.precision(),
                       workers=cfg.workers, allow_low=getattr(args, "allow_low", False))


def _prime_table(cfg):
    return cached_primes(cfg.n_primes, cfg.cache_directory())


def cmd_zero(args, cfg):
    result = solve_zero(args.n, _solve_config(args, cfg), _prime_table(cfg), progress=True)
    _append_ledger(cfg, [result], cfg.fraction_digits)
    return ZERO_HEADER, [_zero_row(result, cfg.fraction_digits)]


def cmd_scan(args, cfg):
    results = scan_zeros(args.n_from, args.count, _solve_config(args, cfg), _prime_table(cfg), progress=True)
    _append_ledger(cfg, results, cfg.fraction_digits)
    return ZERO_HEADER, [_zero_row(r, cfg.fraction_digits) for r in results]


def cmd_tilde(args, cfg):
    rows = ([n, tilde_t(n).fixed(cfg.fraction_digits)] for n in range(args.n_from, args.n_from + args.count))
    return ["n", "tilde_t"], rows


def cmd_rn(args, cfg):
    if not 0.5 < args.sigma < 1:
        raise UsageError("--sigma must lie in (1/2, 1)")
    ts = _grid(args.tmin, args.tmax, args.step)
    if ts[0] < 4:
        raise UsageError("--tmin must be >= 4 so that [t^2] >= 16")
    need = int(math.floor(ts[-1] ** 2))
    cap = args.primes or need
    table = cached_primes(min(need, cap), cfg.cache_directory())
    rows = []
    for t in ts:
        n = min(int(math.floor(t * t)), cap)
        s = HComplex(HReal.of(args.sigma), HReal.of(float(t)))
        direct = abs(complex(r_n_direct(s, table, n, digits=15)))
        estimate = abs(complex(r_n_estimate(s, n)))
        rows.append([num(t), n, num(direct), num(estimate)])
    return ["t", "n_primes", "abs_direct", "abs_estimate"], rows


def cmd_argscan(args, cfg):
    ts = _grid(args.tmin, args.tmax, args.step)
    table = cached_primes(args.primes, cfg.cache_directory())
    euler = a_euler_scan(ts, args.delta, table, args.primes, enforce_cap=not args.no_cap)
    rows = []
    for t, ae in zip(ts, euler):
        n = args.primes if args.no_cap else min(args.primes, int(math.floor(t * t)))
        rows.append([num(t), n, num(float(a_exact(float(t), args.delta))), num(ae)])
    return ["t", "n_primes", "a_exact", "a_euler"], rows


def cmd_deltastats(args, cfg):
    st = delta_stats(load_zeros(args.zeros_file))
    if args.summary:
        return (["count", "mean", "stddev", "mean_abs", "chi2_pvalue", "ks_pvalue"],
                [[st.count, num(st.mean), num(st.stddev), num(st.mean_abs), num(st.fit_pvalue), num(st.ks_pvalue)]])
    width = st.bin_edges[1] - st.bin_edges[0]
    centers = st.bin_centers
    normal = np.exp(-0.5 * ((centers - st.mean) / st.stddev) ** 2) / (st.stddev * math.sqrt(2 * math.pi))
    rows = [[num(lo), num(hi), num(c), int(k), num(k / (st.count * width)), num(g)]
            for lo, hi, c, k, g in zip(st.bin_edges[:-1], st.bin_edges[1:], centers, st.counts, normal)]
    return ["bin_lo", "bin_hi", "center", "count", "density", "normal_density"], rows


def cmd_paircorr(args, cfg):
    if args.model == bool(args.zeros_file):
        raise UsageError("paircorr needs exactly one of --zeros-file or --model")
    if args.model:
        zeros = sample_model_zeros(args.count, args.sigma, cfg.seed)
    else:
        zeros = load_zeros(args.zeros_file)
    pc = pair_correlation(zeros, args.alpha_max, args.width)
    rows = [[num(u), num(e), num(g)] for u, e, g in zip(pc.centers, pc.empirical, pc.gue)]
    return ["u", "empirical", "gue"], rows


def cmd_kac(args, cfg):
    table = cached_primes(args.primes, cfg.cache_directory())
    st = kac_experiment(args.primes, args.t, args.samples, cfg.seed, table=table)
    return (["n_primes", "T", "samples", "seed", "mean", "variance", "chi2_pvalue", "ks_pvalue"],
            [[args.primes, num(args.t), args.samples, cfg.seed, num(st.mean), num(st.variance),
              num(st.fit_pvalue), num(st.ks_pvalue)]])


def cmd_smooth(args, cfg):
    if args.limit > 10 ** 9:
        raise UsageError("--limit is capped at 1e9")
    return ["n"], ([m] for m in enumerate_smooth(args.gens, args.limit))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", "-o", help="write the CSV here instead of standard output")
    common.add_argument("--cache-dir", type=Path, help="prime cache directory (default $ZETASCOPE_CACHE)")
    common.add_argument("--ledger", type=Path, help="results ledger CSV for solved zeros")
    common.add_argument("--digits", type=int, default=10, help="fractional digits printed for ordinates")
    common.add_argument("--workers", type=int, default=1, help="threads for prime sums")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="zetascope", description="Riemann zeros and zero statistics from primes.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("primes", parents=[common], help="first N primes (and cache them)")
    p.add_argument("--count", type=_positive_int, required=True)
    p.set_defaults(func=cmd_primes)

    for name, helptext in (("zero", "one zero ordinate from primes"), ("scan", "consecutive zeros")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "zero":
            p.add_argument("--n", type=_index, required=True, help="index: 123, 1e21, 10^100, 10^22-1")
        else:
            p.add_argument("--from", dest="n_from", type=_index, required=True)
            p.add_argument("--count", type=_positive_int, required=True)
        p.add_argument("--primes", type=_positive_int, default=5_000_000)
        p.add_argument("--delta", type=_positive_float, default=1e-6)
        p.add_argument("--allow-low", action="store_true", help="permit n < 1e5 (inaccurate)")
        p.set_defaults(func=cmd_zero if name == "zero" else cmd_scan)

    p = sub.add_parser("tilde", parents=[common], help="Lambert-W estimates of zero ordinates")
    p.add_argument("--from", dest="n_from", type=_index, required=True)
    p.add_argument("--count", type=_positive_int, required=True)
    p.set_defaults(func=cmd_tilde)

    p = sub.add_parser("rn", parents=[common], help="Euler product truncation error, measured and estimated")
    p.add_argument("--sigma", type=_float, required=True)
    p.add_argument("--tmin", type=_positive_float, required=True)
    p.add_argument("--tmax", type=_positive_float, required=True)
    p.add_argument("--step", type=_positive_float, default=1.0)
    p.add_argument("--primes", type=_positive_int, help="cap on N (default [t^2])")
    p.set_defaults(func=cmd_rn)

    p = sub.add_parser("argscan", parents=[common], help="a(t) from zeta and from primes on a grid")
    p.add_argument("--tmin", type=_positive_float, required=True)
    p.add_argument("--tmax", type=_positive_float, required=True)
    p.add_argument("--delta", type=_positive_float, required=True)
    p.add_argument("--primes", type=_positive_int, required=True)
    p.add_argument("--step", type=_positive_float, default=0.1)
    p.add_argument("--no-cap", action="store_true", help="do not clip N to [t^2]")
    p.set_defaults(func=cmd_argscan)

    p = sub.add_parser("deltastats", parents=[common], help="distribution of normalised zero fluctuations")
    p.add_argument("--zeros-file", required=True)
    p.add_argument("--summary", action="store_true", help="one summary row instead of the histogram")
    p.set_defaults(func=cmd_deltastats)

    p = sub.add_parser("paircorr", parents=[common], help="pair correlation histogram against GUE")
    p.add_argument("--zeros-file")
    p.add_argument("--model", action="store_true", help="use Gaussian model zeros")
    p.add_argument("--count", type=_positive_int, default=100_000)
    p.add_argument("--sigma", type=_float, default=0.274)
    p.add_argument("--alpha-max", type=_positive_float, default=3.0)
    p.add_argument("--width", type=_positive_float, default=0.05)
    p.set_defaults(func=cmd_paircorr)

    p = sub.add_parser("kac", parents=[common], help="B_N(u)/sqrt(N) for random u in [T, 2T]")
    p.add_argument("--primes", type=_positive_int, required=True)
    p.add_argument("--t", type=_positive_float, required=True)
    p.add_argument("--samples", type=_positive_int, required=True)
    p.set_defaults(func=cmd_kac)

    p = sub.add_parser("smooth", parents=[common], help="integers built from the first N primes")
    p.add_argument("--gens", type=int, required=True)
    p.add_argument("--limit", type=_positive_int, required=True)
    p.set_defaults(func=cmd_smooth)
    return ap


def _write(header, rows, out: str | None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.digits < 0 or args.digits > 40:
        parser.print_usage(sys.stderr)
        print("zetascope: error: --digits must be in [0, 40]", file=sys.stderr)
        return 2
    if args.workers < 1:
        parser.print_usage(sys.stderr)
        print("zetascope: error: --workers must be >= 1", file=sys.stderr)
        return 2
    cache = args.cache_dir or (Path(os.environ["ZETASCOPE_CACHE"]) if os.environ.get("ZETASCOPE_CACHE") else None)
    cfg = RunConfig(
        n_primes=getattr(args, "primes", None) or 5_000_000,
        delta=getattr(args, "delta", 1e-6),
        fraction_digits=args.digits,
        seed=args.seed,
        workers=args.workers,
        output=args.out,
        cache=cache,
        ledger=args.ledger,
    )
    started = time.perf_counter()
    try:
        header, rows = args.func(args, cfg)
        _write(header, rows, cfg.output)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"zetascope {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"zetascope {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, OSError, RuntimeError) as exc:
        print(f"zetascope {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    log.info("%s finished in %.1fs", args.command, time.perf_counter() - started)
    return 0


if __name__ == "__main__":
    sys.exit(main())
