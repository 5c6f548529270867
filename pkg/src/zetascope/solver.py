"""Riemann zeros from primes alone.

The n-th ordinate solves

    theta(t) + pi * a_N(t) = (n - 3/2) pi,

theta being the three-term Stirling series and a_N the argument computed from
the first N primes just right of the critical line.  The Lambert-W value
tilde_t(n) (no primes) seeds a quasi-Newton iteration driven by theta' alone.
"""

from __future__ import annotations

import logging
import math
import re
import time
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from .eulerprod import TruncationPolicy, arg_sum
from .hpnum import (
    ConvergenceError,
    DomainError,
    HReal,
    PrecisionPolicy,
    integer_digits,
    lambert_w0,
)
from .phases import PhaseBank
from .primes import PrimeTable, generate_primes

log = logging.getLogger(__name__)

MIN_INDEX = 10 ** 5
MAX_ITERATIONS = 60
STEP_TOL = 1e-10
RESIDUAL_TOL = 1e-8 * math.pi
BANK_REUSE_RADIUS = 1.0e3


class PrecisionError(ArithmeticError):
    pass


class NoRootError(ArithmeticError):
    pass


class ZeroSolveError(RuntimeError):
    def __init__(self, n: int, cause: Exception):
        super().__init__(f"zero n={n}: {cause}")
        self.n = n
        self.cause = cause


_INDEX_RE = re.compile(
    r"^\s*(?P<base>\d+(?:\.\d*)?(?:[eE]\d+)?|\d+\s*(?:\^|\*\*)\s*\d+)\s*(?P<off>[+-]\s*\d+)?\s*$"
)


def parse_index(text) -> int:
    """Zero index from '123', '1e21', '10^100' or '10**22', optionally '+k' / '-k'."""
    if isinstance(text, int):
        return text
    m = _INDEX_RE.match(str(text))
    if not m:
        raise ValueError(f"cannot parse zero index {text!r}")
    base = m.group("base").replace(" ", "")
    if "^" in base or "**" in base:
        b, e = re.split(r"\^|\*\*", base)
        value = int(b) ** int(e)
    elif "e" in base.lower():
        mant, exp = base.lower().split("e")
        whole, _, frac = mant.partition(".")
        exp = int(exp)
        if len(frac.rstrip("0")) > exp:
            raise ValueError(f"zero index {text!r} is not an integer")
        value = int((whole + frac).lstrip("0") or "0") * 10 ** (exp - len(frac))
    else:
        whole, _, frac = base.partition(".")
        if frac.strip("0"):
            raise ValueError(f"zero index {text!r} is not an integer")
        value = int(whole)
    if m.group("off"):
        value += int(m.group("off").replace(" ", ""))
    return value


@dataclass(frozen=True)
class SolveConfig:
    delta: float = 1e-6
    n_primes: int = 5_000_000
    bracket_halfwidth: float = 5.0
    precision: PrecisionPolicy = field(default_factory=PrecisionPolicy)
    workers: int = 1
    allow_low: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be > 0")
        if self.n_primes < 1:
            raise ValueError("n_primes must be >= 1")
        if self.bracket_halfwidth <= 0:
            raise ValueError("bracket_halfwidth must be > 0")


@dataclass(frozen=True)
class ZeroResult:
    n: int
    t: HReal
    n_primes: int
    delta: HReal
    predicted_error: HReal
    residual: HReal
    iterations: int
    seconds: float = 0.0

    def fraction(self, digits: int = 3) -> str:
        return self.t.fixed(digits).split(".")[1]


def tilde_t(n, digits: int | None = None) -> HReal:
    """2 pi (n - 11/8) / W((n - 11/8) / e): zero of the smooth theta equation."""
    n = parse_index(n)
    if n < 1:
        raise DomainError("tilde_t needs n >= 1")
    d = digits or (len(str(n)) + 30)
    with mpmath.workdps(d + 10):
        x = mpf(n) - mpf(11) / 8
        w = lambert_w0(x / mpmath.e, d + 10).value
        return HReal(2 * mpmath.pi * x / w, d)


def mean_spacing(t) -> float:
    """2 pi / log(t / 2 pi)."""
    return 2 * math.pi / float(mpmath.log(mpf(t) / (2 * mpmath.pi)))


def error_estimate(n, n_primes: int) -> HReal:
    """Envelope (2 pi / log n) / (pi sqrt(log N)) of |t_n - t_{n;N}|."""
    n = parse_index(n)
    if n < MIN_INDEX:
        raise DomainError(f"error_estimate is asymptotic; needs n >= {MIN_INDEX}")
    if n_primes < 16:
        raise DomainError("error_estimate needs n_primes >= 16")
    with mpmath.workdps(40):
        spacing = 2 * mpmath.pi / mpmath.log(n)
        return HReal(spacing / (mpmath.pi * mpmath.sqrt(mpmath.log(n_primes))), 30)


class _BankCache:
    """Phase banks are expensive (one high-precision log per prime); reuse nearby ones."""

    def __init__(self, maxsize: int = 2):
        self.maxsize = maxsize
        self.items: list[PhaseBank] = []

    def get(self, t, table: PrimeTable, n: int, progress: bool = False) -> PhaseBank:
        with mpmath.workdps(integer_digits(t) + 10):
            offsets = [abs(float(mpf(t) - bank.t0)) for bank in self.items]
        for bank, offset in zip(self.items, offsets):
            if (bank.n >= n and offset <= BANK_REUSE_RADIUS
                    and bank.primes[: min(n, 8)].tolist() == table.primes[: min(n, 8)].tolist()):
                return bank.head(n) if bank.n > n else bank
        with mpmath.workdps(integer_digits(t) + 10):
            base = mpmath.ldexp(mpmath.nint(mpmath.ldexp(mpf(t), 10)), -10)
        started = time.perf_counter()
        bank = PhaseBank(base, table, n, progress=progress)
        log.info("phase bank at t0=%s over %d primes built in %.1fs",
                 mpmath.nstr(base, 12), n, time.perf_counter() - started)
        self.items.insert(0, bank)
        del self.items[self.maxsize:]
        return bank

    def clear(self):
        self.items.clear()


BANKS = _BankCache()


def _equation(n: int, bank: PhaseBank, sigma: float, n_used: int, digits: int, workers: int):
    with mpmath.workdps(digits):
        target = (mpf(n) - mpf(3) / 2) * mpmath.pi

    def smooth(h: float) -> float:
        with mpmath.workdps(digits):
            t = bank.t0 + mpf(h)
            theta = t / 2 * mpmath.log(t / (2 * mpmath.pi * mpmath.e)) - mpmath.pi / 8 + 1 / (48 * t)
            return float(theta - target)

    def F(h: float) -> float:
        return smooth(h) + math.pi * arg_sum(bank, sigma, h, n_used, workers)

    return F


def solve_zero(n, config: SolveConfig | None = None, table: PrimeTable | None = None,
               progress: bool = False) -> ZeroResult:
    """Ordinate t_{n;N} of the n-th zero from the first N primes."""
    config = config or SolveConfig()
    n = parse_index(n)
    if n < 1 or (n < MIN_INDEX and not config.allow_low):
        raise DomainError(f"solve_zero works in the asymptotic regime n >= {MIN_INDEX}; got {n}")
    started = time.perf_counter()
    seed = tilde_t(n)
    digits = config.precision.digits_for(seed)
    with mpmath.workdps(digits):
        seed = HReal(seed.value, digits)
        needed = integer_digits((mpf(n) - 1.5) * mpmath.pi) + 10
    if digits < needed:
        raise PrecisionError(f"{digits} working digits cannot resolve theta(t) - (n - 3/2) pi")

    n_used = TruncationPolicy(config.n_primes).effective(seed)
    if table is None or table.count < n_used:
        table = generate_primes(n_used)
    bank = BANKS.get(seed.value, table, n_used, progress=progress)
    sigma = 0.5 + config.delta
    F = _equation(n, bank, sigma, n_used, digits, config.workers)

    with mpmath.workdps(digits):
        h = float(seed.value - bank.t0)
        slope = float(mpmath.log(seed.value / (2 * mpmath.pi))) / 2
    width = config.bracket_halfwidth * mean_spacing(seed.value)
    lo_lim, hi_lim = h - width, h + width
    neg, pos = None, None
    theta_slope = slope
    f = F(h)
    iterations = 0
    converged = False
    while iterations < MAX_ITERATIONS:
        iterations += 1
        # the latest points of each sign always enclose a root
        if f < 0:
            neg = h
        else:
            pos = h
        if abs(f) < RESIDUAL_TOL:
            converged = True
            break
        h_new = h - f / slope
        if neg is not None and pos is not None:
            a, b = min(neg, pos), max(neg, pos)
            if not a < h_new < b:
                h_new = 0.5 * (a + b)
        h_new = min(max(h_new, lo_lim), hi_lim)
        if h_new == h:
            break
        f_new = F(h_new)
        secant = (f_new - f) / (h_new - h)
        # secant refinement of theta' stays positive and within a sane band
        if 0.1 * theta_slope < secant < 10 * theta_slope:
            slope = secant
        step = abs(h_new - h)
        h, f = h_new, f_new
        if step < STEP_TOL:
            converged = abs(f) < RESIDUAL_TOL
            break
    if not converged:
        h, f, extra = _bisect_fallback(F, lo_lim, hi_lim, neg, pos)
        iterations += extra
    with mpmath.workdps(digits):
        t = HReal(bank.t0 + mpf(h), digits)
    return ZeroResult(
        n=n,
        t=t,
        n_primes=n_used,
        delta=HReal.of(config.delta),
        predicted_error=error_estimate(n, n_used) if n >= MIN_INDEX and n_used >= 16 else HReal(mpf("nan")),
        residual=HReal(mpf(abs(f))),
        iterations=iterations,
        seconds=time.perf_counter() - started,
    )


def _bisect_fallback(F, lo, hi, neg, pos):
    """Bisection on a sign-change bracket inside [lo, hi]; widened once on failure."""
    evals = 0
    if neg is None or pos is None:
        found = None
        centre, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        for widen in (1.0, 2.0):
            grid = [centre + half * widen * (k / 20 - 1) for k in range(41)]
            vals = [F(x) for x in grid]
            evals += len(grid)
            for (x0, f0), (x1, f1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
                if f0 == 0:
                    return x0, f0, evals
                if (f0 < 0) != (f1 < 0):
                    found = (x0, x1) if f0 < 0 else (x1, x0)
                    break
            if found:
                break
        if not found:
            raise NoRootError("no sign change of the zero equation inside the bracket")
        neg, pos = found
    for _ in range(200):
        mid = 0.5 * (neg + pos)
        f = F(mid)
        evals += 1
        if abs(f) < RESIDUAL_TOL or abs(pos - neg) < STEP_TOL:
            return mid, f, evals
        if f < 0:
            neg = mid
        else:
            pos = mid
    raise ConvergenceError("bisection did not reach the residual tolerance")


def scan_zeros(n_from, count: int, config: SolveConfig | None = None,
               table: PrimeTable | None = None, progress: bool = False) -> list[ZeroResult]:
    """Consecutive zeros n_from, n_from + 1, ..., sharing one phase bank."""
    if count < 1 or count > 10 ** 4:
        raise ValueError("count must be in [1, 10^4]")
    n_from = parse_index(n_from)
    out = []
    for n in range(n_from, n_from + count):
        try:
            out.append(solve_zero(n, config, table, progress=progress))
        except (ArithmeticError, ValueError) as exc:
            raise ZeroSolveError(n, exc) from exc
    return out
