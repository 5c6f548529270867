"""Prime sums: truncated Euler products, B_N(t), the truncation error and a(t) from primes."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mpc, mpf

from .hpnum import (
    DEFAULT_DIGITS,
    DomainError,
    HComplex,
    HReal,
    exp_integral_ei,
)
from .phases import CHUNK, PhaseBank, chunked_sum
from .primes import MAX_COUNT, PrimeTable

log = logging.getLogger(__name__)

PRACTICAL_PRIME_CAP = MAX_COUNT


class PoleError(ArithmeticError):
    pass


def truncation_cap(t, warn: bool = True) -> int:
    """Integer part of t^2, limited to the practical cap of 1e8 primes."""
    tv = HReal.of(t).value
    if tv <= 1:
        raise DomainError("truncation_cap requires t > 1")
    with mpmath.workdps(max(60, 2 * len(str(int(tv))) + 10)):
        cap = int(mpmath.floor(tv * tv))
    if cap > PRACTICAL_PRIME_CAP:
        if warn:
            warnings.warn(f"[t^2] = {cap:.3e} exceeds the practical cap; using {PRACTICAL_PRIME_CAP} primes",
                          stacklevel=2)
        return PRACTICAL_PRIME_CAP
    return cap


@dataclass(frozen=True)
class TruncationPolicy:
    """N(t) = min(requested, [t^2], practical cap)."""

    requested: int | None = None

    def effective(self, t, available: int | None = None) -> int:
        n = truncation_cap(t, warn=False)
        if self.requested is not None:
            n = min(n, self.requested)
        if available is not None:
            n = min(n, available)
        return n


def _check_n(table: PrimeTable, n: int):
    if n < 0 or n > table.count:
        raise ValueError(f"need 0 <= n <= {table.count}, got {n}")


def b_n_series(t, table: PrimeTable, n: int) -> HReal:
    """B_N(t) = sum_{k<=N} cos(t log p_k)."""
    _check_n(table, n)
    tv = HReal.of(t)
    bank = PhaseBank(tv.value, table, n)
    total = chunked_sum(lambda lo, hi: np.cos(bank.angles(0.0, lo, hi)).sum(), n)
    return HReal(mpf(total), tv.digits)


def b_n_samples(us: np.ndarray, table: PrimeTable, n: int, block: int = 256) -> np.ndarray:
    """B_N(u) for many moderate heights u at once (float64 phases)."""
    _check_n(table, n)
    us = np.asarray(us, dtype=np.float64)
    if us.size and float(np.max(np.abs(us))) * float(table.log_floats()[n - 1]) > 1e9:
        raise DomainError("b_n_samples is for moderate u; use b_n_series for large heights")
    logp = table.log_floats()[:n]
    out = np.empty(us.size)
    for lo in range(0, us.size, block):
        u = us[lo : lo + block]
        out[lo : lo + u.size] = np.cos(np.outer(u, logp)).sum(axis=1)
    return out


def b_n_pnt_estimate(t, table: PrimeTable, n: int, method: str = "sine") -> HReal:
    """Prime-number-theorem estimate of B_N(t).

    ``method="sine"``: (p_N / log p_N) * t/(1+t^2) * sin(t log p_N).
    ``method="ei"``:   Re Ei((1 + i t) log p_N).
    """
    _check_n(table, n)
    tv = HReal.of(t)
    if tv.value < 10 or n < 100:
        raise DomainError("b_n_pnt_estimate needs t >= 10 and n >= 100")
    d = tv.digits
    pN = int(table.primes[n - 1])
    with mpmath.workdps(d + 10):
        L = mpmath.log(pN)
        if method == "sine":
            v = pN / L * tv.value / (1 + tv.value ** 2) * mpmath.sin(tv.value * L)
        elif method == "ei":
            v = exp_integral_ei(mpc(1, tv.value) * L, d).re.value
        else:
            raise ValueError(f"unknown method {method!r}")
        return HReal(v, d)


def _term_factors(s, table: PrimeTable, n: int, d: int):
    with mpmath.workdps(d + 10):
        sv = s.value
        for p in table.primes[:n]:
            yield mpmath.power(int(p), -sv)


def _check_s(s: HComplex):
    if s.re.value <= 0:
        raise DomainError("Euler product over first N primes requires Re(s) > 0")


def log_zeta_n(s, table: PrimeTable, n: int, digits: int | None = None) -> HComplex:
    """-sum_{k<=N} log(1 - p_k^-s), each term on the principal branch.

    ``digits <= 15`` takes a vectorised float64 path (phases still reduced
    exactly when t is large).
    """
    _check_n(table, n)
    s = HComplex.of(s)
    _check_s(s)
    d = digits or s.digits
    if d <= 15:
        sigma = float(s.re.value)
        bank = PhaseBank(s.im.value, table, n)

        def chunk(lo, hi):
            r = np.exp(-sigma * bank.logp[lo:hi])
            th = bank.angles(0.0, lo, hi)
            z = r * np.exp(-1j * th)
            if np.any(np.abs(1 - z) < 1e-15):
                raise PoleError("|1 - p^-s| underflows at double precision")
            return -np.log1p(-z).sum()

        re = chunked_sum(lambda lo, hi: chunk(lo, hi).real, n)
        im = chunked_sum(lambda lo, hi: chunk(lo, hi).imag, n)
        return HComplex(HReal(mpf(re), DEFAULT_DIGITS), HReal(mpf(im), DEFAULT_DIGITS))
    with mpmath.workdps(d + 10):
        tiny = mpf(10) ** (-d)
        terms = []
        for z in _term_factors(s, table, n, d):
            w = 1 - z
            if abs(w) < tiny:
                raise PoleError("|1 - p^-s| below working precision")
            terms.append(mpmath.log(w))
        return HComplex.from_value(-mpmath.fsum(terms), d)


def zeta_n_product(s, table: PrimeTable, n: int, digits: int | None = None) -> HComplex:
    """Finite Euler product prod_{k<=N} (1 - p_k^-s)^-1."""
    _check_n(table, n)
    s = HComplex.of(s)
    _check_s(s)
    d = digits or s.digits
    with mpmath.workdps(d + 10):
        tiny = mpf(10) ** (-d)
        acc = mpc(1)
        for z in _term_factors(s, table, n, d):
            w = 1 - z
            if abs(w) < tiny:
                raise PoleError("|1 - p^-s| below working precision")
            acc /= w
        return HComplex.from_value(acc, d)


def r_n_estimate(s, n: int) -> HComplex:
    """Truncation error estimate N^(1-s) / ((s-1) log^s N) with implied constant 1."""
    s = HComplex.of(s)
    if n < 16:
        raise DomainError("r_n_estimate needs n >= 16")
    d = s.digits
    with mpmath.workdps(d + 10):
        sv = s.value
        if sv == 1:
            raise PoleError("r_n_estimate has a pole at s = 1")
        N = mpf(n)
        return HComplex.from_value(N ** (1 - sv) / ((sv - 1) * mpmath.log(N) ** sv), d)


@dataclass(frozen=True)
class ArgResult:
    """a(t) from primes, split into its prime-number-theorem and fluctuating parts."""

    value: HReal
    n_used: int
    delta: HReal
    smooth_part: HReal
    fluctuating_part: HReal


def arg_sum(bank: PhaseBank, sigma: float, h: float = 0.0, n: int | None = None, workers: int = 1) -> float:
    """-(1/pi) Im sum_k log(1 - p_k^-(sigma + i t)) at t = bank.t0 + h, in float64."""
    n = bank.n if n is None else n
    r_all = np.exp(-sigma * bank.logp[:n])

    def chunk(lo, hi):
        r = r_all[lo:hi]
        th = bank.angles(h, lo, hi)
        return np.arctan2(r * np.sin(th), 1.0 - r * np.cos(th)).sum()

    return -chunked_sum(chunk, n, CHUNK, workers) / math.pi


def a_pnt(t, p_max) -> HReal:
    """Smooth part (1/pi) Im[Ei((1/2 - it) log p_max) - Ei((1/2 - it) log 2)]."""
    tv = HReal.of(t)
    if tv.value < 10:
        raise DomainError("a_pnt needs t >= 10")
    d = tv.digits
    with mpmath.workdps(d + 10):
        w = mpc(0.5, -tv.value)
        hi = exp_integral_ei(w * mpmath.log(mpf(p_max)), d).im.value
        lo = exp_integral_ei(w * mpmath.log(2), d).im.value
        return HReal((hi - lo) / mpmath.pi, d)


def a_euler(t, delta, table: PrimeTable, n: int | None = None, enforce_cap: bool = True) -> ArgResult:
    """a(t) = -(1/pi) Im sum_{k<=N} log(1 - p_k^-(1/2 + delta + it)).

    N defaults to the whole table; with ``enforce_cap`` it is clipped to [t^2].
    The smooth part is only defined for t >= 10; below that it is reported as 0.
    """
    tv = HReal.of(t)
    dv = HReal.of(delta, tv.digits)
    if dv.value <= 0:
        raise DomainError("delta must be > 0")
    n = table.count if n is None else min(n, table.count)
    if enforce_cap:
        n = min(n, truncation_cap(tv, warn=False))
    bank = PhaseBank(tv.value, table, n)
    value = arg_sum(bank, 0.5 + float(dv.value))
    smooth = 0.0
    if tv.value >= 10 and n >= 1:
        smooth = float(a_pnt(tv, int(table.primes[n - 1])).value)
    d = tv.digits
    return ArgResult(
        value=HReal(mpf(value), d),
        n_used=n,
        delta=dv,
        smooth_part=HReal(mpf(smooth), d),
        fluctuating_part=HReal(mpf(value) - mpf(smooth), d),
    )


def a_euler_scan(ts: np.ndarray, delta: float, table: PrimeTable, n: int | None = None,
                 enforce_cap: bool = True) -> np.ndarray:
    """Vectorised a(t) from primes over a grid of moderate heights (float64)."""
    ts = np.asarray(ts, dtype=np.float64)
    n_all = table.count if n is None else min(n, table.count)
    logp = table.log_floats()
    out = np.empty(ts.size)
    for i, t in enumerate(ts):
        m = min(n_all, int(math.floor(t * t))) if enforce_cap else n_all
        lp = logp[:m]
        r = np.exp(-(0.5 + delta) * lp)
        th = np.fmod(t * lp, 2 * math.pi)
        out[i] = -np.arctan2(r * np.sin(th), 1.0 - r * np.cos(th)).sum() / math.pi
    return out
