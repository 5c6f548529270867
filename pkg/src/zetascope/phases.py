"""Phase reduction t*log(p) mod 2*pi and deterministic chunked prime sums.

At t ~ 1e99 a double holds none of the phase t*log(p); the reduction below
works in exact integer fixed point.  For a base height t0 we store
f_k = frac(t0 * log(p_k) / 2pi) as doubles, after which any nearby height
t0 + h (|h| up to a few hundred) costs one fused multiply per prime:

    theta_k(t0 + h) = 2pi * frac(f_k + h * log(p_k) / 2pi)
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import gmpy2
import mpmath
import numpy as np

from .primes import PrimeTable

log = logging.getLogger(__name__)

CHUNK = 1 << 16
TWO_PI = 2.0 * math.pi
# above this |t| * log(p_max) the float64 product loses ~1e-10 rad
FLOAT_PHASE_LIMIT = 1.0e6
FRACTION_BITS_MARGIN = 64


def fractional_phases(t0, primes: np.ndarray, progress: bool = False) -> np.ndarray:
    """frac(t0 * log(p) / 2pi) for each prime, exact to ~2^-53.

    ``t0`` is taken as the exact binary value of the mpf. log(p)/2pi is
    rounded to F fractional bits with F = bits(t0) + 64, so the product's
    fractional part is exact up to t0 * 2^-F ~ 2^-64.
    """
    if not isinstance(t0, mpmath.mpf):
        with mpmath.workdps(60):
            t0 = mpmath.mpf(t0)
    if t0 < 0:
        raise ValueError("base height must be non-negative")
    man, exp = t0.man_exp
    if man == 0:
        return np.zeros(len(primes))
    int_bits = max(man.bit_length() + exp, 1)
    F = int_bits + FRACTION_BITS_MARGIN
    if exp >= 0:
        mult = gmpy2.mpz(man) << exp
        G = F
    else:
        mult = gmpy2.mpz(man)
        G = F - exp
    mask = (gmpy2.mpz(1) << G) - 1
    shift = G - 53
    out = np.empty(len(primes), dtype=np.float64)
    with gmpy2.context(gmpy2.get_context(), precision=F + 32):
        scale = gmpy2.mul_2exp(gmpy2.mpfr(1), F) / (2 * gmpy2.const_pi())
        glog = gmpy2.log
        gmpz = gmpy2.mpz
        for lo in range(0, len(primes), CHUNK):
            block = primes[lo : lo + CHUNK].tolist()
            vals = [int(((mult * gmpz(glog(p) * scale)) & mask) >> shift) for p in block]
            out[lo : lo + len(block)] = np.asarray(vals, dtype=np.float64)
            if progress and lo and (lo // CHUNK) % 16 == 0:
                log.info("phase reduction: %d / %d primes", lo, len(primes))
    out *= 2.0 ** -53
    return out


class PhaseBank:
    """Reduced phases of t*log(p_k) for t near a fixed base height ``t0``."""

    def __init__(self, t0, table: PrimeTable, n: int | None = None, progress: bool = False):
        n = table.count if n is None else n
        if n > table.count:
            raise ValueError(f"table holds {table.count} primes, {n} requested")
        if not isinstance(t0, mpmath.mpf):
            with mpmath.workdps(60):
                t0 = mpmath.mpf(t0)
        self.t0 = t0
        self.n = n
        self.primes = table.primes[:n]
        self.logp = table.log_floats()[:n]
        self.cycles = self.logp / TWO_PI
        t0f = float(self.t0)
        if n == 0 or abs(t0f) * float(self.logp[-1]) < FLOAT_PHASE_LIMIT:
            self.exact = False
            self.frac0 = np.modf(t0f * self.cycles)[0] % 1.0
        else:
            self.exact = True
            self.frac0 = fractional_phases(self.t0, self.primes, progress=progress)

    def head(self, n: int) -> "PhaseBank":
        """Same base, first ``n`` primes only (shares the arrays)."""
        if n > self.n:
            raise ValueError("cannot extend a phase bank")
        other = object.__new__(PhaseBank)
        other.t0, other.n, other.exact = self.t0, n, self.exact
        other.primes = self.primes[:n]
        other.logp = self.logp[:n]
        other.cycles = self.cycles[:n]
        other.frac0 = self.frac0[:n]
        return other

    def angles(self, h: float = 0.0, lo: int = 0, hi: int | None = None) -> np.ndarray:
        """theta_k = (t0 + h) log p_k reduced to [0, 2pi), for k in [lo, hi)."""
        hi = self.n if hi is None else hi
        f = self.frac0[lo:hi]
        if h:
            f = f + h * self.cycles[lo:hi]
        return TWO_PI * (f - np.floor(f))


def chunked_sum(chunk_fn, n: int, chunk: int = CHUNK, workers: int = 1) -> float:
    """Sum ``chunk_fn(lo, hi)`` over fixed chunks, combined left to right.

    Chunk boundaries do not depend on ``workers`` and the combination order is
    fixed, so the result is bit-identical for any degree of parallelism.
    """
    bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: float(chunk_fn(*b)), bounds))
    else:
        parts = [float(chunk_fn(lo, hi)) for lo, hi in bounds]
    total = 0.0
    for part in parts:
        total += part
    return total
