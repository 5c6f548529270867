"""Reference zeta(s) inside the strip at moderate height, for checking the prime side.

zeta(s) = eta(s) / (1 - 2^(1-s)) with the alternating series accelerated by
Borwein's binomial weights.  With n terms the truncation error obeys

    |gamma_n(s)| <= 2 / (3 + sqrt 8)^n / (|Gamma(s)| |1 - 2^(1-s)|)

which is reported as ``error_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mpc, mpf

from .eulerprod import PoleError, log_zeta_n
from .hpnum import DomainError, HComplex, HReal
from .primes import PrimeTable

MAX_HEIGHT = 1.0e4
TARGET_DIGITS = 12
_LOG10_RATE = math.log10(3 + math.sqrt(8))


@dataclass(frozen=True)
class ZetaRefValue:
    value: HComplex
    terms_used: int
    error_bound: HReal


@lru_cache(maxsize=32)
def _borwein_weights(n: int) -> tuple:
    """d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!) for k = 0..n, exact integers."""
    d = []
    acc = 0
    for i in range(n + 1):
        num = n * math.factorial(n + i - 1) * 4 ** i
        den = math.factorial(n - i) * math.factorial(2 * i)
        q, r = divmod(num, den)
        if r:
            raise ArithmeticError("Borwein weight is not integral")
        acc += q
        d.append(acc)
    return tuple(d)


def _plan(t: float, digits: int) -> tuple[int, int]:
    """Terms and working digits for |Im s| = t and the requested accuracy."""
    loss = abs(t) * math.pi / 2 / math.log(10) + math.log10(1 + 2 * abs(t))
    n = int((digits + loss + 3) / _LOG10_RATE) + 4
    work = digits + int(loss) + 15
    return n, work


def _eta_borwein(sv: mpc, n: int):
    d = _borwein_weights(n)
    dn = d[n]
    total = mpc(0)
    for k in range(n):
        term = mpf(dn - d[k]) * mpmath.power(k + 1, -sv)
        total = total - term if k % 2 else total + term
    return total / mpf(dn)


def _reference(sv: mpc, digits: int) -> tuple[mpc, int, mpf]:
    n, work = _plan(float(sv.imag), digits)
    with mpmath.workdps(work):
        s = mpc(sv)
        denom = 1 - mpmath.power(2, 1 - s)
        eta = _eta_borwein(s, n)
        value = eta / denom
        bound = 2 * mpf(3 + mpmath.sqrt(8)) ** (-n) * abs(mpmath.rgamma(s)) / abs(denom)
        return value, n, bound


def zeta_reference(s, digits: int = TARGET_DIGITS + 8) -> ZetaRefValue:
    """zeta(s) for Re(s) > 0, |Im(s)| <= 1e4, away from the pole."""
    s = HComplex.of(s)
    sv = s.value
    if sv.real <= 0:
        raise DomainError("zeta_reference requires Re(s) > 0")
    if abs(sv.imag) > MAX_HEIGHT:
        raise DomainError(f"zeta_reference is limited to |Im s| <= {MAX_HEIGHT:g}")
    if abs(sv - 1) < mpf("1e-6"):
        raise PoleError("zeta_reference: s too close to the pole at s = 1")
    conj = sv.imag < 0
    value, n, bound = _reference(mpmath.conj(sv) if conj else sv, digits)
    d = max(s.digits, digits)
    if conj:
        with mpmath.workdps(d + 10):
            value = mpmath.conj(value)
    return ZetaRefValue(HComplex.from_value(value, d), n, HReal(bound, d))


def arg_zeta_principal(s) -> HReal:
    """Principal argument of zeta(s), in (-pi, pi]."""
    ref = zeta_reference(s)
    d = ref.value.digits
    with mpmath.workdps(d + 10):
        return HReal(mpmath.arg(ref.value.value), d)


def a_exact(t, delta) -> HReal:
    """(1/pi) arg zeta(1/2 + delta + i t) on the principal branch."""
    tv = HReal.of(t)
    dv = HReal.of(delta)
    if dv.value <= 0:
        raise DomainError("delta must be > 0")
    s = HComplex(HReal.of(mpf(0.5) + dv.value), tv)
    arg = arg_zeta_principal(s)
    with mpmath.workdps(arg.digits + 10):
        return HReal(arg.value / mpmath.pi, arg.digits)


def fold_phase(x: mpf) -> mpf:
    """Reduce an angle to (-pi, pi]."""
    two_pi = 2 * mpmath.pi
    y = x - two_pi * mpmath.floor(x / two_pi)
    return y - two_pi if y > mpmath.pi else y


def r_n_direct(s, table: PrimeTable, n: int, digits: int | None = None) -> HComplex:
    """log zeta(s) - log zeta_N(s), imaginary part folded to (-pi, pi]."""
    s = HComplex.of(s)
    if s.re.value <= 0.5:
        raise DomainError("r_n_direct requires Re(s) > 1/2")
    ref = zeta_reference(s)
    d = ref.value.digits
    logzn = log_zeta_n(s, table, n, digits=digits).value
    with mpmath.workdps(d + 10):
        diff = mpmath.log(ref.value.value) - logzn
        return HComplex.from_value(mpc(diff.real, fold_phase(diff.imag)), d)
