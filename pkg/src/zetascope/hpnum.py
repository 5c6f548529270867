"""Arbitrary-precision scalars and the special functions used by the solver.

Values are thin wrappers over :mod:`mpmath` numbers that remember the number
of decimal digits they were computed at. Every function here is pure; the
global ``mpmath.mp`` context is only touched inside ``workdps`` blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number
from typing import Union

import mpmath
from mpmath import mpc, mpf

MIN_DIGITS = 30
DEFAULT_DIGITS = 50


class DomainError(ValueError):
    """Argument outside the region where an operation is defined or trusted."""


class ConvergenceError(ArithmeticError):
    """An iteration hit its cap; usually means the precision is too low."""


@dataclass(frozen=True)
class HReal:
    value: mpf
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if self.digits < MIN_DIGITS:
            object.__setattr__(self, "digits", MIN_DIGITS)
        if not isinstance(self.value, mpf):
            with mpmath.workdps(self.digits):
                object.__setattr__(self, "value", mpf(self.value))

    @classmethod
    def of(cls, x: "RealLike", digits: int | None = None) -> "HReal":
        if isinstance(x, HReal):
            if digits is None or digits == x.digits:
                return x
            return cls(x.value, digits)
        d = DEFAULT_DIGITS if digits is None else digits
        with mpmath.workdps(max(d, MIN_DIGITS)):
            return cls(mpf(x), d)

    def _binary(self, other, op):
        o = HReal.of(other, self.digits) if not isinstance(other, HReal) else other
        d = max(self.digits, o.digits)
        with mpmath.workdps(d):
            return HReal(op(self.value, o.value), d)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        with mpmath.workdps(self.digits):
            return HReal(-self.value, self.digits)

    def __abs__(self):
        with mpmath.workdps(self.digits):
            return HReal(abs(self.value), self.digits)

    def _cmp_value(self, other):
        return other.value if isinstance(other, HReal) else mpf(other)

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return mpmath.nstr(self.value, self.digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)

    def __repr__(self):
        return f"HReal({mpmath.nstr(self.value, 20)}, digits={self.digits})"

    def fixed(self, fractional_digits: int) -> str:
        """Plain decimal rendering with a fixed number of fractional digits."""
        return fixed_decimal(self.value, fractional_digits)


@dataclass(frozen=True)
class HComplex:
    re: HReal
    im: HReal

    def __post_init__(self):
        d = max(self.re.digits, self.im.digits)
        if self.re.digits != d:
            object.__setattr__(self, "re", HReal(self.re.value, d))
        if self.im.digits != d:
            object.__setattr__(self, "im", HReal(self.im.value, d))

    @property
    def digits(self) -> int:
        return self.re.digits

    @property
    def value(self) -> mpc:
        with mpmath.workdps(self.digits):
            return mpc(self.re.value, self.im.value)

    @classmethod
    def of(cls, z: "ComplexLike", digits: int | None = None) -> "HComplex":
        if isinstance(z, HComplex):
            if digits is None or digits == z.digits:
                return z
            return cls(HReal(z.re.value, digits), HReal(z.im.value, digits))
        if isinstance(z, HReal):
            return cls(HReal.of(z, digits), HReal.of(0, digits or z.digits))
        d = DEFAULT_DIGITS if digits is None else digits
        with mpmath.workdps(max(d, MIN_DIGITS)):
            w = mpmath.mpmathify(z)
            if isinstance(w, mpf):
                w = mpc(w, 0)
            return cls(HReal(w.real, d), HReal(w.imag, d))

    @classmethod
    def from_value(cls, w, digits: int) -> "HComplex":
        with mpmath.workdps(digits + 10):
            re = w.real if isinstance(w.real, mpf) else mpf(w.real)
            im = w.imag if isinstance(w.imag, mpf) else mpf(w.imag)
        return cls(HReal(re, digits), HReal(im, digits))

    def conjugate(self) -> "HComplex":
        return HComplex(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"HComplex({mpmath.nstr(self.value, 20)}, digits={self.digits})"


RealLike = Union[HReal, Number, str, mpf]
ComplexLike = Union[HComplex, HReal, Number, str, mpf, mpc]


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision for a computation at height ``t``.

    digits = (decimal digits in the integer part of t) + target + guard.
    """

    target_fractional_digits: int = 12
    guard_digits: int = 20

    def digits_for(self, t) -> int:
        return integer_digits(t) + self.target_fractional_digits + self.guard_digits


def integer_digits(t) -> int:
    """Number of decimal digits in the integer part of |t| (at least 1)."""
    if isinstance(t, HReal):
        t = t.value
    if isinstance(t, int):
        return max(len(str(abs(t))), 1)
    if not isinstance(t, mpf):
        with mpmath.workdps(60):
            t = mpmath.mpmathify(t)
    with mpmath.workdps(max(mpmath.mp.dps, int(t.man.bit_length() + t.exp) // 3 + 10 if t else 15)):
        x = abs(t)
        return len(str(int(mpmath.floor(x)))) if x >= 1 else 1


def fixed_decimal(x, fractional_digits: int) -> str:
    """Render ``x`` as a plain decimal string, rounded to the given fraction digits."""
    if not isinstance(x, mpf):
        with mpmath.workdps(60):
            x = mpmath.mpmathify(x)
    with mpmath.workdps(integer_digits(x) + fractional_digits + 10):
        scaled = mpmath.nint(x * mpf(10) ** fractional_digits)
    q = int(scaled)
    sign = "-" if q < 0 else ""
    q = abs(q)
    if fractional_digits == 0:
        return f"{sign}{q}"
    s = str(q).rjust(fractional_digits + 1, "0")
    return f"{sign}{s[:-fractional_digits]}.{s[-fractional_digits:]}"


def _digits_of(*xs) -> int:
    d = [x.digits for x in xs if isinstance(x, (HReal, HComplex))]
    return max(d) if d else DEFAULT_DIGITS


def lambert_w0(x: RealLike, digits: int | None = None) -> HReal:
    """Principal branch of the Lambert W function by Halley iteration."""
    d = digits or _digits_of(x)
    with mpmath.workdps(d + 10):
        xv = HReal.of(x, d).value
        branch = -mpmath.exp(-1)
        if xv < branch:
            if xv > branch - mpf(10) ** (-d + 2):
                xv = branch
            else:
                raise DomainError(f"lambert_w0 undefined for x < -1/e (got {mpmath.nstr(xv, 10)})")
        if xv == 0:
            return HReal(mpf(0), d)
        if xv == branch:
            return HReal(mpf(-1), d)
        if xv > mpmath.e:
            lx = mpmath.log(xv)
            w = lx - mpmath.log(lx)
        elif xv < -0.3:
            # series about the branch point
            p = mpmath.sqrt(2 * (mpmath.e * xv + 1))
            w = -1 + p - p ** 2 / 3 + mpf(11) / 72 * p ** 3
        else:
            w = mpmath.log1p(xv)
        tol = mpf(10) ** (-(d + 2))
        for _ in range(100):
            ew = mpmath.exp(w)
            f = w * ew - xv
            wp1 = w + 1
            if wp1 == 0:
                break
            step = f / (ew * wp1 - (w + 2) * f / (2 * wp1))
            w -= step
            if abs(step) <= tol * max(1, abs(w)):
                return HReal(+w, d)
        if abs(w * mpmath.exp(w) - xv) <= mpf(10) ** (-d) * max(1, abs(xv)):
            return HReal(+w, d)
    raise ConvergenceError("lambert_w0: Halley iteration did not converge; raise precision")


EI_MIN_MODULUS = 5


def ei_asymptotic(z: ComplexLike, digits: int | None = None, terms: int | None = None):
    """Asymptotic series of Ei(z) and the magnitude of its last retained term.

    Returns ``(value, last_term)`` as mpmath numbers, ``value`` being the
    series truncated just before its smallest term (or after ``terms`` terms).
    The constant ``i*pi*sign(Im z)`` puts the result on the principal branch.
    """
    d = digits or _digits_of(z)
    with mpmath.workdps(d + 10):
        zv = HComplex.of(z, d).value
        r = abs(zv)
        if r < EI_MIN_MODULUS:
            raise DomainError(f"Ei asymptotic series needs |z| >= {EI_MIN_MODULUS}, got |z| = {mpmath.nstr(r, 6)}")
        kmax = int(mpmath.floor(r)) if terms is None else terms
        negligible = mpmath.mpf(10) ** (-(d + 10))
        term = mpc(1)
        total = mpc(1)
        for k in range(1, kmax + 1):
            nxt = term * k / zv
            if terms is None and abs(nxt) >= abs(term):
                break
            term = nxt
            total += term
            if terms is None and abs(term) < negligible:
                break
        value = mpmath.exp(zv) / zv * total
        if zv.imag > 0:
            value += mpc(0, mpmath.pi)
        elif zv.imag < 0:
            value -= mpc(0, mpmath.pi)
        last = abs(term * mpmath.exp(zv) / zv)
        return value, last


def exp_integral_ei(z: ComplexLike, digits: int | None = None) -> HComplex:
    """Ei(z) for |z| >= 5 from its asymptotic expansion, cut at the smallest term."""
    d = digits or _digits_of(z)
    value, _ = ei_asymptotic(z, d)
    return HComplex.from_value(value, d)


def _check_theta_domain(t, lower, name):
    if t < lower:
        raise DomainError(f"{name} requires t >= {mpmath.nstr(lower, 8)}, got {mpmath.nstr(t, 8)}")


def riemann_siegel_theta(t: RealLike, digits: int | None = None, extra_term: bool = False) -> HReal:
    """Stirling series t/2 log(t/2 pi e) - pi/8 + 1/(48t), error O(t^-3).

    ``extra_term`` adds 7/(5760 t^3); it serves as an accuracy oracle for the
    default three-term truncation.
    """
    d = digits or _digits_of(t)
    with mpmath.workdps(d + 10):
        tv = HReal.of(t, d).value
        _check_theta_domain(tv, 10, "riemann_siegel_theta")
        v = tv / 2 * mpmath.log(tv / (2 * mpmath.pi * mpmath.e)) - mpmath.pi / 8 + 1 / (48 * tv)
        if extra_term:
            v += mpf(7) / (5760 * tv ** 3)
        return HReal(v, d)


def theta_derivative(t: RealLike, digits: int | None = None) -> HReal:
    """Derivative of the three-term theta series: 1/2 log(t/2 pi) - 1/(48 t^2)."""
    d = digits or _digits_of(t)
    with mpmath.workdps(d + 10):
        tv = HReal.of(t, d).value
        _check_theta_domain(tv, 2 * mpmath.pi * mpmath.e, "theta_derivative")
        return HReal(mpmath.log(tv / (2 * mpmath.pi)) / 2 - 1 / (48 * tv ** 2), d)


def half_log_density(t: RealLike, digits: int | None = None) -> HReal:
    """The approximation 1/2 log(t/2 pi e) to theta'(t) used to normalise fluctuations."""
    d = digits or _digits_of(t)
    with mpmath.workdps(d + 10):
        tv = HReal.of(t, d).value
        _check_theta_domain(tv, 2 * mpmath.pi * mpmath.e, "half_log_density")
        return HReal(mpmath.log(tv / (2 * mpmath.pi * mpmath.e)) / 2, d)
