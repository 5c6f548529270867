import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetascope.eulerprod import arg_sum
from zetascope.phases import CHUNK, PhaseBank, chunked_sum, fractional_phases
from zetascope.primes import generate_primes

TABLE = generate_primes(300_000)


def reference_fraction(t0, p, dps):
    with mpmath.workdps(dps):
        x = t0 * mpmath.log(p) / (2 * mpmath.pi)
        return float(x - mpmath.floor(x))


def circular_gap(a, b):
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


@pytest.mark.parametrize("exponent", [7, 21, 22, 60, 99])
def test_fractional_phases_against_mpmath(exponent):
    with mpmath.workdps(exponent + 40):
        t0 = mpmath.mpf(10) ** exponent * mpmath.mpf("1.4417689750954697353820")
    idx = np.array([0, 1, 2, 99, 1234, 65535, 65536, 299_999])
    got = fractional_phases(t0, TABLE.primes[idx])
    for k, g in zip(idx, got):
        ref = reference_fraction(t0, int(TABLE.primes[k]), exponent + 40)
        assert circular_gap(g, ref) < 1e-15


@given(st.integers(0, 10 ** 30), st.integers(0, 299_999))
@settings(max_examples=30)
def test_fractional_phase_of_integer_heights(t0, k):
    p = int(TABLE.primes[k])
    with mpmath.workdps(40):
        exact = mpmath.mpf(t0)
    got = fractional_phases(exact, np.array([p]))[0]
    assert circular_gap(got, reference_fraction(t0, p, 80)) < 1e-15


def test_bank_shift_matches_direct_reduction():
    with mpmath.workdps(60):
        t0 = mpmath.mpf("144176897509546973538")
        bank = PhaseBank(t0, TABLE, 1000)
        h = 0.30143
        th = bank.angles(h)
        for k in (0, 10, 999):
            x = (t0 + mpmath.mpf(h)) * mpmath.log(int(TABLE.primes[k]))
            ref = float(x - 2 * mpmath.pi * mpmath.floor(x / (2 * mpmath.pi)))
            assert abs(th[k] - ref) < 1e-9


def test_low_heights_use_float_path():
    bank = PhaseBank(30.0, TABLE, 100)
    assert not bank.exact
    np.testing.assert_allclose(bank.angles(), np.mod(30.0 * np.log(TABLE.primes[:100]), 2 * np.pi), atol=1e-12)


def test_head_is_prefix():
    bank = PhaseBank(mpmath.mpf(10) ** 20, TABLE, 5000)
    head = bank.head(100)
    assert np.array_equal(head.angles(0.5), bank.angles(0.5)[:100])
    with pytest.raises(ValueError):
        bank.head(6000)


@given(st.integers(1, 4 * CHUNK + 17), st.integers(2, 6))
@settings(max_examples=25)
def test_chunked_sum_independent_of_workers(n, workers):
    rng = np.random.default_rng(n)
    data = rng.standard_normal(n) * 10.0 ** rng.integers(-8, 8, n)

    def f(lo, hi):
        return data[lo:hi].sum()

    assert chunked_sum(f, n, workers=1) == chunked_sum(f, n, workers=workers)


def test_prime_sum_bit_exact_under_parallelism():
    bank = PhaseBank(mpmath.mpf(10) ** 21, TABLE, 300_000)
    serial = arg_sum(bank, 0.5 + 1e-6, 0.25)
    for w in (2, 3, 8):
        assert arg_sum(bank, 0.5 + 1e-6, 0.25, workers=w) == serial
