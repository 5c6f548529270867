import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetascope.hpnum import DomainError, PrecisionPolicy
from zetascope.solver import (
    MIN_INDEX,
    RESIDUAL_TOL,
    NoRootError,
    PrecisionError,
    SolveConfig,
    ZeroSolveError,
    error_estimate,
    mean_spacing,
    parse_index,
    scan_zeros,
    solve_zero,
    tilde_t,
)

LOW = SolveConfig(n_primes=10 ** 5, allow_low=True)


# -- index parsing ------------------------------------------------------------

@pytest.mark.parametrize("text, value", [
    ("123", 123),
    ("1e21", 10 ** 21),
    ("1E22+1", 10 ** 22 + 1),
    ("10^100", 10 ** 100),
    ("10**22 - 1", 10 ** 22 - 1),
    ("2.5e3", 2500),
    (" 7 ", 7),
    (42, 42),
])
def test_parse_index(text, value):
    assert parse_index(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1.5", "1.25e1", "10^", "-5"])
def test_parse_index_rejects(text):
    with pytest.raises(ValueError):
        parse_index(text)


@given(st.integers(0, 10 ** 40))
def test_parse_index_round_trip(n):
    assert parse_index(str(n)) == n


# -- seed -----------------------------------------------------------------------

def test_tilde_t_examples():
    # lambert_w0 oracle: W(-3/(8e)) < 0 and n - 11/8 < 0 for n = 1
    with mpmath.workdps(40):
        x = mpmath.mpf(-3) / 8
        oracle = 2 * mpmath.pi * x / mpmath.lambertw(x / mpmath.e).real
    assert abs(tilde_t(1).value - oracle) < 1e-25
    assert float(tilde_t(1).value) == pytest.approx(14.52, abs=0.005)
    assert float(tilde_t(2).value) == pytest.approx(20.66, abs=0.005)


def test_tilde_t_increasing():
    vals = [tilde_t(n).value for n in range(1, 102)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_tilde_t_domain():
    with pytest.raises(DomainError):
        tilde_t(0)


@given(st.integers(1, 10 ** 30))
@settings(max_examples=30)
def test_tilde_t_solves_smooth_equation(n):
    t = tilde_t(n).value
    with mpmath.workdps(80):
        lhs = t / 2 * mpmath.log(t / (2 * mpmath.pi * mpmath.e)) + 11 * mpmath.pi / 8
        assert abs(lhs - n * mpmath.pi) < mpmath.mpf(10) ** -20 * max(1, n)


def test_mean_spacing():
    assert mean_spacing(2 * math.pi * math.e) == pytest.approx(2 * math.pi)


# -- error model ------------------------------------------------------------------

def test_error_estimate_examples():
    assert float(error_estimate("1e21", 5_000_000).value) == pytest.approx(0.0105, abs=5e-4)
    assert float(error_estimate("10^100", 5_000_000).value) == pytest.approx(0.0022, abs=2e-4)
    normalized = error_estimate("1e21", 5_000_000).value * mpmath.log(10 ** 21) / (2 * mpmath.pi)
    assert float(normalized) == pytest.approx(1 / (math.pi * math.sqrt(math.log(5e6))), rel=1e-12)
    assert float(normalized) == pytest.approx(0.081, abs=5e-4)


def test_error_estimate_domain():
    with pytest.raises(DomainError):
        error_estimate(MIN_INDEX - 1, 1000)
    with pytest.raises(DomainError):
        error_estimate(MIN_INDEX, 10)


# -- solving -----------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(delta=0)
    with pytest.raises(ValueError):
        SolveConfig(n_primes=0)
    with pytest.raises(ValueError):
        SolveConfig(bracket_halfwidth=-1)


def test_low_index_rejected_by_default():
    with pytest.raises(DomainError):
        solve_zero(MIN_INDEX - 1, SolveConfig(n_primes=1000))


def test_solution_near_true_zero(true_zeros, primes_1e5):
    r = solve_zero(MIN_INDEX, SolveConfig(n_primes=10 ** 5), primes_1e5)
    err = abs(float(r.t.value) - true_zeros.ordinates[MIN_INDEX - 1])
    assert err <= 3 * float(r.predicted_error.value)
    assert r.n_primes == 10 ** 5
    assert r.residual.value < RESIDUAL_TOL


def test_scan_window_against_table(true_zeros, primes_1e5):
    rs = scan_zeros(MIN_INDEX - 20, 21, LOW, primes_1e5)
    t = np.array([float(r.t.value) for r in rs])
    assert np.all(np.diff(t) > 0)
    bound = 3 * float(error_estimate(MIN_INDEX, 10 ** 5).value)
    assert np.abs(t - true_zeros.ordinates[MIN_INDEX - 21:]).max() <= bound
    for r in rs:
        assert r.residual.value < RESIDUAL_TOL
        # seed quality: the bracket assumption
        assert abs(r.t.value - tilde_t(r.n).value) < 5 * 2 * math.pi / math.log(r.n)


def test_high_zero_certificate():
    r = solve_zero("1e30", SolveConfig(n_primes=20_000))
    assert r.residual.value < RESIDUAL_TOL
    assert r.iterations <= 20
    assert abs(r.t.value - tilde_t("1e30").value) < 5 * 2 * math.pi / math.log(1e30)
    assert r.fraction(3).isdigit() and len(r.fraction(3)) == 3


def test_no_root_in_tiny_bracket(primes_1e5):
    cfg = SolveConfig(n_primes=10 ** 5, bracket_halfwidth=1e-6)
    with pytest.raises(NoRootError):
        solve_zero(MIN_INDEX + 2, cfg, primes_1e5)


def test_precision_error():
    cfg = SolveConfig(n_primes=1000, precision=PrecisionPolicy(0, 0))
    with pytest.raises(PrecisionError):
        solve_zero("1e40", cfg)


def test_scan_attaches_index(primes_1e5):
    cfg = SolveConfig(n_primes=10 ** 5, bracket_halfwidth=1e-6)
    with pytest.raises(ZeroSolveError) as info:
        scan_zeros(MIN_INDEX + 2, 2, cfg, primes_1e5)
    assert info.value.n == MIN_INDEX + 2
    with pytest.raises(ValueError):
        scan_zeros(MIN_INDEX, 10 ** 4 + 1)
