import mpmath
import numpy as np
import pytest

# one zero per decade-ish of the table, checked against mpmath's independent root finder
SPOT = [1, 2, 100, 1000, 12345, 54321, 99999, 100000]


def test_file_layout(true_zeros):
    with open(true_zeros.source, encoding="utf-8") as fh:
        first = [next(fh) for _ in range(2)]
    assert first == ["14.134725142\n", "21.022039639\n"]
    assert true_zeros.count == 10 ** 5
    assert np.all(np.diff(true_zeros.ordinates) > 0)


@pytest.mark.parametrize("n", SPOT)
def test_spot_check_against_mpmath(true_zeros, n):
    with mpmath.workdps(20):
        ref = float(mpmath.zetazero(n).imag)
    assert true_zeros.ordinates[n - 1] == pytest.approx(ref, abs=2e-9)


def test_counts_match_backlund_estimate(true_zeros):
    # N(T) = theta(T)/pi + 1 + S(T) with |S(T)| small at these heights
    t = true_zeros.ordinates
    for n in (5000, 50_000, 99_000):
        T = 0.5 * (t[n - 1] + t[n])
        smooth = float(mpmath.siegeltheta(T) / mpmath.pi) + 1
        assert abs(n - smooth) < 2.5
