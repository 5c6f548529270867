"""Riemann zeta zeros computed from prime numbers, with the statistics of their fluctuations."""

__version__ = "0.1.0"

from .hpnum import (  # noqa: E402
    ConvergenceError,
    DomainError,
    HComplex,
    HReal,
    PrecisionPolicy,
    exp_integral_ei,
    lambert_w0,
    riemann_siegel_theta,
    theta_derivative,
)
from .primes import PrimeTable, enumerate_smooth, generate_primes, smooth_membership  # noqa: E402
from .solver import SolveConfig, ZeroResult, scan_zeros, solve_zero, tilde_t  # noqa: E402

__all__ = [
    "ConvergenceError",
    "DomainError",
    "HComplex",
    "HReal",
    "PrecisionPolicy",
    "PrimeTable",
    "SolveConfig",
    "ZeroResult",
    "enumerate_smooth",
    "exp_integral_ei",
    "generate_primes",
    "lambert_w0",
    "riemann_siegel_theta",
    "scan_zeros",
    "smooth_membership",
    "solve_zero",
    "theta_derivative",
    "tilde_t",
]
