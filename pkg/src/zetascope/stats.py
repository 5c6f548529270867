"""Fluctuation statistics of zero ordinates.

delta_n = ((t_n - tilde_t_n) / 2pi) log(tilde_t_n / 2pi e) measures how far a
zero sits from its smooth Lambert-W position, in units of the local mean
spacing.  This module tabulates those deltas, samples the Gaussian zero model
tilde_t_n + 2pi r / log(tilde_t_n / 2pi e), histograms pair correlations
against the GUE curve and runs the random-walk experiment for B_N(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import mpmath
import numpy as np
from scipy import stats as sps
from scipy.special import lambertw

from .eulerprod import b_n_samples
from .hpnum import DomainError, HReal
from .primes import PrimeTable, generate_primes
from .solver import parse_index, tilde_t

TWO_PI = 2.0 * math.pi
TWO_PI_E = TWO_PI * math.e
HIST_RANGE = (-1.5, 1.5)
HIST_WIDTH = 0.05
MIN_ZEROS = 1000


class ZeroFileError(ValueError):
    """Malformed zero table; ``line`` is 1-based."""

    def __init__(self, path, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line


class OrderingError(ZeroFileError):
    pass


@dataclass(frozen=True)
class ZeroTable:
    """Ascending zero ordinates (float64) and where they came from."""

    ordinates: np.ndarray
    source: str = ""

    def __post_init__(self):
        o = np.ascontiguousarray(self.ordinates, dtype=np.float64)
        if o.ndim != 1:
            raise ValueError("ordinates must be one-dimensional")
        bad = np.nonzero(np.diff(o) <= 0)[0]
        if bad.size:
            raise OrderingError(self.source or "<table>", int(bad[0]) + 2, "ordinates are not ascending")
        o.setflags(write=False)
        object.__setattr__(self, "ordinates", o)

    @property
    def count(self) -> int:
        return int(self.ordinates.size)

    def __len__(self):
        return self.count

    def head(self, m: int) -> "ZeroTable":
        return ZeroTable(self.ordinates[:m], f"{self.source}[:{m}]")

    def ordinate(self, i: int) -> HReal:
        return HReal.of(float(self.ordinates[i]))


@dataclass(frozen=True)
class DeltaStats:
    deltas: np.ndarray
    mean: float
    stddev: float
    bin_edges: np.ndarray
    counts: np.ndarray
    fit_pvalue: float
    ks_pvalue: float

    @property
    def count(self) -> int:
        return int(self.deltas.size)

    @property
    def variance(self) -> float:
        return self.stddev ** 2

    @property
    def mean_abs(self) -> float:
        return float(np.mean(np.abs(self.deltas)))

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


@dataclass(frozen=True)
class PairCorrHistogram:
    alphas: np.ndarray
    width: float
    empirical: np.ndarray
    gue: np.ndarray
    pairs: np.ndarray
    T: float

    @property
    def centers(self) -> np.ndarray:
        return np.round(self.alphas + 0.5 * self.width, 12)


def load_zeros(path) -> ZeroTable:
    """One decimal ordinate per line; blank lines are ignored."""
    path = Path(path)
    values = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                x = float(text)
            except ValueError:
                raise ZeroFileError(path, lineno, f"not a decimal number: {text[:40]!r}") from None
            if not math.isfinite(x) or x <= 0:
                raise ZeroFileError(path, lineno, f"ordinate must be positive and finite, got {text!r}")
            if values and x <= values[-1][1]:
                raise OrderingError(path, lineno, f"{text} does not exceed the previous ordinate")
            values.append((lineno, x))
    if not values:
        raise ZeroFileError(path, None, "no ordinates found")
    return ZeroTable(np.array([v for _, v in values]), str(path))


def tilde_t_array(n: np.ndarray) -> np.ndarray:
    """Float64 tilde_t(n) for many indices; relative accuracy ~1e-15."""
    x = np.asarray(n, dtype=np.float64) - 11.0 / 8.0
    if np.any(x / math.e < -1 / math.e):
        raise DomainError("tilde_t needs n >= 1")
    return TWO_PI * x / lambertw(x / math.e).real


def delta_n(t_true, n) -> HReal:
    """((t - tilde_t_n) / 2pi) log(tilde_t_n / 2pi e)."""
    n = parse_index(n)
    if n < 1:
        raise DomainError("delta_n needs n >= 1")
    tv = HReal.of(t_true)
    tt = tilde_t(n, max(tv.digits, len(str(n)) + 30))
    d = tt.digits
    with mpmath.workdps(d + 10):
        v = (tv.value - tt.value) / (2 * mpmath.pi) * mpmath.log(tt.value / (2 * mpmath.pi * mpmath.e))
        return HReal(v, d)


def delta_array(zeros: ZeroTable, first_index: int = 1) -> np.ndarray:
    n = np.arange(first_index, first_index + zeros.count)
    tt = tilde_t_array(n)
    return (zeros.ordinates - tt) / TWO_PI * np.log(tt / TWO_PI_E)


def _histogram(values: np.ndarray, lo: float, hi: float, width: float):
    nbins = int(round((hi - lo) / width))
    edges = lo + width * np.arange(nbins + 1)
    # outliers go to the end bins so the counts always total len(values)
    idx = np.clip(np.floor((values - lo) / width).astype(np.int64), 0, nbins - 1)
    return edges, np.bincount(idx, minlength=nbins)


def _pearson_pvalue(counts: np.ndarray, edges: np.ndarray, mu: float, sd: float, fitted: int) -> float:
    cdf = sps.norm.cdf(edges, mu, sd)
    cdf[0], cdf[-1] = 0.0, 1.0
    expected = counts.sum() * np.diff(cdf)
    # merge sparse bins from the tails inward so every expected count is >= 5
    obs, exp = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(counts, expected):
        o_acc += o
        e_acc += e
        if e_acc >= 5:
            obs.append(o_acc)
            exp.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc and exp:
        obs[-1] += o_acc
        exp[-1] += e_acc
    obs, exp = np.array(obs), np.array(exp)
    dof = obs.size - 1 - fitted
    if dof < 1:
        return float("nan")
    chi2 = float(((obs - exp) ** 2 / exp).sum())
    return float(sps.chi2.sf(chi2, dof))


def summarize(values: np.ndarray, reference: tuple[float, float] | None = None,
              hist_range=HIST_RANGE, width: float = HIST_WIDTH) -> DeltaStats:
    """Moments, clipped histogram and normality p-values of a sample.

    Without ``reference`` the normal is fitted (mean and ML standard deviation);
    with ``reference=(mu, sd)`` the sample is tested against that fixed law.
    """
    values = np.asarray(values, dtype=np.float64)
    mean = float(values.mean())
    sd = float(values.std())
    edges, counts = _histogram(values, hist_range[0], hist_range[1], width)
    if reference is None:
        mu0, sd0, fitted = mean, sd, 2
    else:
        (mu0, sd0), fitted = reference, 0
    return DeltaStats(
        deltas=values,
        mean=mean,
        stddev=sd,
        bin_edges=edges,
        counts=counts,
        fit_pvalue=_pearson_pvalue(counts, edges, mu0, sd0, fitted),
        ks_pvalue=float(sps.kstest(values, "norm", args=(mu0, sd0)).pvalue),
    )


def delta_stats(zeros: ZeroTable) -> DeltaStats:
    if zeros.count < MIN_ZEROS:
        raise DomainError(f"delta_stats needs at least {MIN_ZEROS} zeros, got {zeros.count}")
    return summarize(delta_array(zeros))


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """The first ``count`` outputs of SplitMix64 started at ``seed``."""
    with np.errstate(over="ignore"):
        state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GOLDEN * np.arange(1, count + 1, dtype=np.uint64)
        z = state
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) from the top 53 bits of SplitMix64."""
    return (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def gaussians(seed: int, count: int) -> np.ndarray:
    """Standard normals by Box-Muller on consecutive uniform pairs."""
    u = uniforms(seed, 2 * ((count + 1) // 2)).reshape(-1, 2)
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    ang = TWO_PI * u[:, 1]
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)]).ravel()[:count]


def model_ordinates(count: int, sigma: float, seed: int) -> np.ndarray:
    """hat t_n = tilde_t_n + 2pi r_n / log(tilde_t_n / 2pi e), r_n ~ N(0, sigma), in index order.

    Neighbouring hat t_n swap places about once per hundred indices at
    sigma ~ 0.27, so this array is generally not monotone.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not sigma >= 0:
        raise ValueError("sigma must be >= 0")
    tt = tilde_t_array(np.arange(1, count + 1))
    if sigma == 0:
        return tt
    r = float(sigma) * gaussians(seed, count)
    return tt + TWO_PI * r / np.log(tt / TWO_PI_E)


def sample_model_zeros(count: int, sigma: float, seed: int) -> ZeroTable:
    """Model ordinates as an ascending table (what pair statistics see)."""
    return ZeroTable(np.sort(model_ordinates(count, sigma, seed)), f"model(sigma={sigma}, seed={seed})")


def gue_density(u) -> np.ndarray:
    """1 - (sin(pi u) / (pi u))^2."""
    return 1.0 - np.sinc(np.asarray(u, dtype=np.float64)) ** 2


def pair_correlation(zeros: ZeroTable, alpha_max: float = 3.0, width: float = 0.05,
                     block: int = 8192) -> PairCorrHistogram:
    """Pairs t < t' with alpha < (t' - t) log(T/2pi e)/2pi <= alpha + width, per unit u.

    T is the largest ordinate; counts are divided by N(T) = T/2pi log(T/2pi e)
    and by the bin width so the result compares directly with the GUE density.
    """
    if zeros.count < MIN_ZEROS:
        raise DomainError(f"pair_correlation needs at least {MIN_ZEROS} zeros, got {zeros.count}")
    if not width > 0 or not alpha_max > 0:
        raise ValueError("width and alpha_max must be > 0")
    t = zeros.ordinates
    T = float(t[-1])
    scale = math.log(T / TWO_PI_E) / TWO_PI
    nbins = int(round(alpha_max / width))
    edges = width * np.arange(nbins + 1)
    offsets = edges / scale
    pairs = np.zeros(nbins, dtype=np.int64)
    for lo in range(0, t.size, block):
        ti = t[lo : lo + block]
        pos = np.searchsorted(t, ti[:, None] + offsets[None, :], side="right")
        pairs += np.diff(pos, axis=1).sum(axis=0)
    big_n = T / TWO_PI * math.log(T / TWO_PI_E)
    alphas = np.round(edges[:-1], 12)
    return PairCorrHistogram(
        alphas=alphas,
        width=float(width),
        empirical=pairs / (big_n * width),
        gue=gue_density(np.round(alphas + 0.5 * width, 12)),
        pairs=pairs,
        T=T,
    )


def kac_experiment(n_primes: int, t_range_start, samples: int, seed: int,
                   table: PrimeTable | None = None) -> DeltaStats:
    """B_N(u)/sqrt(N) for u uniform on [T, 2T], tested against N(0, 1/2)."""
    if samples < 1000 or n_primes < 1000:
        raise DomainError("kac_experiment needs samples >= 1000 and n_primes >= 1000")
    T = float(HReal.of(t_range_start).value)
    if T <= 0:
        raise DomainError("T must be positive")
    if table is None or table.count < n_primes:
        table = generate_primes(n_primes)
    u = T * (1.0 + uniforms(seed, samples))
    values = b_n_samples(u, table, n_primes) / math.sqrt(n_primes)
    return summarize(values, reference=(0.0, math.sqrt(0.5)), hist_range=(-3.0, 3.0), width=0.1)


def sigma_prediction() -> float:
    """sqrt(pi/32), the variance estimate from branch-jump counting."""
    return math.sqrt(math.pi / 32)


def recovered_sigma(ordinates: np.ndarray) -> float:
    """Standard deviation of (t_n - tilde_t_n) log(tilde_t_n / 2pi e) / 2pi, t_n in index order."""
    o = np.asarray(ordinates, dtype=np.float64)
    tt = tilde_t_array(np.arange(1, o.size + 1))
    return float(((o - tt) / TWO_PI * np.log(tt / TWO_PI_E)).std())


__all__ = [
    "DeltaStats",
    "OrderingError",
    "PairCorrHistogram",
    "ZeroFileError",
    "ZeroTable",
    "delta_array",
    "delta_n",
    "delta_stats",
    "gaussians",
    "gue_density",
    "kac_experiment",
    "load_zeros",
    "model_ordinates",
    "pair_correlation",
    "recovered_sigma",
    "sample_model_zeros",
    "sigma_prediction",
    "splitmix64",
    "summarize",
    "tilde_t_array",
    "uniforms",
]
