"""First-N prime tables, smooth numbers over the first N primes, and the on-disk cache."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

log = logging.getLogger(__name__)

MAX_COUNT = 10 ** 8
SEGMENT = 1 << 20
CACHE_VERSION = "v1"
CACHE_MAGIC = "ZPRIMES"


class ResourceLimitError(ValueError):
    pass


class CacheFormatError(ValueError):
    pass


def _small_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(limit)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _upper_bound(count: int) -> int:
    # Rosser–Schoenfeld: p_n < n (log n + log log n) for n >= 6
    if count < 6:
        return 15
    n = float(count)
    return int(n * (math.log(n) + math.log(math.log(n)))) + 3


def sieve_primes(count: int) -> np.ndarray:
    """Exact first ``count`` primes by a segmented sieve of Eratosthenes."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > MAX_COUNT:
        raise ResourceLimitError(f"prime count {count} exceeds the cap of {MAX_COUNT}")
    limit = _upper_bound(count)
    base = _small_primes(int(math.isqrt(limit)) + 1)
    out = []
    found = 0
    for lo in range(0, limit + 1, SEGMENT):
        hi = min(lo + SEGMENT, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            seg[: min(2, hi)] = False
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            seg[start - lo :: p] = False
        chunk = np.flatnonzero(seg).astype(np.int64) + lo
        out.append(chunk)
        found += chunk.size
        if found >= count:
            break
    return np.concatenate(out)[:count]


@dataclass(frozen=True)
class PrimeTable:
    """The first ``count`` primes; logs are produced on demand at a requested precision."""

    primes: np.ndarray
    _log_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.primes.setflags(write=False)

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def __len__(self):
        return self.count

    def __getitem__(self, k):
        return self.primes[k]

    def head(self, n: int) -> "PrimeTable":
        if n > self.count:
            raise ValueError(f"table holds {self.count} primes, {n} requested")
        return PrimeTable(self.primes[:n])

    def log_floats(self) -> np.ndarray:
        if "f64" not in self._log_cache:
            arr = np.log(self.primes.astype(np.float64))
            arr.setflags(write=False)
            self._log_cache["f64"] = arr
        return self._log_cache["f64"]

    def logs(self, digits: int, n: int | None = None) -> list:
        """log p_k as mpf at ``digits`` decimal digits, for the first n primes."""
        n = self.count if n is None else n
        key = ("mp", digits)
        cached = self._log_cache.get(key)
        if cached is None or len(cached) < n:
            with mpmath.workdps(digits):
                cached = [mpmath.log(int(p)) for p in self.primes[:n]]
            self._log_cache[key] = cached
        return cached[:n]


_MEMO: dict[int, PrimeTable] = {}


def generate_primes(count: int) -> PrimeTable:
    """First ``count`` primes; tables are memoised per process and sliced when smaller."""
    for have, table in _MEMO.items():
        if have >= count:
            return table.head(count) if have > count else table
    table = PrimeTable(sieve_primes(count))
    _MEMO.clear()
    _MEMO[count] = table
    return table


def remember(table: PrimeTable) -> PrimeTable:
    """Make ``table`` the one ``generate_primes`` hands out for counts it covers."""
    if not any(have >= table.count for have in _MEMO):
        _MEMO.clear()
        _MEMO[table.count] = table
    return table


def smooth_membership(n: int, generator_count: int) -> bool:
    """True iff every prime factor of n is among the first ``generator_count`` primes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return True
    if generator_count < 1:
        return False
    for p in generate_primes(generator_count).primes:
        p = int(p)
        while n % p == 0:
            n //= p
        if n == 1:
            return True
    return n == 1


@dataclass(frozen=True)
class SmoothSet:
    generator_count: int
    limit: int
    members: tuple

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def enumerate_smooth(generator_count: int, limit: int) -> SmoothSet:
    """All integers <= limit whose prime factors lie among the first N primes."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    members = [1]
    if generator_count >= 1:
        for p in generate_primes(generator_count).primes:
            p = int(p)
            grown = []
            for m in members:
                v = m * p
                while v <= limit:
                    grown.append(v)
                    v *= p
            members.extend(grown)
    return SmoothSet(generator_count, limit, tuple(sorted(members)))


def cache_dir() -> Path:
    return Path(os.environ.get("ZETASCOPE_CACHE", Path.home() / ".cache" / "zetascope"))


def cache_path(count: int, directory: Path | None = None) -> Path:
    return Path(directory or cache_dir()) / f"primes_{count}.bin"


def save_table(table: PrimeTable, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(f"{CACHE_MAGIC} {CACHE_VERSION} {table.count}\n".encode("ascii"))
        fh.write(table.primes.astype("<i8").tobytes())
    os.replace(tmp, path)
    return path


def load_table(path: Path) -> PrimeTable:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            header = fh.readline(64)
            payload = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read prime cache {path}: {exc}") from exc
    parts = header.decode("ascii", errors="replace").split()
    if len(parts) != 3 or parts[0] != CACHE_MAGIC:
        raise CacheFormatError(f"{path}: not a prime cache file")
    if parts[1] != CACHE_VERSION:
        raise CacheFormatError(f"{path}: unsupported format version {parts[1]!r}")
    try:
        count = int(parts[2])
    except ValueError:
        raise CacheFormatError(f"{path}: bad entry count {parts[2]!r}") from None
    if len(payload) != 8 * count:
        raise CacheFormatError(f"{path}: expected {count} entries, found {len(payload) // 8}")
    return PrimeTable(np.frombuffer(payload, dtype="<i8").astype(np.int64))


def cached_primes(count: int, directory: Path | None = None) -> PrimeTable:
    """Load the table from the cache directory, sieving and storing it on a miss."""
    path = cache_path(count, directory)
    if path.exists():
        try:
            return remember(load_table(path))
        except CacheFormatError as exc:
            log.warning("%s; sieving again", exc)
    table = generate_primes(count)
    try:
        save_table(table, path)
    except OSError as exc:
        log.warning("could not write prime cache %s: %s", path, exc)
    return table
