"""Prime enumeration and smallest-prime-factor tables.

Everything downstream (integer-side statistics, prime-side measures)
draws its primes from here. Tables are plain immutable numpy arrays;
building one for a limit of 1e7 takes well under a second, 1e8 a few
seconds.
"""

from __future__ import annotations

import functools
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, EmptyTableError

DEFAULT_LIMIT = 10_000_000
MAX_LIMIT = 100_000_000

_SPF_MAGIC = b"ATSPF"
_SPF_VERSION = 1


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending."""

    limit: int
    primes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.primes.size)


@dataclass(frozen=True)
class FactorTable:
    """``spf[n]`` = smallest prime factor of n, for 2 <= n <= limit.

    Entries 0 and 1 are 0 (undefined). Stored as uint32, which covers
    every limit this package accepts.
    """

    limit: int
    spf: np.ndarray


def _check_limit(limit: int) -> int:
    limit = int(limit)
    if limit < 2:
        raise EmptyTableError(f"sieve limit must be >= 2, got {limit}")
    if limit > MAX_LIMIT:
        raise CapacityError(f"sieve limit {limit} exceeds the configured bound {MAX_LIMIT}")
    return limit


def sieve_primes(limit: int) -> PrimeTable:
    """Eratosthenes over a boolean array; returns all primes <= limit."""
    limit = _check_limit(limit)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    primes = np.flatnonzero(is_prime).astype(np.int64)
    primes.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes)


def spf_table(limit: int) -> FactorTable:
    """Smallest-prime-factor table for 2 <= n <= limit.

    Multiples of each prime p <= sqrt(limit) that are still unmarked get
    spf = p; whatever remains unmarked afterwards is prime (spf = n).
    """
    limit = _check_limit(limit)
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
            spf[p] = p
    unmarked = np.flatnonzero(spf == 0)
    spf[unmarked] = unmarked  # unmarked n >= 2 have no factor <= sqrt(limit)
    spf[:2] = 0
    spf.setflags(write=False)
    return FactorTable(limit=limit, spf=spf)


def distinct_prime_factors(table: FactorTable, n: int) -> list[int]:
    """Distinct prime factors of n via repeated spf division."""
    if n < 2 or n > table.limit:
        raise ValueError(f"n={n} outside table range [2, {table.limit}]")
    spf = table.spf
    out = []
    while n > 1:
        p = int(spf[n])
        out.append(p)
        while n % p == 0:
            n //= p
    return out


@functools.lru_cache(maxsize=4)
def get_table(limit: int) -> PrimeTable:
    """Shared read-only prime table; cached because sieving dominates
    small-x pipelines otherwise."""
    return sieve_primes(limit)


def save_factor_table(table: FactorTable, path: str | os.PathLike) -> None:
    """Binary cache: magic + version + limit + raw little-endian uint32."""
    header = _SPF_MAGIC + struct.pack("<HQ", _SPF_VERSION, table.limit)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(table.spf.astype("<u4", copy=False).tobytes())


def load_factor_table(path: str | os.PathLike) -> FactorTable:
    with open(path, "rb") as fh:
        magic = fh.read(len(_SPF_MAGIC))
        if magic != _SPF_MAGIC:
            raise ValueError(f"{path}: not a factor-table cache file")
        version, limit = struct.unpack("<HQ", fh.read(10))
        if version != _SPF_VERSION:
            raise ValueError(f"{path}: unsupported cache version {version}")
        raw = fh.read()
    spf = np.frombuffer(raw, dtype="<u4")
    if spf.size != limit + 1:
        raise ValueError(f"{path}: truncated cache (expected {limit + 1} entries, got {spf.size})")
    spf = spf.astype(np.uint32, copy=False)
    spf.setflags(write=False)
    return FactorTable(limit=int(limit), spf=spf)


def cached_factor_table(limit: int, cache_dir: str | os.PathLike | None = None) -> FactorTable:
    """spf table, loading from / storing to a per-limit cache file when a
    cache directory is given. Cache use is behaviorally invisible: a
    corrupt or mismatched file is ignored and rebuilt."""
    limit = _check_limit(limit)
    if cache_dir is None:
        return spf_table(limit)
    path = os.path.join(cache_dir, f"spf_{limit}.bin")
    if os.path.exists(path):
        try:
            table = load_factor_table(path)
            if table.limit == limit:
                return table
        except (ValueError, OSError):
            pass
    table = spf_table(limit)
    os.makedirs(cache_dir, exist_ok=True)
    tmp = path + ".tmp"
    save_factor_table(table, tmp)
    os.replace(tmp, path)
    return table
