"""Strongly additive functions and their integer-side statistics.

A strongly additive g is determined by its values on primes:
g(n) = sum of g(p) over the distinct primes p dividing n, so
g(p^k) = g(p). The statistics computed here are

    mu(g;x)   = sum_{p<=x} g(p)/p        (centering)
    B(g;x)^2  = sum_{p<=x} g(p)^2/p      (scale; "b2" below)

and the empirical upper-tail density

    D(x;Delta) = (1/x) #{n <= x : g(n) >= mu + Delta*B}.

Both prime sums use exact (Shewchuk) summation in ascending prime
order, so results are bit-stable for a fixed prime table regardless of
chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._util import GOLDEN_FRAC, fsum
from .distributions import StepDistribution
from .errors import CapacityError, DegenerateError, DomainError
from .sieve import DEFAULT_LIMIT, PrimeTable, get_table

VectorRule = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AdditiveFunctionSpec:
    """A rule assigning a value g(p) in [0, bound] to every prime.

    ``vector_rule(primes, indices)`` receives the ascending primes and
    their 1-based indices and must return the values array. Rules are
    pure functions of (p, index-of-p), hence deterministic.
    """

    name: str
    bound: float
    vector_rule: VectorRule

    def values_on_primes(self, primes: np.ndarray) -> np.ndarray:
        indices = np.arange(1, primes.size + 1, dtype=np.int64)
        values = np.asarray(self.vector_rule(primes, indices), dtype=np.float64)
        if values.shape != primes.shape:
            raise DomainError(f"rule for {self.name!r} returned a misshaped array")
        if values.size and (values.min() < 0.0 or values.max() > self.bound):
            raise DomainError(f"rule for {self.name!r} left [0, {self.bound}]")
        return values

    def value_at(self, p: int, table: PrimeTable) -> float:
        i = int(np.searchsorted(table.primes, p))
        if i >= table.primes.size or table.primes[i] != p:
            raise DomainError(f"{p} is not a prime <= {table.limit}")
        return float(self.values_on_primes(table.primes[: i + 1])[-1])


def omega_spec() -> AdditiveFunctionSpec:
    """g(p) = 1 for every prime: g(n) = number of distinct prime factors."""
    return AdditiveFunctionSpec("omega", 1.0, lambda p, i: np.ones_like(p, dtype=np.float64))


def constant_spec(value: float) -> AdditiveFunctionSpec:
    """g(p) = value for every prime."""
    value = float(value)
    if value < 0.0:
        raise DomainError("constant value must be >= 0")
    bound = value if value > 0.0 else 1.0
    return AdditiveFunctionSpec(
        f"constant:{value:g}", bound, lambda p, i, v=value: np.full(p.shape, v)
    )


def two_value_spec(a: float = 0.5, b: float = 1.0, selector: str = "odd") -> AdditiveFunctionSpec:
    """g(p) = a on one prime-index parity class, b on the other.

    selector "odd" gives a to odd-indexed primes (p_1=2, p_3=5, ...).
    """
    if selector not in ("odd", "even"):
        raise DomainError(f"unknown selector {selector!r}")
    a, b = float(a), float(b)
    if min(a, b) < 0.0:
        raise DomainError("two-value levels must be >= 0")
    want = 1 if selector == "odd" else 0

    def rule(p, i, a=a, b=b, want=want):
        return np.where(i % 2 == want, a, b)

    return AdditiveFunctionSpec(f"two-value:{a:g},{b:g},{selector}", max(a, b, 1e-300), rule)


def two_value_limit_target(a: float = 0.5, b: float = 1.0) -> StepDistribution:
    """Limiting prime-side law of ``two_value_spec``: the index-parity
    classes carry equal 1/p-mass in the limit, so the atom weights are
    proportional to (a^2, b^2)."""
    a, b = float(a), float(b)
    if not 0.0 < a < b:
        raise DomainError("need 0 < a < b")
    total = a * a + b * b
    return StepDistribution(np.array([a, b]), np.array([a * a / total, b * b / total]))


def congruence_spec(modulus: int, residue: int) -> AdditiveFunctionSpec:
    """Indicator g(p) = 1 when p = residue (mod modulus), else 0."""
    modulus, residue = int(modulus), int(residue)
    if modulus < 2 or not 0 <= residue < modulus:
        raise DomainError("need modulus >= 2 and 0 <= residue < modulus")

    def rule(p, i, m=modulus, r=residue):
        return (p % m == r).astype(np.float64)

    return AdditiveFunctionSpec(f"congruence:{modulus},{residue}", 1.0, rule)


def sampler_spec(target: StepDistribution) -> AdditiveFunctionSpec:
    """Assign atom values to primes so the prime-side measure converges
    to ``target``.

    The atom with mass w_j at location a_j must receive a fraction
    q_j proportional to w_j/a_j^2 of the primes (the measure weights
    each prime by g(p)^2/p, and index classes of density q carry
    1/p-mass fraction q in the limit). Assignment follows the golden
    low-discrepancy sequence on the prime index, so it is a pure
    function of the index with O(log N / N) discrepancy.
    """
    q = target.masses / target.locations**2
    q = q / fsum(q)
    cuts = np.cumsum(q)
    cuts[-1] = 1.0
    locations = target.locations.copy()

    def rule(p, i, cuts=cuts, locations=locations):
        y = (i * GOLDEN_FRAC) % 1.0
        return locations[np.searchsorted(cuts, y, side="right")]

    pairs = ",".join(f"{a:g}={w:g}" for a, w in zip(target.locations, target.masses))
    return AdditiveFunctionSpec(f"sampler:{pairs}", float(target.locations[-1]), rule)


@dataclass(frozen=True)
class IntegerStats:
    """g evaluated on every n <= x plus the prime-sum statistics."""

    x: int
    mu: float
    b2: float
    values: np.ndarray  # values[n] = g(n); values[0] = values[1] = 0


def _primes_up_to(x: int, table: PrimeTable | None) -> np.ndarray:
    if table is None:
        table = get_table(max(int(x), 2) if x > DEFAULT_LIMIT else DEFAULT_LIMIT)
    if x > table.limit:
        raise CapacityError(f"x={x} exceeds the sieve limit {table.limit}")
    primes = table.primes
    cut = int(np.searchsorted(primes, x, side="right"))
    return primes[:cut]


def prime_mean(spec: AdditiveFunctionSpec, x: int, table: PrimeTable | None = None) -> float:
    """mu(g;x) = sum_{p<=x} g(p)/p, exactly summed in ascending order."""
    primes = _primes_up_to(x, table)
    g = spec.values_on_primes(primes)
    return fsum(g / primes)


def prime_variance(spec: AdditiveFunctionSpec, x: int, table: PrimeTable | None = None) -> float:
    """B(g;x)^2 = sum_{p<=x} g(p)^2/p, exactly summed in ascending order."""
    primes = _primes_up_to(x, table)
    g = spec.values_on_primes(primes)
    return fsum(g * g / primes)


def evaluate_all(
    spec: AdditiveFunctionSpec, x: int, table: PrimeTable | None = None
) -> IntegerStats:
    """Evaluate g(n) for every n <= x by sieving over primes.

    Adding g(p) along every stride-p slice touches each n once per
    distinct prime divisor, which is exactly strong additivity. Primes
    above sqrt(x) are handled in batches grouped by multiple count so
    the python-level loop stays O(sqrt(x)).
    """
    x = int(x)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    primes = _primes_up_to(x, table)
    g = spec.values_on_primes(primes)
    values = np.zeros(x + 1, dtype=np.float64)
    sq = math.isqrt(x)
    n_small = int(np.searchsorted(primes, sq, side="right"))
    for p, gp in zip(primes[:n_small].tolist(), g[:n_small].tolist()):
        if gp != 0.0:
            values[p::p] += gp
    big_p, big_g = primes[n_small:], g[n_small:]
    j = 1
    while True:
        hi = x // j
        if hi <= sq:
            break
        k = int(np.searchsorted(big_p, hi, side="right"))
        if k:
            values[big_p[:k] * j] += big_g[:k]
        j += 1
    mu = fsum(g / primes)
    b2 = fsum(g * g / primes)
    values.setflags(write=False)
    return IntegerStats(x=x, mu=mu, b2=b2, values=values)


def empirical_tail(stats: IntegerStats, deltas) -> np.ndarray:
    """D(x;Delta) for each Delta in the grid: the fraction of n <= x
    with g(n) >= mu + Delta*B. Ties at the threshold are counted."""
    if stats.b2 <= 0.0:
        raise DegenerateError("B^2 = 0: the function vanishes on all primes in range")
    deltas = np.atleast_1d(np.asarray(deltas, dtype=np.float64))
    b = math.sqrt(stats.b2)
    ordered = np.sort(stats.values[1:])
    thresholds = stats.mu + deltas * b
    counts = ordered.size - np.searchsorted(ordered, thresholds, side="left")
    return counts / float(stats.x)
