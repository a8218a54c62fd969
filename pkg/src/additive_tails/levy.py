"""Monte Carlo realization of the centered compound-Poisson limit law.

The law Z(u) attached to an atomic target Psi has characteristic
function

    E[e^{itZ}] = exp(u * integral (e^{itx} - itx - 1)/x^2 dPsi(x)).

For atoms (a_j, w_j) the integral is a finite sum, and the law is
realized exactly by independent Poisson counts: take

    Z = sum_j a_j * (P_j - lam_j),   P_j ~ Poisson(lam_j) independent.

Each centered Poisson term contributes lam_j*(e^{it a_j} - it a_j - 1)
to the characteristic exponent, so matching the target requires
lam_j * (...) = u * w_j/a_j^2 * (...), i.e.

    lam_j = u * w_j / a_j^2.

For Psi = delta(1) this reduces to Z = P - u with P ~ Poisson(u).
Sampling runs in fixed-size chunks, each on its own counter-based
(Philox) substream keyed by (seed, chunk index); results are merged in
chunk order, so the sample array is byte-identical for a given seed no
matter how many workers run the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._util import fsum
from .distributions import StepDistribution
from .errors import DomainError

_CHUNK = 1 << 16
_Z95 = 1.959963984540054  # Phi^{-1}(0.975)


@dataclass(frozen=True)
class LevySampleBatch:
    """n independent draws of Z(u) for one target, seed-reproducible."""

    u: float
    target: StepDistribution
    seed: int
    n: int
    samples: np.ndarray


def _chunk_stream(seed: int, index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample(
    target: StepDistribution,
    u: float,
    n: int,
    seed: int,
    threads: int = 1,
) -> LevySampleBatch:
    """Draw n samples of Z(u); same (target, u, n, seed) -> same bytes."""
    u = float(u)
    if u <= 0.0:
        raise DomainError(f"intensity u must be positive, got {u}")
    n = int(n)
    if n < 1:
        raise DomainError("need n >= 1")
    a = target.locations
    if np.any(a <= 0.0):
        raise DomainError("atoms must be strictly positive (lam_j divides by a_j^2)")
    lam = u * target.masses / (a * a)

    spans = [(i, min(_CHUNK, n - i * _CHUNK)) for i in range((n + _CHUNK - 1) // _CHUNK)]

    def draw(span):
        index, count = span
        rng = _chunk_stream(seed, index)
        counts = rng.poisson(lam=lam, size=(count, a.size))
        return (counts - lam) @ a

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(draw, spans))
    else:
        parts = [draw(s) for s in spans]
    samples = np.concatenate(parts) if len(parts) > 1 else parts[0]
    samples.setflags(write=False)
    return LevySampleBatch(u=u, target=target, seed=int(seed), n=n, samples=samples)


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Score (Wilson) confidence interval for a binomial proportion."""
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return center - half, center + half


def mc_tail(batch: LevySampleBatch, threshold: float) -> tuple[float, float]:
    """(tail proportion >= threshold, 95% score-interval half-width)."""
    if batch.n < 100:
        raise DomainError("tail estimation needs n >= 100")
    hits = int(np.count_nonzero(batch.samples >= float(threshold)))
    lo, hi = wilson_interval(hits, batch.n)
    return hits / batch.n, 0.5 * (hi - lo)


def char_function(target: StepDistribution, u: float, t: float) -> complex:
    """Exact characteristic function of Z(u) at t."""
    a = target.locations
    w = target.masses
    phase = 1j * t * a
    exponent = u * np.sum(w * (np.exp(phase) - phase - 1.0) / (a * a))
    return complex(np.exp(exponent))


def char_function_check(batch: LevySampleBatch, t_grid) -> float:
    """Max over the grid of |empirical CF - exact CF|.

    The empirical mean of e^{itZ} has component deviations O(1/sqrt(n)),
    so callers hold the result below 5/sqrt(n).
    """
    if batch.n < 10_000:
        raise DomainError("characteristic-function check needs n >= 10^4")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    worst = 0.0
    for t in t_grid:
        empirical = np.exp(1j * t * batch.samples).mean()
        worst = max(worst, abs(empirical - char_function(batch.target, batch.u, float(t))))
    return float(worst)


def batch_variance_band(batch: LevySampleBatch, sigmas: float = 4.0) -> tuple[float, float]:
    """Allowed band for the sample variance around u.

    Var of the sample variance is (m4 - var^2)/n to leading order; the
    fourth central moment of the compound sum follows from the cumulants
    kappa_2 = u, kappa_4 = u * sum w_j a_j^2: m4 = kappa_4 + 3 kappa_2^2.
    """
    u = batch.u
    kappa4 = u * fsum(batch.target.masses * batch.target.locations**2)
    m4 = kappa4 + 3.0 * u * u
    sd = math.sqrt(max(m4 - u * u, 0.0) / batch.n)
    return u - sigmas * sd, u + sigmas * sd
