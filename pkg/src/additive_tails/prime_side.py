"""The prime-side measure of a strongly additive function.

Each prime p <= x with g(p) > 0 contributes an atom at value g(p) with
weight g(p)^2/p; the total mass is B(g;x)^2. Normalized by that mass
this is the distribution function the converse theorems recover, and
its moments

    m(ell) = (1/B^2) sum_{p<=x} g(p)^{ell+2}/p

feed the series machinery. Atoms are kept per prime (no merging) so
provenance survives; the CDF and moments aggregate on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import fsum as _math_fsum
from math import sqrt

import numpy as np

from ._util import fsum
from .additive import AdditiveFunctionSpec, _primes_up_to
from .distributions import StepDistribution
from .errors import DegenerateError
from .sieve import PrimeTable


@dataclass(frozen=True)
class PrimeMeasure:
    """Weighted point set {(g(p), g(p)^2/p) : p <= x, g(p) > 0}."""

    values: np.ndarray
    weights: np.ndarray
    total_mass: float

    @property
    def b(self) -> float:
        """B(g;x) = sqrt of the total mass."""
        return sqrt(self.total_mass)

    @cached_property
    def _aggregated(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(distinct values ascending, mass per value, cumulative mass);
        group masses use exact summation."""
        order = np.argsort(self.values, kind="stable")
        sv = self.values[order]
        sw = self.weights[order]
        starts = np.concatenate([[0], np.flatnonzero(np.diff(sv) > 0) + 1])
        ends = np.concatenate([starts[1:], [sv.size]])
        distinct = sv[starts]
        masses = np.array([_math_fsum(sw[a:b].tolist()) for a, b in zip(starts, ends)])
        return distinct, masses, np.cumsum(masses)

    def aggregated(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct atom values and their exact total weights."""
        distinct, masses, _ = self._aggregated
        return distinct, masses

    def jumps(self) -> np.ndarray:
        return self._aggregated[0]

    def cdf(self, t: float) -> float:
        """Normalized mass at or below t, half-weight exactly at t."""
        if self.total_mass <= 0.0:
            raise DegenerateError("measure has no mass")
        _, mid, _ = self._cdf_triple(np.array([float(t)]))
        return float(mid[0])

    def _cdf_triple(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        distinct, _, cum = self._aggregated
        cum = np.concatenate([[0.0], cum]) / self.total_mass
        below = cum[np.searchsorted(distinct, ts, side="left")]
        upto = cum[np.searchsorted(distinct, ts, side="right")]
        return below, 0.5 * (below + upto), upto

    def moment(self, ell: int) -> float:
        """(1/B^2) sum g(p)^{ell+2}/p; moment(0) = 1 by normalization."""
        if ell == 0:
            return 1.0
        distinct, masses, _ = self._aggregated
        return fsum(masses * distinct ** int(ell)) / self.total_mass


def prime_measure(
    spec: AdditiveFunctionSpec, x: int, table: PrimeTable | None = None
) -> PrimeMeasure:
    """Atoms (g(p), g(p)^2/p) over primes p <= x with g(p) > 0.

    The total mass is the same exact sum as ``prime_variance``:
    dropping zero-value atoms removes only exact-zero terms.
    """
    primes = _primes_up_to(x, table)
    g = spec.values_on_primes(primes)
    keep = g > 0.0
    values = g[keep]
    if values.size == 0:
        raise DegenerateError(f"{spec.name!r} vanishes on every prime <= {x}")
    weights = values * values / primes[keep]
    total = fsum(weights)
    values.setflags(write=False)
    weights.setflags(write=False)
    return PrimeMeasure(values=values, weights=weights, total_mass=total)


def kolmogorov_distance(measure, target: StepDistribution) -> float:
    """sup_t |K(t) - Psi(t)| for two step laws under the midpoint
    convention.

    Both CDFs are piecewise constant, so the sup over all of R is
    attained by probing every jump of either side from the left, at the
    jump, and from the right.
    """
    ts = np.union1d(np.asarray(measure.jumps(), dtype=np.float64), target.jumps())
    a_left, a_mid, a_right = measure._cdf_triple(ts)
    b_left, b_mid, b_right = target._cdf_triple(ts)
    dev = np.maximum(
        np.abs(a_left - b_left), np.maximum(np.abs(a_mid - b_mid), np.abs(a_right - b_right))
    )
    return float(dev.max())
