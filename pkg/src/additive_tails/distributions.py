"""Finite-atom distribution functions on (0, alpha].

A StepDistribution is the target law the prime-side measure of an
additive function is compared against. All evaluation uses the midpoint
convention: a jump of mass w at location a contributes w/2 exactly at
t = a. The unit step delta(a) therefore takes the value 1/2 at its jump,
which is what lets "converges at every t except the jump" be expressed
on a finite grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import fsum
from .errors import DomainError

_MASS_TOL = 1e-9


@dataclass(frozen=True)
class StepDistribution:
    """Atoms (locations, masses) with strictly increasing locations in
    (0, alpha] and masses summing to 1."""

    locations: np.ndarray
    masses: np.ndarray
    alpha: float = field(default=0.0)

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=np.float64).ravel()
        mass = np.asarray(self.masses, dtype=np.float64).ravel()
        if loc.size == 0 or loc.size != mass.size:
            raise DomainError("need matching, nonempty location/mass arrays")
        if not np.all(loc > 0.0):
            raise DomainError("atom locations must be strictly positive")
        if not np.all(np.diff(loc) > 0.0):
            raise DomainError("atom locations must be strictly increasing")
        if not np.all(mass > 0.0):
            raise DomainError("atom masses must be strictly positive")
        total = fsum(mass)
        if abs(total - 1.0) > _MASS_TOL:
            raise DomainError(f"atom masses must sum to 1 (got {total!r})")
        mass = mass / total
        alpha = float(self.alpha) if self.alpha else float(loc[-1])
        if alpha < loc[-1]:
            raise DomainError(f"alpha={alpha} below the largest atom {loc[-1]}")
        loc.setflags(write=False)
        mass.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", mass)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def delta(cls, a: float) -> "StepDistribution":
        """Unit step at a (value 1/2 exactly at the jump)."""
        return cls(np.array([float(a)]), np.array([1.0]))

    def cdf(self, t: float) -> float:
        """Distribution function at t, midpoint convention at jumps."""
        left, mid, _right = self._cdf_triple(np.array([float(t)]))
        del left
        return float(mid[0])

    def moment(self, ell: int) -> float:
        """integral t^ell dPsi(t) = sum_j w_j a_j^ell."""
        if ell == 0:
            return 1.0
        return fsum(self.masses * self.locations ** int(ell))

    def jumps(self) -> np.ndarray:
        return self.locations

    def _cdf_triple(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(left limit, midpoint value, right limit) of the CDF at each t."""
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        below = cum[np.searchsorted(self.locations, ts, side="left")]
        upto = cum[np.searchsorted(self.locations, ts, side="right")]
        return below, 0.5 * (below + upto), upto

    def __repr__(self):
        pairs = ", ".join(f"{a:g}:{w:g}" for a, w in zip(self.locations, self.masses))
        return f"StepDistribution({pairs}; alpha={self.alpha:g})"
