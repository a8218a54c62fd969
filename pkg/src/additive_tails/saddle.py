"""Implicit saddle-point (exponential tilt) parameters.

Both sides of the tail correspondence tilt their law until the mean
shifts by Delta*B. With atoms (v_j, W_j) whose masses W_j sum to B^2,
the defining equation is

    phi(theta) = sum_j (W_j / v_j) * (e^{theta v_j} - 1) = Delta * B.

For a PrimeMeasure this is the arithmetic-side equation
sum_p g(p) e^{theta g(p)}/p = mu + Delta*B with mu subtracted
analytically (no cancellation); for a StepDistribution with an external
scale B it is B^2 * integral (e^{theta u}-1)/u dPsi(u) = Delta*B.
phi is strictly increasing with phi(0) = 0, so the positive root is
unique. The solver brackets by doubling, bisects to width 1e-3, then
runs safeguarded Newton down to the residual contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._util import fsum
from .distributions import StepDistribution
from .errors import DomainError, RangeGuardError, SolverError
from .prime_side import PrimeMeasure

# Range guard standing in for the asymptotic smallness of Delta/B: the
# tail formulas degrade as Delta approaches B, so reject beyond half.
DELTA_GUARD = 0.5
# exp argument cap; theta*v_max beyond this would overflow float64.
EXP_CAP = 700.0
_BISECT_WIDTH = 1e-3
_MAX_ITER = 200


@dataclass(frozen=True)
class SaddleSolution:
    """Root of the tilt equation with solver diagnostics."""

    value: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


def _atoms_of(dist, b: float | None) -> tuple[np.ndarray, np.ndarray, float]:
    """(values, masses summing to B^2, B) for either input kind."""
    if isinstance(dist, PrimeMeasure):
        if b is not None and abs(b * b - dist.total_mass) > 1e-9 * dist.total_mass:
            raise DomainError("explicit b disagrees with the measure's total mass")
        values, masses = dist.aggregated()
        return values, masses, dist.b
    if isinstance(dist, StepDistribution):
        if b is None or b <= 0.0:
            raise DomainError("a positive scale b is required with a StepDistribution")
        return dist.locations, dist.masses * (b * b), float(b)
    raise DomainError(f"unsupported distribution type {type(dist).__name__}")


def solve_tilt(
    dist, delta: float, b: float | None = None, guard: float = DELTA_GUARD
) -> SaddleSolution:
    """Unique positive solution of phi(theta) = Delta*B.

    Residual contract: |phi(theta) - Delta*B| <= 1e-12 * (mean + Delta*B)
    where mean is the natural scale of the untranslated equation (B^2
    for these normalized laws). ``guard`` is the documented delta/B
    cutoff; callers probing beyond the default range (e.g. gap
    diagnostics at delta = sqrt(B) when B < 4) widen it explicitly, and
    reports echo the guard they ran under.
    """
    values, masses, b = _atoms_of(dist, b)
    delta = float(delta)
    if not delta > 0.0:
        raise RangeGuardError(f"delta must be positive, got {delta}")
    if delta > guard * b:
        raise RangeGuardError(
            f"delta={delta:g} beyond the range guard {guard:g}*B={guard * b:g}"
        )
    v = values
    inv_v = masses / v
    target = delta * b
    scale = b * b + target
    tol = 1e-13 * scale
    theta_cap = EXP_CAP / float(v.max())

    def phi(theta: float) -> float:
        return fsum(inv_v * np.expm1(theta * v))

    def dphi(theta: float) -> float:
        return fsum(masses * np.exp(theta * v))

    # Bracket [lo, hi]: phi(0) = 0 < target; double from the first-order
    # guess until the sign flips.
    lo, f_lo = 0.0, -target
    hi = delta / b
    iterations = 0
    while True:
        iterations += 1
        if hi > theta_cap:
            raise RangeGuardError(
                f"tilt exceeds the overflow guard (theta*max_value > {EXP_CAP:g})"
            )
        f_hi = phi(hi) - target
        if f_hi >= 0.0:
            break
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if iterations > _MAX_ITER:
            raise SolverError("bracketing failed to find a sign change")
    bracket = (lo, hi)

    while hi - lo > _BISECT_WIDTH:
        iterations += 1
        mid = 0.5 * (lo + hi)
        f_mid = phi(mid) - target
        if f_mid < 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid

    theta = 0.5 * (lo + hi)
    f_theta = phi(theta) - target
    for _ in range(_MAX_ITER):
        if abs(f_theta) <= tol:
            return SaddleSolution(
                value=theta, residual=f_theta, iterations=iterations, bracket=bracket
            )
        iterations += 1
        if f_theta < 0.0:
            lo = theta
        else:
            hi = theta
        step = f_theta / dphi(theta)
        candidate = theta - step
        if not lo < candidate < hi:  # Newton left the bracket: bisect
            candidate = 0.5 * (lo + hi)
        theta = candidate
        f_theta = phi(theta) - target
    raise SolverError(
        f"no convergence after {iterations} iterations "
        f"(residual {f_theta:.3e}, tolerance {tol:.3e}, bracket {bracket})"
    )


@dataclass(frozen=True)
class GapTable:
    """Per-delta comparison of the two tilt parameters."""

    delta: np.ndarray
    eta: np.ndarray  # arithmetic-side tilt (from the measure)
    rho: np.ndarray  # law-side tilt (from the target at the same B)
    gap: np.ndarray  # eta - rho
    b2_gap: np.ndarray  # B^2 * (eta - rho): bounded iff the laws match


def tilt_gap(
    measure: PrimeMeasure,
    target: StepDistribution,
    deltas,
    b: float | None = None,
    guard: float = DELTA_GUARD,
) -> GapTable:
    """Solve both defining equations on a delta grid and report the gap.

    When the normalized measure tracks the target to O(1/B^2), the
    scaled gap B^2*(eta - rho) stays bounded as x grows; a mismatched
    target makes it grow. Callers assert on the table.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=np.float64))
    if b is None:
        b = measure.b
    eta = np.empty_like(deltas)
    rho = np.empty_like(deltas)
    for i, d in enumerate(deltas):
        eta[i] = solve_tilt(measure, d, guard=guard).value
        rho[i] = solve_tilt(target, d, b=b, guard=guard).value
    gap = eta - rho
    return GapTable(delta=deltas, eta=eta, rho=rho, gap=gap, b2_gap=(b * b) * gap)
