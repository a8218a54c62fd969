"""Numerical pipelines for the two directions of the tail correspondence.

Forward direction (prime-side law -> integer-side tail): for one x,
compare the exact empirical tail of g against the series-form,
saddle-form and Monte Carlo tails of the limit law, row per delta.

Converse direction (integer-side tail -> prime-side law): across an
x grid, extract inverse-tilt coefficients from the prime measure,
invert the coefficient recurrence back into moments, reconstruct an
atomic law from the moments by nonnegative least squares, and measure
its Kolmogorov distance to the claimed target away from the target's
jumps. A matched target makes the distance fall with x; a mismatched
one leaves it bounded away from zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .additive import AdditiveFunctionSpec, empirical_tail, evaluate_all
from .distributions import StepDistribution
from .errors import ContractError, RangeGuardError, ReconstructionError
from .levy import sample, wilson_interval
from .prime_side import kolmogorov_distance, prime_measure
from .saddle import DELTA_GUARD, solve_tilt
from .series import _LD, _conv, coeffs_from_moments, tilt_coeffs
from .sieve import PrimeTable
from .tails import saddle_tail, series_tail

# Rearranging the coefficient recurrence for the top moment multiplies
# by (k+1)!, so recovered moments lose roughly that factor in relative
# precision; beyond this degree the caller must opt in explicitly.
MOMENT_DEGREE_GUARD = 16
CONTINUITY_MARGIN_FRACTION = 0.02
DEFAULT_ATOM_GRID_SIZE = 64


def moment_condition(kmax: int) -> np.ndarray:
    """First-order error amplification factors coefficient -> moment:
    entry k is (k+1)!."""
    return np.array([math.factorial(k + 1) for k in range(kmax)], dtype=np.float64)


def moments_from_coeffs(coeffs, kmax: int | None = None, allow_deep: bool = False) -> np.ndarray:
    """Recover moments m(0..kmax-1) from inverse-tilt coefficients.

    Inverts the recurrence degree by degree: isolating the top term of

        c[k+1] = - sum_{i=2}^{k} m(i-1)/i! [z^{k+1}] c(z)^i - m(k)/(k+1)!

    yields m(k) from c[2..k+1] and earlier moments. m(0) = 1 is the
    normalization that made c[1] = 1 and is not recoverable from the
    coefficients themselves.
    """
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    if c.size < 2 or c[0] != 0.0 or abs(c[1] - 1.0) > 1e-9:
        raise ContractError("coefficients must start 0, 1")
    if kmax is None:
        kmax = c.size - 1
    if kmax > c.size - 1:
        raise ContractError(f"need coefficients through degree {kmax}, got {c.size - 1}")
    if kmax > MOMENT_DEGREE_GUARD and not allow_deep:
        raise RangeGuardError(
            f"kmax={kmax} beyond the conditioning guard {MOMENT_DEGREE_GUARD} "
            f"(amplification (k+1)!); pass allow_deep=True to override"
        )
    lam = c.astype(_LD)
    # Powers lam^i truncated at kmax, i = 2..kmax; coefficients of a
    # completed c never change, so one pass suffices.
    powers: dict[int, np.ndarray] = {}
    p = lam[: kmax + 1]
    for i in range(2, kmax + 1):
        p = _conv(p, lam[: kmax + 1], kmax)
        powers[i] = p
    inv_fact = [_LD(1.0) / _LD(math.factorial(i)) for i in range(kmax + 2)]
    m = np.zeros(kmax, dtype=_LD)
    m[0] = 1.0
    for k in range(1, kmax):
        s = lam[k + 1]
        for i in range(2, k + 1):
            s += m[i - 1] * inv_fact[i] * powers[i][k + 1]
        m[k] = -_LD(math.factorial(k + 1)) * s
    return m.astype(np.float64)


def default_atom_grid(alpha: float, size: int = DEFAULT_ATOM_GRID_SIZE) -> np.ndarray:
    """size equally spaced candidate atom locations on (0, alpha]."""
    return alpha * np.arange(1, size + 1) / size


def reconstruct_from_moments(
    moments,
    atom_grid,
    mass_tol: float = 1e-6,
    residual_tol: float = 1e-6,
) -> StepDistribution:
    """Fit nonnegative grid-atom masses to a moment vector.

    Solves min ||A m - moments||_2 over m >= 0 with A[l, j] = a_j^l
    (Lawson-Hanson NNLS). The l = 0 row ties the masses to total 1;
    fits violating that by more than mass_tol, or with residual above
    residual_tol, raise ReconstructionError.
    """
    m = np.asarray(moments, dtype=np.float64).ravel()
    grid = np.asarray(atom_grid, dtype=np.float64).ravel()
    if m.size < 2:
        raise ContractError("need at least moments m(0), m(1)")
    if abs(m[0] - 1.0) > 1e-9:
        raise ContractError(f"moments[0] must be 1, got {m[0]!r}")
    if grid.size == 0 or np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
        raise ContractError("atom grid must be positive and strictly increasing")
    design = grid[np.newaxis, :] ** np.arange(m.size)[:, np.newaxis]
    masses, residual = nnls(design, m)
    if residual > residual_tol:
        raise ReconstructionError(
            f"moment fit residual {residual:.3e} above threshold {residual_tol:.3e}",
            residual=float(residual),
        )
    total = masses.sum()
    if abs(total - 1.0) > mass_tol:
        raise ReconstructionError(
            f"fitted masses sum to {total!r}, off by more than {mass_tol}",
            residual=float(residual),
        )
    keep = masses > 1e-12
    return StepDistribution(grid[keep], masses[keep] / total, alpha=float(grid[-1]))


@dataclass(frozen=True)
class ConvergenceReport:
    """Coefficient gaps against the target across an x grid.

    deltas[i, j] = c_x(k) - c_target(k) at x_grid[i], k = k_range[j];
    predicted_rates holds the heuristic envelope B^(-2^(-(k-1))) the
    gaps are compared to; moments_roundtrip_error[k] is the worst
    coefficient->moment->coefficient round-trip error at degree k.
    """

    x_grid: np.ndarray
    k_range: np.ndarray
    deltas: np.ndarray
    predicted_rates: np.ndarray
    moments_roundtrip_error: np.ndarray
    moment_amplification: np.ndarray
    b_values: np.ndarray


def coefficient_convergence(
    spec: AdditiveFunctionSpec,
    x_grid,
    target: StepDistribution,
    kmax: int,
    table: PrimeTable | None = None,
) -> ConvergenceReport:
    """Tabulate coefficient gaps and round-trip diagnostics; asserts
    nothing itself (tests and callers do)."""
    x_grid = np.asarray(sorted(int(x) for x in np.atleast_1d(x_grid)), dtype=np.int64)
    target_coeffs = tilt_coeffs(target, kmax)
    k_range = np.arange(2, kmax + 1)
    deltas = np.zeros((x_grid.size, k_range.size))
    rates = np.zeros_like(deltas)
    b_values = np.zeros(x_grid.size)
    depth = min(kmax, 12)
    roundtrip = np.zeros((x_grid.size, depth))
    for i, x in enumerate(x_grid):
        measure = prime_measure(spec, int(x), table)
        coeffs = tilt_coeffs(measure, kmax)
        b = measure.b
        b_values[i] = b
        deltas[i] = coeffs[2:] - target_coeffs[2:]
        rates[i] = b ** (-np.exp2(-(k_range - 1.0)))
        m = moments_from_coeffs(coeffs[: depth + 1], depth)
        back = coeffs_from_moments(m, depth)
        roundtrip[i] = np.abs(back[1:] - coeffs[1 : depth + 1])
    return ConvergenceReport(
        x_grid=x_grid,
        k_range=k_range,
        deltas=deltas,
        predicted_rates=rates,
        moments_roundtrip_error=roundtrip.max(axis=0),
        moment_amplification=moment_condition(depth),
        b_values=b_values,
    )


def continuity_distance(
    law_a, law_b, t_grid: np.ndarray, margin: float, exclude_atoms: np.ndarray
) -> float:
    """sup |A(t) - B(t)| over grid points at least ``margin`` away from
    every excluded atom (the continuity points of the comparison)."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    keep = np.ones(t_grid.size, dtype=bool)
    for atom in np.asarray(exclude_atoms, dtype=np.float64):
        keep &= np.abs(t_grid - atom) > margin
    ts = t_grid[keep]
    _, a_mid, _ = law_a._cdf_triple(ts)
    _, b_mid, _ = law_b._cdf_triple(ts)
    return float(np.abs(a_mid - b_mid).max())


@dataclass(frozen=True)
class ConverseReport:
    """Tail-law-to-prime-side reconstruction across an x grid."""

    x_grid: np.ndarray
    distances: np.ndarray
    reconstructions: list[StepDistribution]
    convergence: ConvergenceReport
    margin: float
    kmax: int


def converse_check(
    spec: AdditiveFunctionSpec,
    x_grid,
    target: StepDistribution,
    kmax: int = 12,
    t_grid: np.ndarray | None = None,
    margin: float | None = None,
    atom_grid: np.ndarray | None = None,
    table: PrimeTable | None = None,
) -> ConverseReport:
    """Reconstruct the prime-side law from tail coefficients at each x
    and measure its distance to the claimed target at continuity points.
    """
    if margin is None:
        margin = CONTINUITY_MARGIN_FRACTION * target.alpha
    if atom_grid is None:
        atom_grid = default_atom_grid(target.alpha)
    if t_grid is None:
        t_grid = np.linspace(0.0, 1.1 * target.alpha, 1024)
    convergence = coefficient_convergence(spec, x_grid, target, kmax, table)
    distances = np.zeros(convergence.x_grid.size)
    reconstructions = []
    depth = min(kmax, 12)
    for i, x in enumerate(convergence.x_grid):
        measure = prime_measure(spec, int(x), table)
        coeffs = tilt_coeffs(measure, depth)
        moments = moments_from_coeffs(coeffs, depth)
        recon = reconstruct_from_moments(moments, atom_grid)
        reconstructions.append(recon)
        distances[i] = continuity_distance(recon, target, t_grid, margin, target.jumps())
    return ConverseReport(
        x_grid=convergence.x_grid,
        distances=distances,
        reconstructions=reconstructions,
        convergence=convergence,
        margin=float(margin),
        kmax=kmax,
    )


@dataclass(frozen=True)
class TailReport:
    """Per-delta comparison of every tail estimate at one x.

    Theoretical columns are NaN (and ``skipped`` True) outside the
    saddle or series range guards; empirical and Monte Carlo columns
    are always filled.
    """

    x: int
    mu: float
    b2: float
    kolmogorov: float
    mc_n: int
    seed: int
    guard: float
    deltas: np.ndarray
    empirical: np.ndarray
    arith_series: np.ndarray
    arith_saddle: np.ndarray
    levy_series: np.ndarray
    levy_saddle: np.ndarray
    mc_estimate: np.ndarray
    mc_ci_lo: np.ndarray
    mc_ci_hi: np.ndarray
    skipped: np.ndarray
    ratio_emp_levy_saddle: np.ndarray = field(repr=False, default=None)
    ratio_mc_levy_saddle: np.ndarray = field(repr=False, default=None)


def forward_check(
    spec: AdditiveFunctionSpec,
    x: int,
    target: StepDistribution,
    deltas,
    mc_n: int = 100_000,
    seed: int = 1,
    kmax: int = 30,
    table: PrimeTable | None = None,
    threads: int = 1,
    guard: float = DELTA_GUARD,
) -> TailReport:
    """Prime-side-law-to-integer-tail comparison table.

    The Kolmogorov distance between the normalized prime measure and
    the target is reported alongside (it is the strength of the
    hypothesis the forward direction rests on). ``guard`` is the
    delta/B cutoff beyond which theoretical columns are skipped; the
    report records the guard it ran under.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=np.float64))
    stats = evaluate_all(spec, x, table)
    measure = prime_measure(spec, x, table)
    b = measure.b
    kol = kolmogorov_distance(measure, target)
    arith_coeffs = tilt_coeffs(measure, kmax)
    levy_coeffs = tilt_coeffs(target, kmax)
    empirical = empirical_tail(stats, deltas)
    batch = sample(target, measure.total_mass, mc_n, seed, threads=threads)

    nrows = deltas.size
    cols = {
        name: np.full(nrows, np.nan)
        for name in ("arith_series", "arith_saddle", "levy_series", "levy_saddle")
    }
    mc_est = np.zeros(nrows)
    mc_lo = np.zeros(nrows)
    mc_hi = np.zeros(nrows)
    skipped = np.zeros(nrows, dtype=bool)
    for i, d in enumerate(deltas):
        hits = int(np.count_nonzero(batch.samples >= d * b))
        mc_est[i] = hits / mc_n
        mc_lo[i], mc_hi[i] = wilson_interval(hits, mc_n)
        if not 0.0 < d <= guard * b:
            skipped[i] = True
            continue
        try:
            eta = solve_tilt(measure, d, guard=guard)
            rho = solve_tilt(target, d, b=b, guard=guard)
            cols["arith_saddle"][i] = saddle_tail(measure, d, eta).value
            cols["levy_saddle"][i] = saddle_tail(target, d, rho, b=b).value
        except RangeGuardError:
            pass
        for name, coeffs in (("arith_series", arith_coeffs), ("levy_series", levy_coeffs)):
            try:
                cols[name][i] = series_tail(coeffs, b, d).value
            except RangeGuardError:
                pass
        skipped[i] = all(math.isnan(cols[name][i]) for name in cols)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_emp = empirical / cols["levy_saddle"]
        ratio_mc = mc_est / cols["levy_saddle"]
    return TailReport(
        x=int(x),
        mu=stats.mu,
        b2=stats.b2,
        kolmogorov=kol,
        mc_n=int(mc_n),
        seed=int(seed),
        guard=float(guard),
        deltas=deltas,
        empirical=empirical,
        mc_estimate=mc_est,
        mc_ci_lo=mc_lo,
        mc_ci_hi=mc_hi,
        skipped=skipped,
        ratio_emp_levy_saddle=ratio_emp,
        ratio_mc_levy_saddle=ratio_mc,
        **cols,
    )
