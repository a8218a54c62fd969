"""Closed-form and asymptotic tail quantities.

Every large-deviation formula here is a product

    value = exp(log_correction) * gaussian_factor

where the Gaussian factor is either the Mills tail
integral_Delta^inf e^{-u^2/2} du / sqrt(2 pi) (series forms) or
e^{Delta^2/2} times it (saddle forms), and the correction exponent
comes either from a truncated coefficient series in Delta/B or from the
tilt parameter plugged into the exponential-moment sums. Within the
series radius the two exponents describe the same function; the
exponent-identity test pins that down numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcx

from ._util import fsum
from .errors import DomainError, RangeGuardError
from .saddle import EXP_CAP, SaddleSolution, _atoms_of
from .series import geometric_bound_check

_SQRT2 = math.sqrt(2.0)
# Series forms are trusted only while C_hat * Delta/B stays below this.
SERIES_RADIUS_GUARD = 0.5


@dataclass(frozen=True)
class TailValue:
    """One evaluated tail formula.

    ``value`` is exp(log_correction)*gaussian_factor clamped into [0,1];
    ``clamped`` records when the raw product exceeded 1 (asymptotic
    forms may, slightly, at tiny delta). ``remainder_bound`` is the
    certified truncation bound on log_correction for series forms.
    """

    log_correction: float
    gaussian_factor: float
    value: float
    form: str
    remainder_bound: float | None = None
    clamped: bool = False


def _finish(log_correction: float, gaussian_factor: float, form: str, remainder=None) -> TailValue:
    raw = math.exp(log_correction) * gaussian_factor
    clamped = raw > 1.0
    return TailValue(
        log_correction=log_correction,
        gaussian_factor=gaussian_factor,
        value=min(raw, 1.0),
        form=form,
        remainder_bound=remainder,
        clamped=clamped,
    )


def mills_tail(delta: float) -> float:
    """Gaussian upper tail integral_delta^inf e^{-u^2/2} du/sqrt(2 pi)."""
    return 0.5 * float(erfc(delta / _SQRT2))


def poisson_tail(lam: float, delta: float) -> float:
    """P(X >= lam + sqrt(lam)*delta) for X ~ Poisson(lam).

    Upward term recursion from the threshold with a log-scaled first
    term; the threshold sits at or beyond the mode for delta >= 0, so
    terms decrease and the sum is stable.
    """
    lam = float(lam)
    if lam <= 0.0:
        raise DomainError(f"poisson_tail needs lam > 0, got {lam}")
    v0 = math.ceil(lam + math.sqrt(lam) * float(delta))
    if v0 <= 0:
        return 1.0
    log_first = -lam + v0 * math.log(lam) - math.lgamma(v0 + 1)
    total = 1.0
    term = 1.0
    v = v0
    while True:
        v += 1
        term *= lam / v
        total += term
        if term <= total * 1e-18:
            break
        if v > v0 + 10_000_000:  # unreachable for sane inputs
            break
    return math.exp(log_first + math.log(total))


def series_tail(coeffs, b: float, delta: float) -> TailValue:
    """Series-form tail from inverse-tilt coefficients.

    exp(-(Delta^3/B) * sum_{k>=0} c[k+2]/(k+3) * (Delta/B)^k) times the
    Mills tail, truncated at the coefficient degree with a certified
    geometric remainder recorded in ``remainder_bound``.
    """
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    if c.size < 3:
        raise DomainError("need coefficients through degree >= 2")
    b = float(b)
    delta = float(delta)
    if b <= 0.0:
        raise DomainError("b must be positive")
    xi = delta / b
    c_hat = geometric_bound_check(c)
    if c_hat > 0.0 and xi > SERIES_RADIUS_GUARD / c_hat:
        raise RangeGuardError(
            f"delta/B={xi:g} outside the series radius guard "
            f"{SERIES_RADIUS_GUARD}/C_hat={SERIES_RADIUS_GUARD / c_hat:g}"
        )
    ktrunc = c.size - 3  # last k included in the sum below
    ks = np.arange(ktrunc + 1)
    terms = c[2:] / (ks + 3.0) * xi**ks
    factor = delta**3 / b
    log_corr = -factor * fsum(terms)
    if c_hat > 0.0 and xi > 0.0:
        remainder = factor * c_hat ** (ktrunc + 3) * xi ** (ktrunc + 1) / (1.0 - c_hat * xi)
    else:
        remainder = 0.0
    return _finish(log_corr, mills_tail(delta), "series", remainder)


def saddle_tail(dist, delta: float, tilt: SaddleSolution, b: float | None = None) -> TailValue:
    """Saddle-form tail at the solved tilt parameter.

    With atoms (v_j, W_j), sum W_j = B^2:

        log_correction = sum_j W_j (e^{theta v_j} - theta v_j - 1)/v_j^2
                         - theta * sum_j (W_j/v_j)(e^{theta v_j} - 1)
        gaussian_factor = e^{Delta^2/2} * mills_tail(Delta)

    For a PrimeMeasure the two sums are the exponential prime sums; for
    a StepDistribution with scale B they are B^2 times the
    corresponding integrals against the law.
    """
    values, masses, b = _atoms_of(dist, b)
    delta = float(delta)
    theta = float(tilt.value)
    if theta * float(values.max()) > EXP_CAP:
        raise RangeGuardError(f"tilt {theta:g} exceeds the overflow guard for these atoms")
    tv = theta * values
    e_expm1 = np.expm1(tv)
    curvature = fsum(masses * (e_expm1 - tv) / (values * values))
    shift = theta * fsum(masses / values * e_expm1)
    gaussian = 0.5 * float(erfcx(delta / _SQRT2))  # e^{Delta^2/2} * mills
    return _finish(curvature - shift, gaussian, "saddle")
