"""Truncated formal power series and the tilt-coefficient recurrences.

Two series drive all tail formulas in this package. For a normalized
measure or target law with moments m(ell), the "shift series"

    F(z) = sum_{k>=1} m(k-1)/k! * z^k       (c[0]=0, c[1]=1)

maps an exponential tilt to the induced normalized mean shift. Its
compositional inverse carries the coefficients that appear inside the
series form of the tail asymptotics. Those inverse coefficients can be
produced two independent ways:

  * ``series_inverse`` reverts the series by triangular elimination of
    the composition identity F(G(z)) = z, and
  * ``tilt_coeffs`` runs the self-referential recurrence

        c[0] = 0,  c[1] = 1,
        c[j] = - sum_{i=2}^{j} m(i-1)/i! * [z^j] (sum_k c[k] z^k)^i,

and the two must agree coefficient-by-coefficient. Convolution sums
accumulate in extended precision (80-bit where available) before
rounding to float64, which keeps degree-30 arithmetic well inside the
advertised tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NonInvertibleError, ShiftedSeriesError

_LD = np.longdouble


def _conv(a: np.ndarray, b: np.ndarray, kmax: int) -> np.ndarray:
    """Truncated Cauchy product in extended precision."""
    return np.convolve(a, b)[: kmax + 1]


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients c[0..kmax] of a power series, exact through degree
    kmax: every operation only ever combines inputs of degree <= kmax
    into outputs of degree <= kmax."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64).ravel().copy()
        if c.size < 2:
            raise ContractError("need at least degree 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def kmax(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def identity(cls, kmax: int) -> "TruncatedSeries":
        c = np.zeros(kmax + 1)
        c[1] = 1.0
        return cls(c)

    def _check_match(self, other: "TruncatedSeries"):
        if self.kmax != other.kmax:
            raise ContractError(f"degree mismatch: {self.kmax} vs {other.kmax}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_match(other)
        return TruncatedSeries(self.coeffs + other.coeffs)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_match(other)
        return TruncatedSeries(self.coeffs - other.coeffs)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_match(other)
        prod = _conv(self.coeffs.astype(_LD), other.coeffs.astype(_LD), self.kmax)
        return TruncatedSeries(prod.astype(np.float64))

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(z)); inner must have zero constant term."""
        self._check_match(inner)
        if inner.coeffs[0] != 0.0:
            raise ShiftedSeriesError("inner series must have zero constant term")
        kmax = self.kmax
        outer = self.coeffs.astype(_LD)
        g = inner.coeffs.astype(_LD)
        acc = np.zeros(kmax + 1, dtype=_LD)
        acc[0] = outer[kmax]
        for k in range(kmax - 1, -1, -1):  # Horner in the series ring
            acc = _conv(acc, g, kmax)
            acc[0] += outer[k]
        return TruncatedSeries(acc.astype(np.float64))


def shift_series(dist, kmax: int) -> TruncatedSeries:
    """Tilt-to-mean-shift series of a normalized atomic law.

    ``dist`` is anything with a ``moment(ell)`` method (a PrimeMeasure
    or a StepDistribution); coefficient k is moment(k-1)/k!.
    """
    c = np.zeros(kmax + 1)
    fact = 1.0
    for k in range(1, kmax + 1):
        fact *= k
        c[k] = dist.moment(k - 1) / fact
    return TruncatedSeries(c)


def series_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse g with f(g(z)) = z through degree kmax.

    Triangular recursion: degree n of the composition identity pins
    g[n] in terms of g[1..n-1], since every power f[k]*(g^k) with
    k >= 2 only reaches degree n through lower g coefficients.
    """
    if f.coeffs[0] != 0.0:
        raise ShiftedSeriesError("cannot invert a series with nonzero constant term")
    if f.coeffs[1] == 0.0:
        raise NonInvertibleError("cannot invert a series with zero linear coefficient")
    kmax = f.kmax
    fc = f.coeffs.astype(_LD)
    g = np.zeros(kmax + 1, dtype=_LD)
    g[1] = 1.0 / fc[1]
    for n in range(2, kmax + 1):
        head = g[: n + 1]
        power = head
        s = _LD(0.0)
        for k in range(2, n + 1):
            power = _conv(power, head, n)
            s += fc[k] * power[n]
        g[n] = -s / fc[1]
    return TruncatedSeries(g.astype(np.float64))


def coeffs_from_moments(moments, kmax: int | None = None) -> np.ndarray:
    """Inverse-tilt coefficients from a normalized moment sequence.

    ``moments[ell]`` plays integral t^ell against the law; moments[0]
    must be 1 (that normalization is what forces c[1] = 1). Inner
    composition sums are evaluated as iterated truncated-series powers.
    """
    m = np.asarray(moments, dtype=np.float64).ravel()
    if m.size == 0 or abs(m[0] - 1.0) > 1e-8:
        raise ContractError(f"moments[0] must be 1, got {m[0] if m.size else None!r}")
    if kmax is None:
        kmax = m.size
    if kmax > m.size:
        raise ContractError(f"need {kmax} moments for degree {kmax}, got {m.size}")
    q = m.astype(_LD)
    inv_fact = np.zeros(kmax + 1, dtype=_LD)
    fact = 1
    for i in range(2, kmax + 1):
        fact *= i
        inv_fact[i] = _LD(1.0) / _LD(fact)
    lam = np.zeros(kmax + 1, dtype=_LD)
    lam[1] = 1.0
    for j in range(2, kmax + 1):
        head = lam[: j + 1]
        power = head
        s = _LD(0.0)
        for i in range(2, j + 1):
            power = _conv(power, head, j)
            s += q[i - 1] * inv_fact[i] * power[j]
        lam[j] = -s
    return lam.astype(np.float64)


def tilt_coeffs(dist, kmax: int) -> np.ndarray:
    """Inverse-tilt coefficient array c[0..kmax] of a measure or target.

    Independent of ``series_inverse(shift_series(dist, kmax))`` as a
    computation, equal to it as a mathematical object; tests hold the
    two routes together to 1e-10.
    """
    moments = np.array([dist.moment(ell) for ell in range(max(kmax, 1))])
    return coeffs_from_moments(moments, kmax)


def geometric_bound_check(coeffs) -> float:
    """Estimate the geometric growth constant: max over k >= 2 of
    |c[k]|^(1/k). Bounded sequences of estimates across k certify the
    |c[k]| <= C^k envelope the tail series rely on."""
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    if c.size < 3:
        raise ContractError("need coefficients through degree >= 2")
    k = np.arange(2, c.size)
    vals = np.abs(c[2:]) ** (1.0 / k)
    return float(vals.max())
