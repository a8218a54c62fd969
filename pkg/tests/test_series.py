"""Series arithmetic, compositional inversion, and the tilt recurrences."""

import math

import numpy as np
import pytest

from additive_tails.additive import omega_spec
from additive_tails.distributions import StepDistribution
from additive_tails.errors import ContractError, NonInvertibleError, ShiftedSeriesError
from additive_tails.prime_side import prime_measure
from additive_tails.series import (
    TruncatedSeries,
    coeffs_from_moments,
    geometric_bound_check,
    series_inverse,
    shift_series,
    tilt_coeffs,
)

LOG1P = [0.0] + [(-1) ** (k + 1) / k for k in range(1, 31)]


def random_target(rng, max_atoms=4, low=0.0):
    natoms = int(rng.integers(1, max_atoms + 1))
    while True:
        locs = np.sort(rng.uniform(low, 1.0, natoms) + 1e-9)
        if natoms == 1 or np.all(np.diff(locs) > 1e-6):
            break
    masses = rng.dirichlet(np.ones(natoms))
    if np.any(masses <= 0):
        masses = np.full(natoms, 1.0 / natoms)
    return StepDistribution(locs, masses)


class TestShiftSeries:
    def test_omega_gives_exp_minus_one(self, table_1e4):
        m = prime_measure(omega_spec(), 10_000, table_1e4)
        s = shift_series(m, 10)
        expect = [0.0] + [1.0 / math.factorial(k) for k in range(1, 11)]
        np.testing.assert_allclose(s.coeffs, expect, atol=1e-15)

    def test_degree_one_is_identity(self, table_1e4):
        m = prime_measure(omega_spec(), 100, table_1e4)
        assert shift_series(m, 1).coeffs.tolist() == [0.0, 1.0]

    def test_unit_step_targets(self):
        s = shift_series(StepDistribution.delta(1.0), 8)
        np.testing.assert_allclose(
            s.coeffs, [0.0] + [1.0 / math.factorial(k) for k in range(1, 9)], atol=1e-16
        )
        s_half = shift_series(StepDistribution.delta(0.5), 8)
        expect = [0.0] + [0.5 ** (k - 1) / math.factorial(k) for k in range(1, 9)]
        np.testing.assert_allclose(s_half.coeffs, expect, atol=1e-16)

    def test_mixture_linearity(self):
        a = StepDistribution.delta(0.5)
        b = StepDistribution.delta(1.0)
        mix = StepDistribution(np.array([0.5, 1.0]), np.array([0.3, 0.7]))
        sa, sb, sm = (shift_series(t, 12).coeffs for t in (a, b, mix))
        np.testing.assert_allclose(sm, 0.3 * sa + 0.7 * sb, atol=1e-15)

    def test_two_atom_quadratic_coefficient(self):
        mix = StepDistribution(np.array([0.5, 1.0]), np.array([0.5, 0.5]))
        assert shift_series(mix, 4).coeffs[2] == pytest.approx(mix.moment(1) / 2.0)


class TestSeriesInverse:
    def test_identity(self):
        f = TruncatedSeries.identity(12)
        assert series_inverse(f).coeffs.tolist() == f.coeffs.tolist()

    def test_exp_minus_one_inverts_to_log(self):
        c = [0.0] + [1.0 / math.factorial(k) for k in range(1, 21)]
        g = series_inverse(TruncatedSeries(c))
        np.testing.assert_allclose(g.coeffs, LOG1P[:21], atol=1e-14)

    def test_z_plus_z_squared_catalan(self):
        # brute-force oracle: alternating Catalan numbers
        catalan = [1, 1, 2, 5, 14, 42, 132]
        c = np.zeros(8)
        c[1], c[2] = 1.0, 1.0
        g = series_inverse(TruncatedSeries(c))
        expect = [0.0] + [(-1) ** k * catalan[k] for k in range(7)]
        np.testing.assert_allclose(g.coeffs, expect, atol=1e-12)

    def test_linear_coefficient_reciprocal(self):
        c = np.zeros(6)
        c[1] = 4.0
        c[3] = 0.5
        g = series_inverse(TruncatedSeries(c))
        assert g.coeffs[1] == pytest.approx(0.25)

    def test_errors(self):
        flat = np.zeros(5)
        with pytest.raises(NonInvertibleError):
            series_inverse(TruncatedSeries(flat))
        shifted = np.zeros(5)
        shifted[0], shifted[1] = 1.0, 1.0
        with pytest.raises(ShiftedSeriesError):
            series_inverse(TruncatedSeries(shifted))

    def test_composition_residual_well_conditioned(self, rng):
        eye = TruncatedSeries.identity(20)
        tested = 0
        for _ in range(200):
            c = np.concatenate([[0.0, 1.0], rng.uniform(-1, 1, 19)])
            f = TruncatedSeries(c)
            g = series_inverse(f)
            gmax = np.abs(g.coeffs).max()
            resid = np.abs(f.compose(g).coeffs - eye.coeffs).max()
            # float64 storage of g floors the achievable residual; the
            # 1e-9 contract applies while the inverse stays moderate.
            assert resid <= 1e-14 * max(1.0, gmax)
            if gmax <= 1e6:
                assert resid <= 1e-9
                tested += 1
        assert tested >= 50

    def test_double_inverse_round_trip(self, rng):
        for _ in range(100):
            c = np.concatenate([[0.0, 1.0], rng.uniform(-1, 1, 19)])
            f = TruncatedSeries(c)
            g = series_inverse(f)
            back = series_inverse(g)
            gmax = np.abs(g.coeffs).max()
            err = np.abs(back.coeffs - c).max()
            assert err <= 1e-13 * max(1.0, gmax)
            if gmax <= 1e6:
                assert err <= 1e-9


class TestTiltCoeffs:
    def test_first_two_coefficients_pinned(self, rng):
        for _ in range(20):
            target = random_target(rng)
            coeffs = tilt_coeffs(target, 12)
            assert coeffs[0] == 0.0
            assert coeffs[1] == 1.0

    def test_omega_matches_log_coefficients(self, table_1e6):
        for x in (100, 10_000, 1_000_000):
            m = prime_measure(omega_spec(), x, table_1e6)
            np.testing.assert_allclose(tilt_coeffs(m, 20), LOG1P[:21], atol=1e-13)

    def test_unit_step_matches_log_coefficients(self):
        np.testing.assert_allclose(
            tilt_coeffs(StepDistribution.delta(1.0), 20), LOG1P[:21], atol=1e-14
        )

    def test_half_step_quadratic_coefficient(self):
        # degree-2 hand expansion: c2 = -(1/2) * integral t dPsi = -1/4
        coeffs = tilt_coeffs(StepDistribution.delta(0.5), 4)
        assert coeffs[2] == pytest.approx(-0.25, abs=1e-15)

    def test_recurrence_equals_inversion(self, rng, table_1e4):
        for _ in range(50):
            target = random_target(rng)
            rec = tilt_coeffs(target, 20)
            inv = series_inverse(shift_series(target, 20)).coeffs
            np.testing.assert_allclose(rec, inv, atol=1e-10)
        m = prime_measure(omega_spec(), 10_000, table_1e4)
        np.testing.assert_allclose(
            tilt_coeffs(m, 20), series_inverse(shift_series(m, 20)).coeffs, atol=1e-10
        )

    def test_measure_coeffs_approach_target_coeffs(self, table_1e6):
        # a sampled spec's coefficients drift toward the sampled law's
        from additive_tails.additive import sampler_spec

        target = StepDistribution(np.array([0.5, 1.0]), np.array([0.25, 0.75]))
        spec = sampler_spec(target)
        target_coeffs = tilt_coeffs(target, 8)
        gaps = []
        for x in (1000, 100_000, 1_000_000):
            m = prime_measure(spec, x, table_1e6)
            gaps.append(np.abs(tilt_coeffs(m, 8) - target_coeffs)[2:].max())
        assert gaps[2] < gaps[0]

    def test_moment_contract(self):
        with pytest.raises(ContractError):
            coeffs_from_moments(np.array([0.5, 1.0, 1.0]), 3)


class TestGeometricBound:
    def test_log_coefficients_bounded_by_one(self):
        assert geometric_bound_check(LOG1P[:21]) <= 1.0

    def test_identity_series(self):
        assert geometric_bound_check(TruncatedSeries.identity(10).coeffs) == 0.0

    def test_catalan_growth(self):
        c = np.zeros(31)
        c[1], c[2] = 1.0, 1.0
        est = geometric_bound_check(series_inverse(TruncatedSeries(c)).coeffs)
        assert 2.5 <= est <= 4.0
        shorter = np.zeros(13)
        shorter[1], shorter[2] = 1.0, 1.0
        est_shorter = geometric_bound_check(series_inverse(TruncatedSeries(shorter)).coeffs)
        assert est_shorter < est  # grows toward 4 with degree


class TestSeriesArithmetic:
    def test_multiplication_exactness(self):
        a = TruncatedSeries(np.array([1.0, 2.0, 3.0, 0.0]))
        b = TruncatedSeries(np.array([0.0, 1.0, -1.0, 0.5]))
        prod = (a * b).coeffs
        np.testing.assert_allclose(prod, [0.0, 1.0, 1.0, 1.5], atol=1e-16)

    def test_degree_k_independence(self, rng):
        # degree-k output must not depend on inputs beyond degree k
        c1 = rng.uniform(-1, 1, 13)
        c2 = rng.uniform(-1, 1, 13)
        full = (TruncatedSeries(c1) * TruncatedSeries(c2)).coeffs
        c1_tail = c1.copy()
        c1_tail[-1] = 99.0
        perturbed = (TruncatedSeries(c1_tail) * TruncatedSeries(c2)).coeffs
        np.testing.assert_allclose(full[:-1], perturbed[:-1], atol=0)

    def test_compose_requires_zero_constant(self):
        f = TruncatedSeries.identity(5)
        g = TruncatedSeries(np.array([1.0, 1.0, 0, 0, 0, 0]))
        with pytest.raises(ShiftedSeriesError):
            f.compose(g)
