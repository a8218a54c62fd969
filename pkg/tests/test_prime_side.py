"""Prime-side measures, step targets, and the Kolmogorov distance."""

import numpy as np
import pytest

from additive_tails.additive import (
    congruence_spec,
    constant_spec,
    omega_spec,
    prime_variance,
    two_value_spec,
)
from additive_tails.distributions import StepDistribution
from additive_tails.errors import DegenerateError, DomainError
from additive_tails.prime_side import PrimeMeasure, kolmogorov_distance, prime_measure
from additive_tails._util import fsum


class TestStepDistribution:
    def test_unit_step_midpoint_convention(self):
        d = StepDistribution.delta(1.0)
        assert d.cdf(0.999) == 0.0
        assert d.cdf(1.0) == 0.5
        assert d.cdf(1.001) == 1.0

    def test_total_mass_one(self):
        d = StepDistribution(np.array([0.25, 0.5, 1.0]), np.array([0.1, 0.4, 0.5]))
        assert d.cdf(2.0) == 1.0
        assert d.cdf(0.1) == 0.0

    def test_moments(self):
        d = StepDistribution(np.array([0.5, 1.0]), np.array([0.5, 0.5]))
        assert d.moment(0) == 1.0
        assert d.moment(1) == pytest.approx(0.75)
        assert d.moment(2) == pytest.approx(0.625)

    @pytest.mark.parametrize(
        "locations,masses",
        [
            ([0.0, 1.0], [0.5, 0.5]),  # atom at 0
            ([1.0, 0.5], [0.5, 0.5]),  # not increasing
            ([0.5, 1.0], [0.5, 0.6]),  # mass not 1
            ([0.5, 1.0], [1.1, -0.1]),  # negative mass
        ],
    )
    def test_validation(self, locations, masses):
        with pytest.raises(DomainError):
            StepDistribution(np.array(locations, dtype=float), np.array(masses, dtype=float))


class TestPrimeMeasure:
    def test_omega_atoms_to_ten(self, table_1e4):
        m = prime_measure(omega_spec(), 10, table_1e4)
        assert m.values.tolist() == [1.0, 1.0, 1.0, 1.0]
        assert m.weights == pytest.approx([1 / 2, 1 / 3, 1 / 5, 1 / 7])

    def test_zero_valued_primes_absent(self, table_1e4):
        # p = 2 has p % 4 = 2, so the congruence indicator drops it.
        m = prime_measure(congruence_spec(4, 1), 100, table_1e4)
        primes_present = {int(round(1 / w)) for w in m.weights}
        assert 2 not in primes_present
        assert 5 in primes_present

    def test_total_mass_matches_variance_exactly(self, table_1e6):
        spec = two_value_spec()
        m = prime_measure(spec, 10_000, table_1e6)
        assert m.total_mass == prime_variance(spec, 10_000, table_1e6)

    def test_atoms_not_merged(self, table_1e4):
        m = prime_measure(omega_spec(), 100, table_1e4)
        assert m.values.size == 25  # one atom per prime, same value

    def test_degenerate_rejected(self, table_1e4):
        with pytest.raises(DegenerateError):
            prime_measure(constant_spec(0.0), 100, table_1e4)


class TestMeasureCdf:
    def test_omega_midpoint(self, table_1e4):
        m = prime_measure(omega_spec(), 10, table_1e4)
        assert m.cdf(0.5) == 0.0
        assert m.cdf(1.0) == 0.5
        assert m.cdf(1.5) == 1.0

    def test_two_atom_between(self):
        m = PrimeMeasure(
            values=np.array([0.5, 1.0]), weights=np.array([0.3, 0.3]), total_mass=0.6
        )
        assert m.cdf(0.75) == pytest.approx(0.5)

    def test_limits_and_monotonicity(self, rng):
        vals = rng.uniform(0.05, 1.0, 40)
        wts = rng.uniform(0.01, 1.0, 40)
        m = PrimeMeasure(values=vals, weights=wts, total_mass=fsum(wts))
        assert m.cdf(np.inf) == 1.0
        assert m.cdf(0.0) == 0.0
        grid = np.linspace(0.0, 1.2, 100)
        cdfs = np.array([m.cdf(t) for t in grid])
        assert np.all(np.diff(cdfs) >= 0)


class TestMoments:
    def test_normalization(self, rng):
        wts = rng.uniform(0.01, 1.0, 30)
        m = PrimeMeasure(
            values=rng.uniform(0.1, 1.0, 30), weights=wts, total_mass=fsum(wts)
        )
        assert m.moment(0) == 1.0

    def test_omega_all_one(self, table_1e4):
        m = prime_measure(omega_spec(), 10_000, table_1e4)
        assert all(m.moment(ell) == 1.0 for ell in range(10))

    def test_two_atom_first_moment(self):
        m = PrimeMeasure(
            values=np.array([0.5, 1.0]), weights=np.array([0.5, 0.5]), total_mass=1.0
        )
        assert m.moment(1) == pytest.approx(0.75)

    def test_against_quadrature(self, rng):
        # cross-check by explicit weighted sums over atoms
        vals = rng.uniform(0.1, 1.0, 25)
        wts = rng.uniform(0.01, 1.0, 25)
        m = PrimeMeasure(values=vals, weights=wts, total_mass=fsum(wts))
        for ell in range(11):
            direct = float(np.sum(np.sort(wts * vals**ell))) / m.total_mass
            assert m.moment(ell) == pytest.approx(direct, rel=1e-12)


class TestKolmogorovDistance:
    def test_identical_single_atom_laws(self, table_1e4):
        m = prime_measure(omega_spec(), 10_000, table_1e4)
        assert kolmogorov_distance(m, StepDistribution.delta(1.0)) == 0.0

    def test_omega_vs_half_step(self, table_1e4):
        # between 1/2 and 1 the target is already 1 while K is still 0
        m = prime_measure(omega_spec(), 10_000, table_1e4)
        assert kolmogorov_distance(m, StepDistribution.delta(0.5)) == 1.0

    def test_brute_force_grid_oracle(self, rng, table_1e4):
        m = prime_measure(two_value_spec(0.4, 0.9), 10_000, table_1e4)
        target = StepDistribution(np.array([0.4, 0.9]), np.array([0.3, 0.7]))
        got = kolmogorov_distance(m, target)
        # dense grid plus one-sided probes around every jump
        probes = []
        for t in np.concatenate([np.linspace(0.01, 1.2, 3001), m.jumps(), target.jumps()]):
            for shift in (-1e-9, 0.0, 1e-9):
                probes.append(abs(m.cdf(t + shift) - target.cdf(t + shift)))
        assert got == pytest.approx(max(probes), abs=1e-9)

    def test_zero_one_valued_matches_unit_step_off_the_jump(self, table_1e4):
        m = prime_measure(congruence_spec(3, 1), 10_000, table_1e4)
        for t in (0.2, 0.7, 0.999, 1.001, 2.0):
            assert m.cdf(t) == StepDistribution.delta(1.0).cdf(t)
