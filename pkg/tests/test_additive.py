"""Integer-side statistics of strongly additive functions."""

import math
from fractions import Fraction

import numpy as np
import pytest

from additive_tails.additive import (
    congruence_spec,
    constant_spec,
    empirical_tail,
    evaluate_all,
    omega_spec,
    prime_mean,
    prime_variance,
    sampler_spec,
    two_value_limit_target,
    two_value_spec,
)
from additive_tails.distributions import StepDistribution
from additive_tails.errors import CapacityError, DegenerateError, DomainError
from additive_tails.sieve import get_table, spf_table


def spf_additive_oracle(spec, table, spf, n):
    """g(n) by explicit factorization: sum over distinct prime divisors."""
    total = 0.0
    while n > 1:
        p = int(spf[n])
        total += spec.value_at(p, table)
        while n % p == 0:
            n //= p
    return total


class TestEvaluateAll:
    def test_hand_values_to_ten(self, table_1e4):
        stats = evaluate_all(omega_spec(), 10, table_1e4)
        assert stats.values[2:11].tolist() == [1, 1, 1, 1, 2, 1, 1, 1, 2]
        assert stats.values[1] == 0.0

    def test_prime_power_collapse(self, table_1e4):
        stats = evaluate_all(omega_spec(), 10_000, table_1e4)
        for p in (2, 3, 5, 7):
            powers = [p**k for k in range(1, 14) if p**k <= 10_000]
            assert all(stats.values[q] == stats.values[p] for q in powers)

    def test_additivity_on_coprime_pairs(self, rng, table_1e4):
        spec = two_value_spec()
        stats = evaluate_all(spec, 10_000, table_1e4)
        v = stats.values
        checked = 0
        while checked < 200:
            m = int(rng.integers(2, 100))
            n = int(rng.integers(2, 100))
            if math.gcd(m, n) != 1 or m * n > 10_000:
                continue
            assert v[m * n] == pytest.approx(v[m] + v[n], abs=1e-12)
            checked += 1

    def test_against_spf_factorization_oracle(self, rng, table_1e4):
        spec = two_value_spec(0.3, 0.9)
        stats = evaluate_all(spec, 10_000, table_1e4)
        spf = spf_table(10_000).spf
        for n in rng.integers(2, 10_001, size=100).tolist():
            expect = spf_additive_oracle(spec, table_1e4, spf, n)
            assert stats.values[n] == pytest.approx(expect, abs=1e-12)

    def test_capacity_error_beyond_table(self, table_1e4):
        with pytest.raises(CapacityError):
            evaluate_all(omega_spec(), 20_000, table_1e4)


class TestPrimeSums:
    def test_mean_at_ten_rational_oracle(self, table_1e4):
        expect = Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 5) + Fraction(1, 7)
        assert prime_mean(omega_spec(), 10, table_1e4) == pytest.approx(float(expect), abs=1e-15)

    def test_zero_function_mean(self, table_1e4):
        assert prime_mean(constant_spec(0.0), 10_000, table_1e4) == 0.0

    def test_variance_equals_mean_for_indicator(self, table_1e4):
        # 0/1-valued g has g^2 = g.
        spec = congruence_spec(4, 1)
        assert prime_variance(spec, 10_000, table_1e4) == prime_mean(spec, 10_000, table_1e4)

    def test_variance_constant_half_rational_oracle(self, table_1e4):
        expect = Fraction(1, 4) * (
            Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 5) + Fraction(1, 7)
        )
        got = prime_variance(constant_spec(0.5), 10, table_1e4)
        assert got == pytest.approx(float(expect), abs=1e-15)

    def test_mean_against_mpmath_oracle(self, table_1e4):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 30
        primes = table_1e4.primes.tolist()
        oracle = float(mpmath.fsum(mpmath.mpf(1) / p for p in primes))
        got = prime_mean(omega_spec(), 10_000, table_1e4)
        assert got == pytest.approx(oracle, rel=1e-12)

    def test_sum_is_chunking_independent(self, table_1e4):
        # fsum is exactly rounded, so any split of the terms agrees.
        spec = two_value_spec()
        primes = table_1e4.primes
        g = spec.values_on_primes(primes)
        terms = (g / primes).tolist()
        whole = math.fsum(terms)
        chunked = math.fsum([math.fsum(terms[:1234]), math.fsum(terms[1234:])])
        assert whole == pytest.approx(chunked, abs=5e-16)
        assert whole == prime_mean(spec, 10_000, table_1e4)


class TestEmpiricalTail:
    def test_hand_count_at_ten(self, table_1e4):
        stats = evaluate_all(omega_spec(), 10, table_1e4)
        # threshold = mu + 0.5*B ~ 1.718; only 6 and 10 qualify.
        assert empirical_tail(stats, [0.5])[0] == pytest.approx(0.2)

    def test_extreme_deltas(self, table_1e4):
        stats = evaluate_all(omega_spec(), 1000, table_1e4)
        big = empirical_tail(stats, [50.0])[0]
        assert big == 0.0
        everything = (0.0 - stats.mu) / math.sqrt(stats.b2)
        assert empirical_tail(stats, [everything])[0] == 1.0

    def test_monotone_nonincreasing(self, table_1e6):
        stats = evaluate_all(omega_spec(), 100_000, table_1e6)
        tails = empirical_tail(stats, np.linspace(-1, 4, 41))
        assert np.all(np.diff(tails) <= 0)
        assert np.all((tails >= 0) & (tails <= 1))

    def test_ties_included(self, table_1e4):
        # threshold placed exactly on a value level; the count is inclusive
        stats = evaluate_all(omega_spec(), 100, table_1e4)
        b = math.sqrt(stats.b2)
        delta_at_2 = (2.0 - stats.mu) / b
        expect = np.count_nonzero(stats.values[1:] >= 2.0) / 100
        assert empirical_tail(stats, [delta_at_2])[0] == pytest.approx(expect)

    def test_degenerate_rejected(self, table_1e4):
        stats = evaluate_all(constant_spec(0.0), 100, table_1e4)
        with pytest.raises(DegenerateError):
            empirical_tail(stats, [1.0])


class TestSpecFamilies:
    def test_rule_determinism(self, table_1e4):
        primes = table_1e4.primes
        for spec in (
            omega_spec(),
            two_value_spec(),
            congruence_spec(4, 1),
            sampler_spec(StepDistribution(np.array([0.5, 1.0]), np.array([0.25, 0.75]))),
        ):
            first = spec.values_on_primes(primes)
            second = spec.values_on_primes(primes)
            assert np.array_equal(first, second)
            assert first.min() >= 0.0 and first.max() <= spec.bound

    def test_two_value_parity(self, table_1e4):
        primes = table_1e4.primes
        vals = two_value_spec(0.5, 1.0, "odd").values_on_primes(primes)
        assert vals[0] == 0.5  # p_1 = 2
        assert vals[1] == 1.0  # p_2 = 3
        assert vals[2] == 0.5  # p_3 = 5
        swapped = two_value_spec(0.5, 1.0, "even").values_on_primes(primes)
        assert swapped[0] == 1.0

    def test_two_value_limit_target_weights(self):
        target = two_value_limit_target(0.5, 1.0)
        assert target.locations.tolist() == [0.5, 1.0]
        assert target.masses[0] == pytest.approx(0.2)
        assert target.masses[1] == pytest.approx(0.8)

    def test_congruence_indicator(self, table_1e4):
        primes = table_1e4.primes
        vals = congruence_spec(4, 1).values_on_primes(primes)
        expect = (primes % 4 == 1).astype(float)
        assert np.array_equal(vals, expect)

    def test_sampler_hits_target_proportions(self, table_1e6):
        target = StepDistribution(np.array([0.5, 1.0]), np.array([0.2, 0.8]))
        spec = sampler_spec(target)
        from additive_tails.prime_side import kolmogorov_distance, prime_measure

        measure = prime_measure(spec, 1_000_000, table_1e6)
        assert kolmogorov_distance(measure, target) < 0.01

    def test_out_of_range_rule_rejected(self, table_1e4):
        from additive_tails.additive import AdditiveFunctionSpec

        bad = AdditiveFunctionSpec("bad", 1.0, lambda p, i: np.full(p.shape, 2.0))
        with pytest.raises(DomainError):
            bad.values_on_primes(table_1e4.primes)

    def test_selector_validation(self):
        with pytest.raises(DomainError):
            two_value_spec(0.5, 1.0, "sideways")
