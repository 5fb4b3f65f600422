"""
Tests for reduction types, Serre levels and irreducibility criteria.
"""

import random
from math import comb, gcd

import pytest


class TestClassification:
    """Test classify_prime and the conductor."""

    def test_multiplicative(self):
        """2^11 + 1 = 3 * 683."""
        from src.localdata import MULTIPLICATIVE, STEINBERG, classify_prime

        report = classify_prime(11, 2, 1, 3)
        assert report.type == MULTIPLICATIVE
        assert report.conductor_exponent == 1
        assert report.inertial_type == STEINBERG
        assert report.to_json()['inertia_order'] == 'UNKNOWN'

    def test_supercuspidal_at_two(self):
        from src.localdata import ADDITIVE, SUPERCUSPIDAL, classify_prime

        report = classify_prime(11, 2, 1, 2)
        assert (report.type, report.conductor_exponent, report.inertia_order) == (ADDITIVE, 2, 11)
        assert report.inertial_type == SUPERCUSPIDAL

    def test_principal_series_at_two(self):
        """2^3 = 1 mod 7, so the prime above 2 in Q(zeta_7)^+ has residue field F_8."""
        from src.localdata import PRINCIPAL_SERIES, classify_prime

        assert classify_prime(7, 2, 1, 2).inertial_type == PRINCIPAL_SERIES

    def test_good(self):
        from src.localdata import GOOD, classify_prime

        report = classify_prime(5, 2, 1, 7)
        assert report.type == GOOD
        assert report.conductor_exponent == 0

    def test_prime_above_r(self):
        from src.localdata import PRINCIPAL_SERIES, SUPERCUSPIDAL, TWIST_OF_STEINBERG, classify_prime

        assert classify_prime(5, 2, 1, 5).inertial_type == PRINCIPAL_SERIES
        assert classify_prime(7, 2, 1, 7).inertial_type == SUPERCUSPIDAL
        assert classify_prime(7, 2, 5, 7).inertial_type == TWIST_OF_STEINBERG

    def test_parity(self):
        from src.errors import UnsupportedParityError
        from src.localdata import classify_prime

        with pytest.raises(UnsupportedParityError):
            classify_prime(5, 1, 2, 2)
        with pytest.raises(UnsupportedParityError):
            classify_prime(5, 2, 3, 2)

    def test_conductor(self):
        from src.localdata import conductor

        cond = conductor(5, 2, 1)
        assert [rep.q for rep in cond.reports] == [2, 3, 5, 11]
        assert cond.multiplicative_primes == [3, 11]
        assert cond.exponent(2) == 2
        assert cond.exponent(7) == 0


class TestSerreLevel:

    def test_levels(self):
        from src.localdata import conductor, serre_level

        level = serre_level(5, 1)
        assert (level.e2, level.er, level.nd_primes) == (2, 2, ())
        assert level.compatible_with(conductor(5, 2, 1))

        twisted = serre_level(7, 3, True)
        assert twisted.er == 1
        assert twisted.nd_primes == (3,)
        assert twisted.describe() == "q_2^2 * q_7 * n_3"

    def test_d_must_be_rth_power_free(self):
        from src.errors import InvalidParameterError
        from src.localdata import serre_level

        with pytest.raises(InvalidParameterError):
            serre_level(7, 2 ** 7)
        with pytest.raises(InvalidParameterError):
            serre_level(7, 0)


class TestSemistableCongruences:
    """Test the shifted-coefficient battery when r | a + b."""

    def test_worked_pair(self):
        """phi_5(2, 3) = 55 = 80 mod 25."""
        from src.localdata import semistable_congruences

        report = semistable_congruences(5, 2, 3)
        assert report.passed, [c for c in report.checks if not c.passed]
        assert report.shifted_coeffs[1] == 5 * 55
        assert report.alphas[3] == comb(7, 3) == 35

    @pytest.mark.parametrize("r,a,b", [(5, 1, 4), (5, -7, 2), (7, 2, 5), (7, 10, -3), (11, 3, 8), (11, -13, 2)])
    def test_battery_passes(self, r, a, b):
        from src.localdata import semistable_congruences

        assert semistable_congruences(r, a, b, workers=2).passed

    @pytest.mark.parametrize("r", [5, 7, 11])
    def test_random_pairs(self, r):
        """Twenty seeded coprime pairs with r | a + b."""
        from src.localdata import semistable_congruences

        rng = random.Random(1000 + r)
        checked = 0
        while checked < 20:
            a = rng.randint(-60, 60)
            b = -a + r * rng.choice([k for k in range(-6, 7) if k])
            if gcd(a, b) != 1:
                continue
            report = semistable_congruences(r, a, b)
            assert report.passed, (a, b, [c for c in report.checks if not c.passed])
            checked += 1

    def test_precondition(self):
        from src.errors import PreconditionError
        from src.localdata import semistable_congruences

        with pytest.raises(PreconditionError):
            semistable_congruences(5, 2, 1)


class TestFiniteness:

    def test_valuation_check(self):
        from src.localdata import finiteness_check

        assert finiteness_check(5, 2, 1, 7, 3) is False
        assert finiteness_check(5, 2, 1, 7, 7) is True

    def test_out_of_scope(self):
        from src.errors import OutOfScopePrimeError
        from src.localdata import finiteness_check

        for q in (2, 5):
            with pytest.raises(OutOfScopePrimeError):
                finiteness_check(5, 2, 1, 7, q)


class TestIrreducibility:
    """Test the irreducibility criteria."""

    def test_supercuspidal_at_two(self):
        from src.localdata import IRREDUCIBLE, irreducibility_report

        report = irreducibility_report(11, 2, 1)
        assert report.verdict == IRREDUCIBLE
        assert report.criterion == 'supercuspidal-at-2'

    def test_supercuspidal_at_r(self):
        from src.localdata import IRREDUCIBLE, irreducibility_report

        report = irreducibility_report(7, 2, 1)
        assert report.verdict == IRREDUCIBLE
        assert report.criterion == 'supercuspidal-at-r'

    def test_inconclusive_without_units(self):
        from src.localdata import INCONCLUSIVE, irreducibility_report

        assert irreducibility_report(7, 2, 5).verdict == INCONCLUSIVE

    def test_unit_norms(self):
        from src.cyclofield import cyclo_field
        from src.localdata import CONDITIONAL, RAY_CLASS_ASSUMPTIONS, irreducibility_report

        K = cyclo_field(7)
        report = irreducibility_report(7, 2, 5, [K.omega(), K.element([1, 1])])
        assert report.verdict == CONDITIONAL
        assert report.m == 42
        assert all(p % 7 in (1, 6) for p in report.candidate_primes)
        assert report.unchecked_assumptions == list(RAY_CLASS_ASSUMPTIONS)

    def test_invalid_units(self):
        from src.cyclofield import cyclo_field
        from src.errors import InvalidUnitError
        from src.localdata import verify_units

        K = cyclo_field(7)
        with pytest.raises(InvalidUnitError):
            verify_units(7, [K.element([2])])
        with pytest.raises(InvalidUnitError):
            verify_units(7, [K.element([-1])])
        verify_units(7, [K.omega(), K.element([1, 1])])


if __name__ == "__main__":
    pytest.main([__file__])
