"""
Tests for the Frey curves and their companion models.
"""

import random
from fractions import Fraction
from math import gcd

import pytest

PAIRS = [(3, 2, 1), (5, 2, 1), (5, -3, 2), (7, 2, 1), (7, 4, -3), (11, 2, 1), (5, 0, 1), (3, 1, 1)]


def random_pairs(count, primes, seed, bound=30):
    """Seeded (r, a, b) with gcd(a, b) = 1 and a^r + b^r != 0."""
    rng = random.Random(seed)
    samples = []
    while len(samples) < count:
        r = rng.choice(primes)
        a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if gcd(a, b) == 1 and a ** r + b ** r != 0:
            samples.append((r, a, b))
    return samples


class TestKrausCurve:
    """Test C_r(a,b) and its discriminant."""

    def test_r11_model(self):
        from src.curves import kraus_curve

        model = kraus_curve(11, 2, 1)
        assert model.genus == 5
        assert model.f_coeffs == (-2047, 352, 0, 880, 0, 616, 0, 176, 0, 22, 0, 1)

    def test_literal_discriminants(self):
        from src.curves import curve_discriminant

        assert curve_discriminant(5, 0, 1) == 800000
        assert curve_discriminant(3, 1, 1) == -1728

    @pytest.mark.parametrize("r,a,b", PAIRS)
    def test_closed_form_matches_model(self, r, a, b):
        from src.curves import closed_form_discriminant, kraus_curve

        assert kraus_curve(r, a, b).discriminant == closed_form_discriminant(r, a, b)

    def test_kraus_discriminant(self):
        """2^7 + 1^7 = 129 = 129 * 1^p."""
        from src.curves import curve_discriminant, kraus_discriminant

        assert kraus_discriminant(7, 129, 1, 13) == curve_discriminant(7, 2, 1)

    def test_invalid_pairs(self):
        from src.curves import kraus_curve
        from src.errors import InvalidParameterError, InvalidSolutionError, SingularCurveError

        with pytest.raises(InvalidSolutionError):
            kraus_curve(5, 2, 4)
        with pytest.raises(SingularCurveError):
            kraus_curve(5, 1, -1)
        with pytest.raises(InvalidParameterError):
            kraus_curve(9, 2, 1)

    def test_model_shape_checks(self):
        from src.curves import HyperellipticModel
        from src.errors import InvalidParameterError

        with pytest.raises(InvalidParameterError):
            HyperellipticModel((1, 0, 1), 1)
        with pytest.raises(InvalidParameterError):
            HyperellipticModel((1, 0, 0, 2), 1)


class TestSpecialization:
    """Test t0, s0 and alpha."""

    def test_values(self):
        from src.curves import frey_specialization

        spec = frey_specialization(5, 2, 1)
        assert spec.t0 == Fraction(32, 33)
        assert spec.alpha_squared == Fraction(32, 1089)
        assert spec.s0_squared == Fraction(961, 32)

    def test_ab_zero_has_no_s0(self):
        from src.curves import frey_specialization

        assert frey_specialization(5, 0, 1).s0_squared is None


class TestCompanionModels:
    """Test the Legendre curve and the twisted model C'_r(t)."""

    def test_legendre_companion(self):
        from src.curves import legendre_companion, legendre_j

        curve = legendre_companion(5, 2, 1)
        assert curve.u == 33
        assert curve.integral_model.f_coeffs == (0, 1089 * 1056, -(1089 + 1056), 1)
        assert curve.j_invariant == legendre_j(5, 2, 1)

    def test_legendre_degenerate(self):
        from src.curves import legendre_companion
        from src.errors import DegenerateLegendreError

        with pytest.raises(DegenerateLegendreError):
            legendre_companion(5, 0, 1)

    @pytest.mark.parametrize("r,a,b", [(3, 2, 1), (5, 2, 1), (7, 2, 3), (7, -3, 4), (11, 2, 1)])
    def test_twist_relation(self, r, a, b):
        from src.curves import twist_relation_holds

        assert twist_relation_holds(r, a, b)

    def test_twist_scaling_links_discriminants(self):
        from src.curves import curve_discriminant, disc_twisted_model, twist_scaling

        lam = twist_scaling(5, 2, 1)
        assert lam == Fraction(33, 4)
        assert disc_twisted_model(5, Fraction(32, 33)) * lam ** 20 == curve_discriminant(5, 2, 1)

    def test_twist_scaling_needs_nonzero_product(self):
        from src.curves import twist_scaling
        from src.errors import DegenerateLegendreError

        with pytest.raises(DegenerateLegendreError):
            twist_scaling(5, 0, 1)

    def test_twisted_discriminant(self):
        from src.curves import disc_twisted_model, twisted_model

        for r, t in ((3, Fraction(1, 3)), (5, Fraction(32, 33)), (5, Fraction(-2, 7))):
            assert twisted_model(r, t).discriminant == disc_twisted_model(r, t)

    def test_valuation_gap_is_multiple_of_r_times_r_minus_1(self):
        from src.curves import twist_discriminant_valuation_gap

        for r, a, b in ((5, 2, 1), (7, 2, 1), (5, -3, 2)):
            for q in (2, 3, 11):
                assert twist_discriminant_valuation_gap(r, a, b, q) % (r * (r - 1)) == 0

    def test_twisted_model_degenerate(self):
        from src.curves import twisted_model
        from src.errors import DegenerateLegendreError

        with pytest.raises(DegenerateLegendreError):
            twisted_model(5, 0)

    def test_interchange_sign(self):
        from src.curves import twist_class
        from src.errors import InvalidParameterError

        twist = twist_class(5, 2, 1)
        assert twist.sign(9) == 1
        assert twist.sign(27) == -1
        with pytest.raises(InvalidParameterError):
            twist.sign(4)

    def test_valuation(self):
        from src.curves import _valuation
        from src.errors import InvalidParameterError

        assert _valuation(Fraction(-250, 9), 5) == 3
        assert _valuation(Fraction(-250, 9), 3) == -2
        assert _valuation(Fraction(7, 2), 11) == 0
        with pytest.raises(InvalidParameterError):
            _valuation(Fraction(0), 3)


class TestRandomSamples:
    """Exact relations on seeded random samples."""

    def test_closed_form_discriminant(self):
        from src.curves import closed_form_discriminant, kraus_curve

        samples = random_pairs(200, (3, 5, 7, 11), seed=2024)
        assert len(samples) == 200
        for r, a, b in samples:
            assert kraus_curve(r, a, b).discriminant == closed_form_discriminant(r, a, b), (r, a, b)

    def test_specialization_relation(self):
        from src.curves import frey_specialization

        for r, a, b in random_pairs(100, (3, 5, 7, 11, 13), seed=7):
            t0 = Fraction(a ** r, a ** r + b ** r)
            special = frey_specialization(r, a, b)
            assert special.t0 == t0
            assert t0 * (1 - t0) * (a ** r + b ** r) ** 2 == (a * b) ** r
            assert special.alpha_squared == t0 * (1 - t0)


if __name__ == "__main__":
    pytest.main([__file__])
