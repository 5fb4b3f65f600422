"""
Tests for the Chebyshev constructions and the polynomial identity suite.
"""

import random
from fractions import Fraction

import pytest
from sympy import primerange


class TestChebyshevCoefficients:
    """Test c_k and the polynomials built from them."""

    def test_coefficient_lists(self):
        from src.freypoly import chebyshev_coeffs

        assert chebyshev_coeffs(3) == [1, 3]
        assert chebyshev_coeffs(5) == [1, 5, 5]
        assert chebyshev_coeffs(7) == [1, 7, 14, 7]
        assert chebyshev_coeffs(11) == [1, 11, 44, 77, 55, 11]

    def test_big_H(self):
        """H for r=5 is x^5 + 5ab x^3 + 5a^2b^2 x."""
        from src.freypoly import big_H

        assert big_H(5, 2, 1).coeffs == (0, 20, 0, 10, 0, 1)
        assert big_H(5, 1, 1).degree == 5

    def test_big_H_at_a_minus_b(self):
        """H(a - b) = a^r - b^r on seeded random samples."""
        from src.freypoly import big_H

        rng = random.Random(52)
        for _ in range(100):
            r = rng.choice([3, 5, 7, 11, 13])
            a, b = rng.randint(-50, 50), rng.randint(-50, 50)
            assert big_H(r, a, b).evaluate(a - b) == a ** r - b ** r, (r, a, b)

    def test_phi_r(self):
        from src.errors import InvalidParameterError
        from src.freypoly import phi_r

        assert phi_r(5, 2, 3) == 55
        with pytest.raises(InvalidParameterError):
            phi_r(5, 1, -1)


class TestDiscriminants:
    """Test the closed-form discriminant of f^-."""

    def test_closed_form_values(self):
        from src.freypoly import disc_fminus

        assert disc_fminus(5, 0) == 50000
        assert disc_fminus(3, 1) == -135

    def test_closed_form_matches_resultant(self):
        from src.freypoly import disc_fminus, fminus

        for r in (3, 5, 7):
            for s in (0, 1, -2, Fraction(1, 3)):
                disc = fminus(r, s).discriminant()
                assert Fraction(int(disc.p), int(disc.q)) == disc_fminus(r, s)

    def test_symbolic_form(self):
        from sympy import symbols

        from src.freypoly import DiscriminantForm, disc_fminus

        assert disc_fminus(7, symbols('s')) == DiscriminantForm(-1, 7 ** 7, 3)
        assert disc_fminus(5, None) == DiscriminantForm(1, 5 ** 5, 2)


class TestIdentitySuite:
    """Test the six identity families."""

    @pytest.mark.parametrize("r", [
        pytest.param(r, marks=pytest.mark.slow) if r > 13 else r for r in primerange(3, 32)
    ])
    def test_suite_passes(self, r):
        from src.freypoly import identity_suite

        report = identity_suite(r)
        assert report.passed, report.failures()
        assert [check.name for check in report.checks] == [
            'derivative', 'gaussian', 'cyclotomic', 'quotient_map', 'evaluation', 'eisenstein'
        ]

    def test_evaluation_in_K_i(self):
        """H(i w_1) = 2 i^r, so for r=5 the value is 2i."""
        from src.cyclofield import cyclo_field
        from src.freypoly import evaluate_in_K_i

        K = cyclo_field(5)
        assert evaluate_in_K_i(5, 1, 1) == (K.zero(), K.from_rational(2))
        assert evaluate_in_K_i(5, 2, -1) == (K.zero(), K.from_rational(-2))

    def test_gaussian_factor_is_real(self):
        from src.freypoly import gaussian_factor

        assert gaussian_factor(5).is_real()

    def test_bound_on_r(self):
        from src.errors import InvalidParameterError
        from src.freypoly import identity_suite

        with pytest.raises(InvalidParameterError):
            identity_suite(37, r_max=31)

    def test_report_json(self):
        from src.freypoly import identity_suite

        data = identity_suite(5).to_json()
        assert data['r'] == 5
        assert data['passed'] is True
        assert len(data['checks']) == 6


if __name__ == "__main__":
    pytest.main([__file__])
