"""
Tests for arithmetic in Q(zeta_r)^+.
"""

from fractions import Fraction

import pytest


class TestMinimalPolynomial:
    """Test h and the Dickson/descent helpers."""

    def test_small_minimal_polynomials(self):
        """h for r = 3, 5, 7."""
        from src.cyclofield import minimal_poly

        assert minimal_poly(3) == [1, 1]
        assert minimal_poly(5) == [-1, 1, 1]
        assert minimal_poly(7) == [-1, -2, 1, 1]

    def test_minimal_poly_matches_real_cyclotomic(self):
        """The group-ring expansion agrees with the descent of the cyclotomic polynomial."""
        from src.cyclofield import minimal_poly, real_cyclotomic_minpoly

        for r in (5, 7, 11, 13):
            assert minimal_poly(r) == real_cyclotomic_minpoly(r)

    def test_rejects_non_primes(self):
        from src.cyclofield import minimal_poly
        from src.errors import InvalidParameterError

        for bad in (2, 9, 1, -7):
            with pytest.raises(InvalidParameterError):
                minimal_poly(bad)

    def test_dickson(self):
        from src.cyclofield import dickson

        assert dickson(0) == [2]
        assert dickson(1) == [0, 1]
        assert dickson(2) == [-2, 0, 1]
        assert dickson(3) == [0, -3, 0, 1]

    def test_trace_descent_rejects_bad_shape(self):
        from src.cyclofield import trace_descent
        from src.errors import InconsistentLPolynomialError

        with pytest.raises(InconsistentLPolynomialError):
            trace_descent([1, 2, 3, 1], 5)
        with pytest.raises(InconsistentLPolynomialError):
            trace_descent([1, 1, 1], 5)


class TestElements:
    """Test field elements, norms and the Galois action."""

    def test_norm_and_trace_of_omega(self):
        """For r=5, w has norm -1 and trace -1."""
        from src.cyclofield import cyclo_field

        K = cyclo_field(5)
        assert K.norm_and_trace(K.omega()) == (Fraction(-1), Fraction(-1))

    def test_arithmetic_reduces_mod_h(self):
        from src.cyclofield import cyclo_field

        K = cyclo_field(5)
        w = K.omega()
        assert w * w == K.element([1, -1])
        assert w * w + w - 1 == K.zero()
        assert (w ** 5).is_integral

    def test_denominators_are_normalized(self):
        from src.cyclofield import KElement

        u = KElement(5, (2, 4), -6)
        assert u.coeffs == (-1, -2)
        assert u.denominator == 3
        assert not u.is_integral

    def test_galois_action(self):
        """sigma_2(w) = w^2 - 2 = -1 - w for r=5."""
        from src.cyclofield import cyclo_field

        K = cyclo_field(5)
        image = K.galois_apply(2, K.omega())
        assert image == K.element([-1, -1])
        assert K.galois_apply(2, image) == K.omega()

    def test_galois_images_are_roots_of_h(self):
        from src.cyclofield import cyclo_field

        K = cyclo_field(7)
        for u in K.conjugates(K.omega()):
            total = K.zero()
            for c in reversed(K.h_coeffs):
                total = total * u + c
            assert total == K.zero()

    def test_norm_is_multiplicative(self):
        from src.cyclofield import cyclo_field

        K = cyclo_field(7)
        u = K.element([3, -1, 2])
        v = K.element([1, 1], 2)
        assert K.norm(u * v) == K.norm(u) * K.norm(v)

    def test_char_poly_of_rational(self):
        from src.cyclofield import cyclo_field

        K = cyclo_field(7)
        assert K.char_poly(K.from_rational(2)) == [Fraction(-8), Fraction(12), Fraction(-6), Fraction(1)]

    def test_embeddings_match_galois_action(self):
        import mpmath

        from src.cyclofield import cyclo_field

        K = cyclo_field(7)
        w1 = K.embeddings()[0]
        for j, wj in enumerate(K.embeddings(), start=1):
            image = K.galois_apply(j, K.omega())
            assert abs(K.evaluate(image, w1) - wj) < mpmath.mpf(10) ** -10

    def test_mixing_fields_raises(self):
        from src.cyclofield import cyclo_field
        from src.errors import InvalidParameterError

        with pytest.raises(InvalidParameterError):
            cyclo_field(5).omega() + cyclo_field(7).omega()


class TestPrimeSplitting:
    """Test the splitting of rational primes and residue maps."""

    def test_split_and_inert(self):
        from src.cyclofield import cyclo_field

        K = cyclo_field(5)
        split = K.split_prime(11)
        assert (split.f, split.n_primes) == (1, 2)
        assert split.factors == ((4, 1), (8, 1))

        inert = K.split_prime(3)
        assert inert.inert
        assert inert.residue_size == 9

    def test_ramified_prime(self):
        from src.cyclofield import RAMIFIED, cyclo_field

        K = cyclo_field(7)
        splitting = K.split_prime(7)
        assert splitting.ramified
        assert splitting.multiplicity == 3
        assert splitting.to_json()['multiplicity'] == 3
        assert K.split_prime(13).multiplicity == 1
        assert K.reduce_mod_prime(K.omega(), RAMIFIED) == (2,)

    @pytest.mark.parametrize("r", [5, 7, 11, 13])
    def test_ramified_factor_power_is_h(self, r):
        """h = (x - 2)^g mod r."""
        from math import comb

        from src.cyclofield import cyclo_field, minimal_poly

        splitting = cyclo_field(r).split_prime(r)
        g = (r - 1) // 2
        assert splitting.multiplicity == g
        assert splitting.factors == ((r - 2, 1),)
        power = [comb(g, i) * (r - 2) ** (g - i) % r for i in range(g + 1)]
        assert power == [c % r for c in minimal_poly(r)]

    def test_reduce_mod_prime(self):
        from src.cyclofield import cyclo_field

        K = cyclo_field(5)
        labels = K.split_prime(11).labels
        assert K.reduce_mod_prime(K.omega(), labels[0]) == (7,)
        assert K.reduce_mod_prime(K.omega(), labels[1]) == (3,)

    def test_reduce_non_integral_raises(self):
        from src.cyclofield import cyclo_field
        from src.errors import NonIntegralElementError

        K = cyclo_field(5)
        with pytest.raises(NonIntegralElementError):
            K.reduce_mod_prime(K.element([1, 1], 11), K.split_prime(11).labels[0])

    def test_label_permutation(self):
        """sigma_2 swaps the two primes above 11 in Q(zeta_5)^+."""
        from src.cyclofield import cyclo_field

        K = cyclo_field(5)
        splitting = K.split_prime(11)
        assert K.label_permutation(splitting, 1) == [0, 1]
        assert K.label_permutation(splitting, 2) == [1, 0]

    def test_label_permutation_order_three(self):
        """h = (x - 10)(x - 8)(x - 7) mod 13 for r = 7, and D_2 maps 8 -> 10, 7 -> 8, 10 -> 7."""
        from src.cyclofield import cyclo_field

        K = cyclo_field(7)
        splitting = K.split_prime(13)
        assert splitting.factors == ((3, 1), (5, 1), (6, 1))
        assert K.label_permutation(splitting, 2) == [1, 2, 0]
        assert K.label_permutation(splitting, 3) == [2, 0, 1]

    @pytest.mark.parametrize("r,q", [(7, 13), (7, 29), (7, 43), (11, 23), (11, 43), (11, 67)])
    def test_label_permutation_respects_residues(self, r, q):
        """u mod P and sigma(u) mod sigma(P) agree in the common residue field F_q."""
        from src.cyclofield import cyclo_field

        K = cyclo_field(r)
        splitting = K.split_prime(q)
        assert splitting.f == 1
        labels = splitting.labels
        elements = [K.omega(), K.element([1, 0, 2]), K.element([-3, 1, 0, 1]), K.element([1, 0, 5], 2)]
        for j in range(1, K.g + 1):
            perm = K.label_permutation(splitting, j)
            assert sorted(perm) == list(range(splitting.n_primes))
            for u in elements:
                image = K.galois_apply(j, u)
                for i, label in enumerate(labels):
                    assert K.reduce_mod_prime(image, labels[perm[i]]) == K.reduce_mod_prime(u, label)

    def test_label_permutation_composes(self):
        from src.cyclofield import GaloisMap, cyclo_field, galois_index

        K = cyclo_field(11)
        splitting = K.split_prime(23)
        for j in range(1, 6):
            for k in range(1, 6):
                first = K.label_permutation(splitting, k)
                second = K.label_permutation(splitting, j)
                composed = K.label_permutation(splitting, GaloisMap(11, galois_index(11, j * k)))
                assert composed == [second[first[i]] for i in range(5)]

    def test_residue_degree(self):
        from src.cyclofield import residue_degree

        assert residue_degree(7, 13) == 1
        assert residue_degree(7, 3) == 3
        assert residue_degree(11, 2) == 5


if __name__ == "__main__":
    pytest.main([__file__])
