"""
Tests for point counting, L-polynomials and trace sets.
"""

import math
import random
from math import gcd

import pytest
from sympy import Poly, expand, primerange, symbols

R7_PRIMES = [3, 5, 13, 29, 41, 43, 71, 83, 97, 113]


def sample_pairs(count, seed, bound=6):
    """Seeded coprime (a, b) with ab != 0 and a != -b."""
    rng = random.Random(seed)
    pairs = []
    while len(pairs) < count:
        a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if a * b != 0 and a != -b and gcd(a, b) == 1 and (a, b) not in pairs:
            pairs.append((a, b))
    return pairs


def naive_count(coeffs, p):
    """Points on y^2 = f(x) over F_p by direct enumeration, plus the point at infinity."""
    total = 1
    for x in range(p):
        value = sum(c * x ** i for i, c in enumerate(coeffs)) % p
        if value == 0:
            total += 1
        elif pow(value, (p - 1) // 2, p) == 1:
            total += 2
    return total


class TestPointCounting:
    """Test the table-driven point counter."""

    def test_bijective_power_map(self):
        """y^2 = x^5 + 1 over F_7 has 1 + 7 points."""
        from src.curves import kraus_curve
        from src.frobenius import FiniteFieldSpec, count_points

        model = kraus_curve(5, 0, 1)
        assert count_points(model, FiniteFieldSpec.build(7, 1)) == 8
        assert count_points(model, FiniteFieldSpec.build(3, 2)) == 10
        assert count_points(model, FiniteFieldSpec.build(7, 2)) == 50

    @pytest.mark.parametrize("p", [7, 13, 17, 19])
    def test_prime_fields_match_enumeration(self, p):
        from src.curves import kraus_curve
        from src.frobenius import FiniteFieldSpec, count_points

        model = kraus_curve(5, 2, 1)
        assert count_points(model, FiniteFieldSpec.build(p, 1)) == naive_count(model.integer_coeffs(), p)

    def test_workers_do_not_change_the_count(self):
        from src.curves import kraus_curve
        from src.frobenius import CountingOptions, FiniteFieldSpec, count_points

        model = kraus_curve(7, 2, 1)
        field = FiniteFieldSpec.build(13, 3)
        serial = count_points(model, field)
        threaded = count_points(model, field, CountingOptions(workers=4, chunk_size=64))
        assert serial == threaded

    def test_bad_reduction(self):
        from src.curves import kraus_curve
        from src.errors import BadReductionError
        from src.frobenius import FiniteFieldSpec, count_points

        with pytest.raises(BadReductionError):
            count_points(kraus_curve(5, 2, 1), FiniteFieldSpec.build(11, 1))

    def test_field_size_limit(self):
        from src.curves import kraus_curve
        from src.errors import InvalidParameterError
        from src.frobenius import CountingOptions, FiniteFieldSpec, count_points

        with pytest.raises(InvalidParameterError):
            count_points(kraus_curve(5, 2, 1), FiniteFieldSpec.build(13, 2), CountingOptions(max_field_size=100))

    def test_field_tables(self):
        from src.frobenius import field_tables

        tables = field_tables(3, 2)
        assert sorted(tables.exp.tolist()) == list(range(1, 9))
        assert tables.spec.modulus[-1] == 1

    def test_non_primitive_modulus(self):
        """x^2 + 1 is irreducible over F_3 but x has order 4, so another generator is used."""
        from src.curves import kraus_curve
        from src.frobenius import FieldTables, FiniteFieldSpec, count_points

        spec = FiniteFieldSpec(3, 2, (1, 0, 1))
        tables = FieldTables(spec)
        assert tables.generator != [1, 0]
        assert sorted(tables.exp.tolist()) == list(range(1, 9))
        assert count_points(kraus_curve(5, 0, 1), spec) == 10
        assert count_points(kraus_curve(5, 2, 1), FiniteFieldSpec(7, 2, (1, 0, 1))) == \
            count_points(kraus_curve(5, 2, 1), FiniteFieldSpec.build(7, 2))

    def test_modulus_must_be_irreducible(self):
        from src.errors import InvalidParameterError
        from src.frobenius import FiniteFieldSpec

        for modulus in ((2, 0, 1), (1, 0, 2), (1, 1)):
            with pytest.raises(InvalidParameterError):
                FiniteFieldSpec(3, 2, modulus)


class TestLPolynomial:
    """Test L-polynomials and the real Weil descent."""

    def test_inert_example(self):
        """y^2 = x^5 + 1 at the inert prime above 3: L = (1 + 9T^2)^2."""
        from src.curves import kraus_curve
        from src.frobenius import l_polynomial, real_weil

        lp = l_polynomial(kraus_curve(5, 0, 1), 3, 2)
        assert lp.coeffs == (1, 0, 18, 0, 81)
        assert lp.satisfies_functional_equation()
        assert real_weil(lp).coeffs == (0, 0, 1)

    def test_crosscheck_extra_degree(self):
        from src.curves import kraus_curve
        from src.frobenius import CountingOptions, l_polynomial

        options = CountingOptions(crosscheck=True)
        lp = l_polynomial(kraus_curve(5, 2, 1), 7, 2, options=options)
        assert lp.Q == 49
        assert lp.genus == 2

    def test_functional_equation_check(self):
        from src.frobenius import LPolynomial

        assert LPolynomial((1, 2, 7), 7).satisfies_functional_equation()
        assert not LPolynomial((1, 2, 5), 7).satisfies_functional_equation()


class TestTraceSets:
    """Test T_q extraction and its certificates."""

    def test_inert_trace_is_rational(self):
        from src.cyclofield import cyclo_field
        from src.frobenius import trace_set

        ts = trace_set(5, 0, 1, 3)
        assert ts.splitting.inert
        assert ts.Q == 9
        assert ts.elements == [cyclo_field(5).zero()]

    def test_split_prime_assignment_is_galois_consistent(self):
        from src.cyclofield import cyclo_field
        from src.frobenius import trace_set

        K = cyclo_field(5)
        ts = trace_set(5, 0, 1, 11)
        assert set(ts.prime_assignment) == {0, 1}
        assert K.galois_apply(2, ts.prime_assignment[0]) == ts.prime_assignment[1]
        assert sorted(ts.elements, key=lambda u: u.coeffs) == sorted(set(ts.prime_assignment.values()),
                                                                     key=lambda u: u.coeffs)

    @pytest.mark.parametrize("r,a,b,q", [(5, 0, 1, 11), (7, 0, 1, 13), (7, 0, 1, 29), (11, 2, 1, 23)])
    def test_assignment_follows_label_action(self, r, a, b, q):
        """The trace at sigma_j(P) is sigma_j of the trace at P."""
        from src.cyclofield import cyclo_field
        from src.frobenius import trace_set

        K = cyclo_field(r)
        ts = trace_set(r, a, b, q)
        assert len(ts.prime_assignment) == ts.splitting.n_primes == K.g
        for j in range(1, K.g + 1):
            perm = K.label_permutation(ts.splitting, j)
            for i, u in ts.prime_assignment.items():
                assert ts.prime_assignment[perm[i]] == K.galois_apply(j, u)

    def test_weil_bound(self):
        from src.cyclofield import cyclo_field
        from src.frobenius import trace_set

        K = cyclo_field(7)
        ts = trace_set(7, 2, 1, 13)
        for u in ts.elements:
            for w in K.embeddings(30):
                assert abs(float(K.evaluate(u, w))) <= 2 * math.sqrt(ts.Q) + 1e-6

    def test_bad_primes(self):
        from src.errors import BadReductionError
        from src.frobenius import trace_set

        for q in (2, 5, 3, 11):
            with pytest.raises(BadReductionError):
                trace_set(5, 2, 1, q)

    def test_json_has_string_integers(self):
        from src.frobenius import trace_set

        data = trace_set(5, 2, 1, 7).to_json()
        assert data['Q'] == '49'
        assert all(isinstance(c, str) for u in data['elements'] for c in u['coeffs'])


class TestTraceLaws:
    """Test the interchange law and the Legendre congruence."""

    @pytest.mark.parametrize("q,sign", [(7, 1), (19, -1), (13, 1)])
    def test_interchange(self, q, sign):
        from src.frobenius import interchange_check

        check = interchange_check(5, 2, 1, q)
        assert check.sign == sign
        assert check.holds

    @pytest.mark.parametrize("r,a,b,q", [(5, 2, 1, 7), (5, 2, 1, 19), (7, 2, 1, 13), (7, 2, 1, 29)])
    def test_legendre_congruence(self, r, a, b, q):
        from src.frobenius import legendre_congruence

        check = legendre_congruence(r, a, b, q)
        assert check.holds, check.per_label

    def test_legendre_bad_reduction(self):
        from src.errors import BadReductionError
        from src.frobenius import legendre_trace

        with pytest.raises(BadReductionError):
            legendre_trace(5, 2, 1, 3)

    @pytest.mark.parametrize("r,primes", [(5, [3, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43]), (7, R7_PRIMES)])
    def test_legendre_congruence_on_samples(self, r, primes):
        from src.errors import BadReductionError
        from src.frobenius import legendre_congruence

        for a, b in sample_pairs(5, seed=r):
            checked = 0
            for q in primes:
                if checked == 10:
                    break
                try:
                    check = legendre_congruence(r, a, b, q)
                except BadReductionError:
                    continue
                assert check.holds, (a, b, q, check.per_label)
                checked += 1
            assert checked > 0, (a, b)

    @pytest.mark.parametrize("q", [3, 5, 13, 29])
    def test_interchange_on_samples(self, q):
        from src.cyclofield import residue_degree
        from src.errors import BadReductionError
        from src.frobenius import interchange_check

        Q = q ** residue_degree(7, q)
        for a, b in sample_pairs(5, seed=q):
            try:
                check = interchange_check(7, a, b, q)
            except BadReductionError:
                continue
            assert check.sign == (1 if Q % 4 == 1 else -1)
            assert check.holds, (a, b)


@pytest.mark.slow
class TestCertifiedTraceSweep:
    """Every T_q for r = 5, all good q below 50 and ten seeded pairs."""

    @pytest.mark.parametrize("q", [q for q in primerange(3, 50) if q != 5])
    def test_trace_sets(self, q):
        from src.cyclofield import cyclo_field
        from src.frobenius import interchange_check, trace_set

        K = cyclo_field(5)
        X = symbols('X')
        checked = 0
        for a, b in sample_pairs(10, seed=50):
            if (a ** 5 + b ** 5) % q == 0:
                continue
            ts = trace_set(5, a, b, q)
            Q = ts.Q
            reverse = list(ts.l_poly.reverse())
            for u in ts.elements:
                P = K.char_poly(u)
                expr = expand(X ** K.g * sum(int(c) * (X + Q / X) ** i for i, c in enumerate(P)))
                assert [int(c) for c in reversed(Poly(expr, X).all_coeffs())] == reverse, (a, b, u)
                assert set(K.conjugates(u)) <= set(ts.elements)
                for w in K.embeddings(30):
                    assert abs(float(K.evaluate(u, w))) <= 2 * math.sqrt(Q) + 1e-6

            check = interchange_check(5, a, b, q)
            assert check.sign == (1 if Q % 4 == 1 else -1)
            assert check.holds, (a, b)
            checked += 1
        assert checked > 0


if __name__ == "__main__":
    pytest.main([__file__])
