"""Chebyshev-coefficient constructions and the polynomial identity suite behind the Frey curves."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, NamedTuple, Tuple, Union

from sympy import Expr, I, Poly, Rational, Symbol, expand, im, re, symbols
from sympy.polys.domains import QQ, ZZ

from .cyclofield import KElement, X, check_odd_prime, cyclo_field
from .errors import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial, ascending degree."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'coeffs', tuple(coeffs) or (0,))

    @property
    def degree(self) -> int:
        return -1 if self.coeffs == (0,) else len(self.coeffs) - 1

    def evaluate(self, x: Union[int, Fraction]) -> Union[int, Fraction]:
        total = 0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def to_poly(self, domain=ZZ) -> Poly:
        return Poly(list(reversed(self.coeffs)), X, domain=domain)

    def discriminant(self) -> int:
        """disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f), via sympy."""
        return int(self.to_poly().discriminant())

    def __add__(self, other: 'IntPolynomial') -> 'IntPolynomial':
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __str__(self):
        return str(self.to_poly().as_expr())


@dataclass(frozen=True)
class GaussIntPolynomial:
    """Polynomial with Gaussian integer coefficients, stored as (real, imaginary) pairs in ascending degree."""

    coeffs: Tuple[Tuple[int, int], ...]

    @classmethod
    def from_poly(cls, poly: Poly) -> 'GaussIntPolynomial':
        return cls(tuple((int(re(c)), int(im(c))) for c in reversed(poly.all_coeffs())))

    def is_real(self) -> bool:
        return all(b == 0 for _, b in self.coeffs)


class IdentityCheck(NamedTuple):
    name: str
    passed: bool
    detail: str = ""


@dataclass
class IdentityReport:
    """Pass/fail per identity family; detail names the first failing coefficient."""

    r: int
    checks: List[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[IdentityCheck]:
        return [check for check in self.checks if not check.passed]

    def to_json(self) -> Dict[str, Any]:
        return {
            'r': self.r,
            'passed': self.passed,
            'checks': [{'name': c.name, 'passed': c.passed, 'detail': c.detail} for c in self.checks],
        }


class DiscriminantForm(NamedTuple):
    """sign * r_power * (s^2 + 4)^exponent."""

    sign: int
    r_power: int
    exponent: int


def chebyshev_coeffs(r: int) -> List[int]:
    """
    Coefficients c_k = r/(r-k) * binom(r-k, k) for k = 0..(r-1)/2.

    Args:
        r: Odd prime

    Returns:
        [c_0, ..., c_g]
    """
    check_odd_prime(r)
    coeffs = []
    for k in range((r - 1) // 2 + 1):
        numerator = r * comb(r - k, k)
        if numerator % (r - k):
            raise InvalidParameterError(f"c_{k} is not integral for r={r}")
        coeffs.append(numerator // (r - k))
    return coeffs


def big_H(r: int, a: int, b: int) -> IntPolynomial:
    """H(x) = sum_k c_k (ab)^k x^(r-2k), monic of degree r."""
    cheb = chebyshev_coeffs(r)
    coeffs = [0] * (r + 1)
    ab = a * b
    for k, c in enumerate(cheb):
        coeffs[r - 2 * k] = c * ab ** k
    return IntPolynomial(tuple(coeffs))


def phi_r(r: int, a: int, b: int) -> int:
    """(a^r + b^r)/(a + b), exact."""
    if a + b == 0:
        raise InvalidParameterError("a + b must be nonzero")
    total = a ** r + b ** r
    if total % (a + b):
        raise InvalidParameterError(f"a + b does not divide a^{r} + b^{r}")
    return total // (a + b)


def fminus(r: int, s: Union[int, Fraction]) -> Poly:
    """f^-(x) = x h(x^2 + 2) + s over Q."""
    s = Fraction(s)
    return Poly(big_H(r, 1, 1).to_poly().as_expr() + Rational(s.numerator, s.denominator), X, domain=QQ)


def disc_fminus(r: int, s_value: Union[int, Fraction, Symbol, None]) -> Union[Fraction, DiscriminantForm]:
    """
    Closed-form discriminant (-1)^g r^r (s^2 + 4)^g of f^-.

    Args:
        r: Odd prime
        s_value: A rational value of s, or a sympy Symbol / None for the symbolic form

    Returns:
        Exact Fraction, or DiscriminantForm when s is symbolic
    """
    check_odd_prime(r)
    g = (r - 1) // 2
    sign = -1 if g % 2 else 1
    if s_value is None or isinstance(s_value, Expr):
        return DiscriminantForm(sign, r ** r, g)
    s = Fraction(s_value)
    return sign * r ** r * (s * s + 4) ** g


def _first_mismatch(lhs: Poly, rhs: Poly) -> str:
    difference = (lhs - rhs).as_dict()
    if not difference:
        return ""
    monomial = min(difference)
    return f"monomial {monomial}: lhs - rhs = {difference[monomial]}"


def _check(name: str, lhs: Poly, rhs: Poly) -> IdentityCheck:
    detail = _first_mismatch(lhs, rhs)
    return IdentityCheck(name, not detail, detail)


def _h_poly(r: int) -> Poly:
    return Poly(list(reversed(cyclo_field(r).h_coeffs)), X, domain=ZZ)


def check_derivative_identity(r: int) -> IdentityCheck:
    """d/dx[x h(x^2+2)] = (-1)^g r h(-(x^2+2))."""
    h = _h_poly(r)
    g = (r - 1) // 2
    lhs = (Poly(X, X) * h.compose(Poly(X ** 2 + 2, X))).diff(X)
    rhs = (-1) ** g * r * h.compose(Poly(-X ** 2 - 2, X))
    return _check('derivative', lhs, rhs)


def _gaussian_product(r: int) -> Poly:
    h_expr = _h_poly(r).as_expr()
    return Poly(expand(r * h_expr.subs(X, I * X) * h_expr.subs(X, -I * X)), X, domain="ZZ_I")


def gaussian_factor(r: int) -> GaussIntPolynomial:
    """r h(ix) h(-ix) over the Gaussian integers."""
    return GaussIntPolynomial.from_poly(_gaussian_product(r))


def check_gaussian_identity(r: int) -> IdentityCheck:
    """H'(x) = r h(ix) h(-ix), compared over Z[i]."""
    H = big_H(r, 1, 1).to_poly()
    lhs = Poly(H.diff(X).as_expr(), X, domain='ZZ_I')
    rhs = _gaussian_product(r)
    return _check('gaussian', lhs, rhs)


def check_cyclotomic_relation(r: int) -> IdentityCheck:
    """X^(2r) - 1 = (X^2 - 1) G(X) with G(X) = X^(r-1) h(X^2 + X^-2)."""
    h = cyclo_field(r).h_coeffs
    g = (r - 1) // 2
    G = sum((c * X ** (2 * g - 2 * k) * (X ** 4 + 1) ** k for k, c in enumerate(h)), 0)
    lhs = Poly(X ** (2 * r) - 1, X, domain=ZZ)
    rhs = Poly(expand((X ** 2 - 1) * G), X, domain=ZZ)
    return _check('cyclotomic', lhs, rhs)


def check_quotient_map(r: int) -> IdentityCheck:
    """X^r [(X - 1/X) h((X - 1/X)^2 + 2) + s] = X^(2r) + s X^r - 1, cleared of denominators."""
    s = symbols('s')
    cheb = chebyshev_coeffs(r)
    cleared = sum((c * (X ** 2 - 1) ** (r - 2 * k) * X ** (2 * k) for k, c in enumerate(cheb)), 0)
    lhs = Poly(expand(cleared + s * X ** r), X, s, domain=ZZ)
    rhs = Poly(X ** (2 * r) + s * X ** r - 1, X, s, domain=ZZ)
    return _check('quotient_map', lhs, rhs)


def _gauss_mul(u: Tuple[KElement, KElement], v: Tuple[KElement, KElement]) -> Tuple[KElement, KElement]:
    return (u[0] * v[0] - u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def evaluate_in_K_i(r: int, j: int, sign: int) -> Tuple[KElement, KElement]:
    """H(sign * i * w_j, 1) in K(i), returned as (real part, imaginary part)."""
    field_K = cyclo_field(r)
    omega_j = field_K.galois_apply(j, field_K.omega())
    point = (field_K.zero(), sign * omega_j)
    total = (field_K.zero(), field_K.zero())
    for c in reversed(big_H(r, 1, 1).coeffs):
        total = _gauss_mul(total, point)
        total = (total[0] + c, total[1])
    return total


def check_evaluation_identity(r: int) -> IdentityCheck:
    """H(i w_j) = 2 i^r and H(-i w_j) = -2 i^r for every j."""
    field_K = cyclo_field(r)
    i_power_r = 1 if r % 4 == 1 else -1
    for j in range(1, field_K.g + 1):
        for sign in (1, -1):
            value = evaluate_in_K_i(r, j, sign)
            expected_im = field_K.from_rational(2 * sign * i_power_r)
            if value[0] != field_K.zero() or value[1] != expected_im:
                return IdentityCheck('evaluation', False,
                                     f"j={j}, sign={sign}: got {value[0]} + ({value[1]})i")
    return IdentityCheck('evaluation', True)


def check_eisenstein(r: int) -> IdentityCheck:
    """c_0 = 1, r | c_k for k > 0, c_g = r."""
    cheb = chebyshev_coeffs(r)
    if cheb[0] != 1:
        return IdentityCheck('eisenstein', False, f"c_0 = {cheb[0]}")
    for k, c in enumerate(cheb[1:], start=1):
        if c % r:
            return IdentityCheck('eisenstein', False, f"{r} does not divide c_{k} = {c}")
    if cheb[-1] != r:
        return IdentityCheck('eisenstein', False, f"c_g = {cheb[-1]}")
    return IdentityCheck('eisenstein', True)


def identity_suite(r: int, r_max: int = 31) -> IdentityReport:
    """
    Run the six identity families for one prime r.

    Failures are reported, never raised.
    """
    check_odd_prime(r)
    if r > r_max:
        raise InvalidParameterError(f"r={r} exceeds the configured bound {r_max}")
    report = IdentityReport(r=r)
    for check in (check_derivative_identity, check_gaussian_identity, check_cyclotomic_relation,
                  check_quotient_map, check_evaluation_identity, check_eisenstein):
        result = check(r)
        logger.debug("r=%d %s: %s", r, result.name, "pass" if result.passed else result.detail)
        report.checks.append(result)
    return report
