"""Frey hyperelliptic curves C_r(a,b), their discriminants and companion models."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Any, Dict, Optional, Tuple, Union

from sympy import Poly, Rational, multiplicity
from sympy.polys.domains import QQ

from .cyclofield import X, check_odd_prime
from .errors import (
    CertificateError,
    DegenerateLegendreError,
    InvalidParameterError,
    InvalidSolutionError,
    SingularCurveError,
)
from .freypoly import big_H, chebyshev_coeffs

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


def _as_fraction(value: Number) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class HyperellipticModel:
    """Odd-degree monic model y^2 = f(x), f_coeffs ascending."""

    f_coeffs: Tuple[Number, ...]
    genus: int
    base_tag: str = 'Z'

    def __post_init__(self):
        if len(self.f_coeffs) != 2 * self.genus + 2:
            raise InvalidParameterError(
                f"genus {self.genus} needs a polynomial of degree {2 * self.genus + 1}, "
                f"got degree {len(self.f_coeffs) - 1}"
            )
        if self.f_coeffs[-1] != 1:
            raise InvalidParameterError("model must be monic")

    @property
    def degree(self) -> int:
        return 2 * self.genus + 1

    @property
    def is_integral(self) -> bool:
        return all(_as_fraction(c).denominator == 1 for c in self.f_coeffs)

    def integer_coeffs(self) -> Tuple[int, ...]:
        if not self.is_integral:
            raise InvalidParameterError("model has non-integral coefficients")
        return tuple(int(c) for c in self.f_coeffs)

    def to_poly(self) -> Poly:
        return Poly([Rational(_as_fraction(c).numerator, _as_fraction(c).denominator)
                     for c in reversed(self.f_coeffs)], X, domain=QQ)

    @cached_property
    def discriminant(self) -> Fraction:
        """2^(4g) disc(f), the discriminant of the odd-degree hyperelliptic model."""
        disc = self.to_poly().discriminant()
        return Fraction(int(disc.p), int(disc.q)) * 2 ** (4 * self.genus)

    def to_json(self) -> Dict[str, Any]:
        return {
            'f_coeffs': [str(c) for c in self.f_coeffs],
            'genus': self.genus,
            'base_tag': self.base_tag,
        }

    def __str__(self):
        return f"y^2 = {self.to_poly().as_expr()}"


@dataclass(frozen=True)
class FreySpecialization:
    """The specialization data t0, s0^2 and alpha^2 attached to (a, b)."""

    r: int
    a: int
    b: int
    t0: Fraction
    s0_squared: Optional[Fraction]
    alpha_squared: Fraction
    two_t0_minus_1: Fraction

    def to_json(self) -> Dict[str, Any]:
        return {
            'r': self.r, 'a': self.a, 'b': self.b,
            't0': str(self.t0),
            's0_squared': None if self.s0_squared is None else str(self.s0_squared),
            'alpha_squared': str(self.alpha_squared),
            'two_t0_minus_1': str(self.two_t0_minus_1),
        }


@dataclass(frozen=True)
class LegendreCurve:
    """L(t0): y^2 = x(x-1)(x-t0), with an integral model scaled by u = a^r + b^r."""

    t0: Fraction
    u: int
    integral_model: HyperellipticModel
    j_invariant: Fraction

    def to_json(self) -> Dict[str, Any]:
        return {
            't0': str(self.t0),
            'u': str(self.u),
            'integral_model': self.integral_model.to_json(),
            'j_invariant': str(self.j_invariant),
        }


@dataclass(frozen=True)
class InterchangeTwist:
    """C_r(b,a) is the quadratic twist of C_r(a,b) by -1."""

    r: int
    a: int
    b: int
    character: str = 'chi_-1'

    def sign(self, norm: int) -> int:
        """Sign relating a_q(J_r(b,a)) to a_q(J_r(a,b)) at a prime of norm `norm`."""
        if norm % 2 == 0:
            raise InvalidParameterError("the interchange law is stated at odd primes")
        return 1 if norm % 4 == 1 else -1

    def to_json(self) -> Dict[str, Any]:
        return {'r': self.r, 'a': self.a, 'b': self.b, 'character': self.character,
                'sign_rule': '+1 if N(q) = 1 mod 4 else -1'}


def validate_pair(r: int, a: int, b: int) -> None:
    """Check r prime, gcd(a, b) = 1 and a^r + b^r != 0."""
    check_odd_prime(r)
    if gcd(a, b) != 1:
        raise InvalidSolutionError(f"gcd({a}, {b}) = {gcd(a, b)}, expected 1")
    if a ** r + b ** r == 0:
        raise SingularCurveError(f"a^{r} + b^{r} = 0 for (a, b) = ({a}, {b})")


def kraus_curve(r: int, a: int, b: int) -> HyperellipticModel:
    """
    The Frey curve C_r(a, b): y^2 = sum_k c_k (ab)^k x^(r-2k) + b^r - a^r.

    Args:
        r: Odd prime
        a, b: Coprime integers with a^r + b^r != 0

    Returns:
        Integral odd-degree model of genus (r-1)/2
    """
    validate_pair(r, a, b)
    f = big_H(r, a, b).coeffs
    coeffs = (f[0] + b ** r - a ** r,) + f[1:]
    return HyperellipticModel(coeffs, (r - 1) // 2, 'Z')


def closed_form_discriminant(r: int, a: int, b: int) -> int:
    g = (r - 1) // 2
    return (-1) ** g * 2 ** (2 * (r - 1)) * r ** r * (a ** r + b ** r) ** (r - 1)


def curve_discriminant(r: int, a: int, b: int) -> int:
    """
    Discriminant of C_r(a, b) in closed form, cross-checked against the model.

    Raises:
        CertificateError: If the closed form and the resultant-based value differ
    """
    model = kraus_curve(r, a, b)
    closed = closed_form_discriminant(r, a, b)
    if model.discriminant != closed:
        raise CertificateError(
            f"discriminant mismatch for C_{r}({a},{b}): closed form {closed}, model {model.discriminant}"
        )
    return closed


def kraus_discriminant(r: int, d: int, c: int, p: int) -> int:
    """Discriminant when a^r + b^r = d c^p."""
    g = (r - 1) // 2
    return (-1) ** g * 2 ** (2 * (r - 1)) * r ** r * d ** (r - 1) * c ** (p * (r - 1))


def frey_specialization(r: int, a: int, b: int) -> FreySpecialization:
    """t0 = a^r/(a^r+b^r), s0^2 = (a^r-b^r)^2/(ab)^r, alpha^2 = t0 - t0^2, with their relations checked."""
    validate_pair(r, a, b)
    u = a ** r + b ** r
    t0 = Fraction(a ** r, u)
    alpha_squared = t0 - t0 * t0
    two_t0_minus_1 = 2 * t0 - 1

    if alpha_squared * u * u != (a * b) ** r:
        raise CertificateError(f"t0(1-t0)(a^r+b^r)^2 != (ab)^r for ({r},{a},{b})")

    s0_squared = None
    if a * b != 0:
        s0_squared = Fraction((a ** r - b ** r) ** 2, (a * b) ** r)
        if alpha_squared * s0_squared != two_t0_minus_1 ** 2:
            raise CertificateError("alpha^2 s0^2 != (2t0 - 1)^2")
        if s0_squared != 1 / alpha_squared - 4:
            raise CertificateError("s0^2 != 1/(t0(1-t0)) - 4")
    return FreySpecialization(r, a, b, t0, s0_squared, alpha_squared, two_t0_minus_1)


def _weierstrass_j(a2: Number, a4: Number, a6: Number) -> Fraction:
    a2, a4, a6 = Fraction(a2), Fraction(a4), Fraction(a6)
    b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
    b8 = 4 * a2 * a6 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    delta = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    if delta == 0:
        raise SingularCurveError("cubic has a repeated root")
    return c4 ** 3 / delta


def legendre_j(r: int, a: int, b: int) -> Fraction:
    """j(L(t0)) = 2^8 ((a^r+b^r)^2 - (ab)^r)^3 / ((ab)^r (a^r+b^r))^2."""
    u = a ** r + b ** r
    ab_r = (a * b) ** r
    return Fraction(2 ** 8 * (u * u - ab_r) ** 3, (ab_r * u) ** 2)


def legendre_companion(r: int, a: int, b: int) -> LegendreCurve:
    """
    The Legendre curve L(t0) attached to (a, b).

    The integral model is Y^2 = X(X - u^2)(X - a^r u), from x = X/u^2, y = Y/u^3.
    """
    validate_pair(r, a, b)
    if a * b == 0:
        raise DegenerateLegendreError(f"ab = 0 gives t0 in {{0, 1}} for (a, b) = ({a}, {b})")
    u = a ** r + b ** r
    t0 = Fraction(a ** r, u)
    e1, e2 = u * u, a ** r * u
    coeffs = (0, e1 * e2, -(e1 + e2), 1)
    model = HyperellipticModel(coeffs, 1, 'Z')

    j = legendre_j(r, a, b)
    j_model = _weierstrass_j(coeffs[2], coeffs[1], coeffs[0])
    if j != j_model:
        raise CertificateError(f"j(L(t0)) closed form {j} differs from the model value {j_model}")
    return LegendreCurve(t0, u, model, j)


def twist_class(r: int, a: int, b: int) -> InterchangeTwist:
    """Describe the (a,b) <-> (b,a) interchange twist."""
    validate_pair(r, a, b)
    return InterchangeTwist(r, a, b)


def twisted_model(r: int, t: Number) -> HyperellipticModel:
    """
    C'_r(t): y^2 = x^r + sum_{k>=1} c_k A^k x^(r-2k) + A^g (2t - 1) with A = t - t^2.

    Only alpha^2 = A enters, so the model has rational coefficients.
    """
    check_odd_prime(r)
    t = Fraction(t)
    if t in (0, 1):
        raise DegenerateLegendreError(f"t = {t} is a degenerate parameter")
    g = (r - 1) // 2
    A = t - t * t
    coeffs = [Fraction(0)] * (r + 1)
    for k, c in enumerate(chebyshev_coeffs(r)):
        coeffs[r - 2 * k] = c * A ** k
    coeffs[0] = A ** g * (2 * t - 1)
    return HyperellipticModel(tuple(coeffs), g, 'Q')


def disc_twisted_model(r: int, t: Number) -> Fraction:
    """(-1)^g 2^(2(r-1)) r^r (t(1-t))^((r-1)^2/2)."""
    t = Fraction(t)
    g = (r - 1) // 2
    return (-1) ** g * 2 ** (2 * (r - 1)) * r ** r * (t * (1 - t)) ** ((r - 1) ** 2 // 2)


def twist_scaling(r: int, a: int, b: int) -> Fraction:
    """
    lambda = (a^r+b^r)/(ab)^g with f_C(lambda X) = -lambda^r f'(-X).

    So C_r(a,b) is the twist of C'_r(t0) by -lambda^r, and
    Delta(C_r(a,b)) = Delta(C'_r(t0)) lambda^(r(r-1)).
    """
    validate_pair(r, a, b)
    if a * b == 0:
        raise DegenerateLegendreError("the twisted model needs ab != 0")
    g = (r - 1) // 2
    return Fraction(a ** r + b ** r, (a * b) ** g)


def twist_relation_holds(r: int, a: int, b: int) -> bool:
    """Check f_C(lambda X) = -lambda^r f'(-X) coefficientwise."""
    lam = twist_scaling(r, a, b)
    f_c = kraus_curve(r, a, b).f_coeffs
    f_t = twisted_model(r, frey_specialization(r, a, b).t0).f_coeffs
    for i in range(r + 1):
        lhs = f_c[i] * lam ** i
        rhs = -lam ** r * f_t[i] * (-1) ** i
        if lhs != rhs:
            return False
    return True


def twist_discriminant_valuation_gap(r: int, a: int, b: int, q: int) -> int:
    """v_q(Delta(C)) - v_q(Delta(C')), always a multiple of r(r-1)."""
    delta_c = Fraction(curve_discriminant(r, a, b))
    delta_t = disc_twisted_model(r, frey_specialization(r, a, b).t0)
    return _valuation(delta_c, q) - _valuation(delta_t, q)


def _valuation(value: Fraction, q: int) -> int:
    if value == 0:
        raise InvalidParameterError("valuation of zero")
    return multiplicity(q, abs(value.numerator)) - multiplicity(q, value.denominator)
