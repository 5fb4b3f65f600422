"""Exact arithmetic in the real cyclotomic field K = Q(zeta_r)^+.

Elements are stored in the power basis 1, w, ..., w^(g-1) of w = zeta_r + zeta_r^-1,
with integer numerators over a common positive denominator. The Galois group acts
through Dickson polynomials, sigma_j(w) = D_j(w), so nothing in this module is numeric
except the optional real embeddings used by trace recognition.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Dict, List, NamedTuple, Sequence, Tuple, Union

import mpmath
import numpy as np
from sympy import Matrix, Poly, cyclotomic_poly, isprime, symbols
from sympy.polys.domains import ZZ
from sympy.polys.densearith import dup_mul, dup_rem
from sympy.polys.densebasic import dup_strip
from sympy.polys.densetools import dup_compose
from sympy.polys.galoistools import gf_compose_mod, gf_factor, gf_from_int_poly, gf_rem

from .errors import (
    CertificateError,
    InconsistentLPolynomialError,
    InvalidParameterError,
    NonIntegralElementError,
)

logger = logging.getLogger(__name__)

X = symbols('x')

RAMIFIED = 'ramified'


def check_odd_prime(r: int) -> None:
    """Raise InvalidParameterError unless r is an odd prime."""
    if not isinstance(r, int) or r < 3 or not isprime(r):
        raise InvalidParameterError(f"r must be an odd prime, got {r!r}")


def _to_desc(coeffs: Sequence[int]) -> List[int]:
    return dup_strip([ZZ(int(c)) for c in reversed(coeffs)])


def _to_asc(desc: Sequence[int], length: int) -> Tuple[int, ...]:
    values = [int(c) for c in reversed(desc)]
    if len(values) > length:
        raise CertificateError(f"polynomial of degree {len(values) - 1} does not fit in {length} coordinates")
    return tuple(values + [0] * (length - len(values)))


def minimal_poly(r: int) -> List[int]:
    """
    Minimal polynomial h of w = zeta_r + zeta_r^-1 over Q.

    The product of (x - w_j) is expanded with coefficients in the group ring Z[C_r],
    each coefficient a vector over zeta^0..zeta^(r-1), and read back as an integer
    through 1 + zeta + ... + zeta^(r-1) = 0.

    Args:
        r: Odd prime

    Returns:
        Integer coefficients of h in ascending degree (monic, degree (r-1)/2)
    """
    check_odd_prime(r)
    g = (r - 1) // 2

    one = np.zeros(r, dtype=object)
    one[0] = 1
    coeffs = [one]
    for j in range(1, g + 1):
        expanded = [np.zeros(r, dtype=object) for _ in range(len(coeffs) + 1)]
        for k, c in enumerate(coeffs):
            expanded[k + 1] = expanded[k + 1] + c
            expanded[k] = expanded[k] - (np.roll(c, j) + np.roll(c, -j))
        coeffs = expanded

    result = []
    for k, c in enumerate(coeffs):
        tail = set(int(v) for v in c[1:])
        if len(tail) != 1:
            raise CertificateError(f"coefficient of x^{k} in h is not rational for r={r}")
        result.append(int(c[0]) - tail.pop())
    return result


def dickson(j: int) -> List[int]:
    """Dickson polynomial D_j with parameter 1, ascending coefficients (D_j(z + 1/z) = z^j + z^-j)."""
    if j < 0:
        raise InvalidParameterError(f"Dickson index must be non-negative, got {j}")
    previous, current = [2], [0, 1]
    if j == 0:
        return previous
    for _ in range(j - 1):
        shifted = [0] + current
        padded = previous + [0] * (len(shifted) - len(previous))
        previous, current = current, [s - p for s, p in zip(shifted, padded)]
    return current


def trace_descent(coeffs: Sequence[int], Q: int) -> List[int]:
    """
    Solve C(X) = X^g * P(X + Q/X) for the monic degree-g polynomial P.

    Args:
        coeffs: Ascending integer coefficients of C, degree 2g, monic
        Q: The weight parameter (residue field size, or 1 for cyclotomic polynomials)

    Returns:
        Ascending integer coefficients of P

    Raises:
        InconsistentLPolynomialError: If C is not of that shape
    """
    coeffs = [int(c) for c in coeffs]
    if len(coeffs) % 2 != 1 or coeffs[-1] != 1:
        raise InconsistentLPolynomialError(f"expected a monic polynomial of even degree, got {coeffs}")
    g = (len(coeffs) - 1) // 2

    p = [0] * (g + 1)
    for k in range(g, -1, -1):
        value = coeffs[g + k]
        for j in range(k + 2, g + 1, 2):
            value -= p[j] * comb(j, (j + k) // 2) * Q ** ((j - k) // 2)
        p[k] = value

    rebuilt = [0] * (2 * g + 1)
    for j, pj in enumerate(p):
        for i in range(j + 1):
            rebuilt[g - j + 2 * i] += pj * comb(j, i) * Q ** (j - i)
    if rebuilt != coeffs:
        raise InconsistentLPolynomialError(
            f"no descent X^g P(X + {Q}/X) reproduces {coeffs}"
        )
    return p


def real_cyclotomic_minpoly(n: int) -> List[int]:
    """Minimal polynomial of 2cos(2 pi / n), ascending coefficients, for n >= 3."""
    if n < 3:
        raise InvalidParameterError(f"n must be at least 3, got {n}")
    phi = Poly(cyclotomic_poly(n, X), X).all_coeffs()
    return trace_descent([int(c) for c in reversed(phi)], 1)


def resultant_norm(modulus: Sequence[int], numerator: Sequence[int], denominator: int = 1) -> Fraction:
    """
    Norm of numerator(theta)/denominator for theta a root of the monic integer polynomial modulus.

    Args:
        modulus: Ascending coefficients of a monic defining polynomial of degree n
        numerator: Ascending integer coefficients of the element
        denominator: Positive integer

    Returns:
        Res(modulus, numerator) / denominator^n as an exact Fraction
    """
    n = len(modulus) - 1
    num = [int(c) for c in numerator]
    while num and num[-1] == 0:
        num.pop()
    if not num:
        return Fraction(0)
    if len(num) == 1:
        value = num[0] ** n
    else:
        value = int(Poly(list(reversed(modulus)), X, domain=ZZ).resultant(
            Poly(list(reversed(num)), X, domain=ZZ)))
    return Fraction(value, denominator ** n)


@dataclass(frozen=True)
class KElement:
    """Element of K = Q(zeta_r)^+ as coordinates in the power basis of w over a denominator."""

    r: int
    coeffs: Tuple[int, ...]
    denominator: int = 1

    def __post_init__(self):
        if self.denominator == 0:
            raise InvalidParameterError("denominator must be nonzero")
        coeffs = tuple(int(c) for c in self.coeffs)
        den = int(self.denominator)
        if den < 0:
            coeffs, den = tuple(-c for c in coeffs), -den
        common = den
        for c in coeffs:
            common = gcd(common, c)
        if common > 1:
            coeffs, den = tuple(c // common for c in coeffs), den // common
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'denominator', den)

    @property
    def field(self) -> 'CycloRealField':
        return cyclo_field(self.r)

    @property
    def is_integral(self) -> bool:
        return self.denominator == 1

    def rationals(self) -> List[Fraction]:
        return [Fraction(c, self.denominator) for c in self.coeffs]

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def _coerce(self, other: Union['KElement', int, Fraction]) -> 'KElement':
        if isinstance(other, KElement):
            if other.r != self.r:
                raise InvalidParameterError(f"cannot combine elements of Q(zeta_{self.r})+ and Q(zeta_{other.r})+")
            return other
        return self.field.from_rational(other)

    def __add__(self, other):
        return self.field.add(self, self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.field.sub(self, self._coerce(other))

    def __rsub__(self, other):
        return self.field.sub(self._coerce(other), self)

    def __mul__(self, other):
        return self.field.mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return KElement(self.r, tuple(-c for c in self.coeffs), self.denominator)

    def __pow__(self, n: int):
        return self.field.power(self, n)

    def to_json(self) -> Dict[str, object]:
        return {'coeffs': [str(c) for c in self.coeffs], 'denominator': str(self.denominator)}

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*w" if i == 1 else f"{c}*w^{i}")
        body = " + ".join(terms) or "0"
        return body if self.denominator == 1 else f"({body})/{self.denominator}"


@dataclass(frozen=True)
class GaloisMap:
    """sigma_j for j the class of j in (Z/rZ)*/{+-1}, represented in 1..g."""

    r: int
    j: int

    def __post_init__(self):
        g = (self.r - 1) // 2
        if not 1 <= self.j <= g:
            raise InvalidParameterError(f"Galois index must lie in 1..{g}, got {self.j}")

    def compose(self, other: 'GaloisMap') -> 'GaloisMap':
        """Return self o other."""
        return GaloisMap(self.r, galois_index(self.r, self.j * other.j))


def galois_index(r: int, n: int) -> int:
    """Reduce n to its representative of (Z/rZ)*/{+-1} in 1..(r-1)/2."""
    n %= r
    if n == 0:
        raise InvalidParameterError(f"{n} is not a unit modulo {r}")
    return n if n <= (r - 1) // 2 else r - n


class PrimeLabel(NamedTuple):
    """A prime of K above q, named by the monic factor of h mod q it corresponds to."""

    q: int
    index: int
    factor: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.factor) - 1


@dataclass(frozen=True)
class PrimeSplitting:
    """
    Splitting of a rational prime q in K with canonically ordered labels.

    h is congruent mod q to the product of the factors, each raised to multiplicity
    (g for the ramified prime r, 1 otherwise).
    """

    q: int
    f: int
    n_primes: int
    factors: Tuple[Tuple[int, ...], ...]
    ramified: bool
    multiplicity: int = 1

    @property
    def residue_size(self) -> int:
        return self.q ** self.f

    @property
    def labels(self) -> List[PrimeLabel]:
        return [PrimeLabel(self.q, i, factor) for i, factor in enumerate(self.factors)]

    @property
    def inert(self) -> bool:
        return self.n_primes == 1 and not self.ramified

    def to_json(self) -> Dict[str, object]:
        return {
            'q': self.q,
            'f': self.f,
            'n_primes': self.n_primes,
            'factors': [list(fac) for fac in self.factors],
            'ramified': self.ramified,
            'multiplicity': self.multiplicity,
        }


@dataclass(frozen=True)
class CycloRealField:
    """K = Q(zeta_r)^+ with defining polynomial h."""

    r: int
    g: int
    h_coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.h_coeffs) != self.g + 1 or self.h_coeffs[-1] != 1:
            raise CertificateError(f"h must be monic of degree {self.g}, got {self.h_coeffs}")
        expected = [comb(self.g, k) * (-2) ** (self.g - k) for k in range(self.g + 1)]
        if any((c - e) % self.r for c, e in zip(self.h_coeffs, expected)):
            raise CertificateError(f"h is not congruent to (x-2)^{self.g} modulo {self.r}")

    @property
    def h_desc(self) -> List[int]:
        return _to_desc(self.h_coeffs)

    def element(self, coeffs: Sequence[int], denominator: int = 1) -> KElement:
        coeffs = list(coeffs)
        if len(coeffs) > self.g:
            return self._reduce(_to_desc(coeffs), denominator)
        return KElement(self.r, tuple(coeffs) + (0,) * (self.g - len(coeffs)), denominator)

    def from_rationals(self, values: Sequence[Fraction]) -> KElement:
        values = [Fraction(v) for v in values]
        den = 1
        for v in values:
            den = den * v.denominator // gcd(den, v.denominator)
        return self.element([int(v * den) for v in values], den)

    def from_rational(self, value: Union[int, Fraction]) -> KElement:
        value = Fraction(value)
        return self.element([value.numerator], value.denominator)

    def zero(self) -> KElement:
        return self.element([0])

    def one(self) -> KElement:
        return self.element([1])

    def omega(self) -> KElement:
        return self.element([0, 1])

    def _reduce(self, desc: Sequence[int], denominator: int) -> KElement:
        rem = dup_rem(list(desc), self.h_desc, ZZ)
        return KElement(self.r, _to_asc(rem, self.g), denominator)

    def add(self, u: KElement, v: KElement) -> KElement:
        den = u.denominator * v.denominator
        return KElement(self.r, tuple(a * v.denominator + b * u.denominator
                                      for a, b in zip(u.coeffs, v.coeffs)), den)

    def sub(self, u: KElement, v: KElement) -> KElement:
        return self.add(u, -v)

    def mul(self, u: KElement, v: KElement) -> KElement:
        product = dup_mul(_to_desc(u.coeffs), _to_desc(v.coeffs), ZZ)
        return self._reduce(product, u.denominator * v.denominator)

    def power(self, u: KElement, n: int) -> KElement:
        if n < 0:
            raise InvalidParameterError("negative powers are not supported")
        result, base = self.one(), u
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def galois_apply(self, sigma: Union[GaloisMap, int], u: KElement) -> KElement:
        """Apply sigma_j to u via w -> D_j(w) mod h."""
        j = sigma.j if isinstance(sigma, GaloisMap) else int(sigma)
        GaloisMap(self.r, j)
        if j == 1:
            return u
        image = _dickson_mod_h(self.r, j)
        composed = dup_compose(_to_desc(u.coeffs), _to_desc(image), ZZ)
        return self._reduce(composed, u.denominator)

    def conjugates(self, u: KElement) -> List[KElement]:
        return [self.galois_apply(j, u) for j in range(1, self.g + 1)]

    def multiplication_matrix(self, u: KElement) -> Matrix:
        """Integer matrix of multiplication by the numerator of u in the power basis."""
        numerator = KElement(self.r, u.coeffs)
        columns = []
        basis = self.one()
        omega = self.omega()
        for i in range(self.g):
            columns.append(list(self.mul(numerator, basis).coeffs))
            basis = self.mul(basis, omega)
        return Matrix(columns).T

    def norm_and_trace(self, u: KElement) -> Tuple[Fraction, Fraction]:
        """
        Norm and trace of u down to Q.

        Returns:
            (Res(h, numerator)/denominator^g, sum of the conjugates)
        """
        norm = resultant_norm(self.h_coeffs, u.coeffs, u.denominator)
        trace = Fraction(int(self.multiplication_matrix(u).trace()), u.denominator)
        return norm, trace

    def norm(self, u: KElement) -> Fraction:
        return resultant_norm(self.h_coeffs, u.coeffs, u.denominator)

    def char_poly(self, u: KElement) -> List[Fraction]:
        """Ascending coefficients of prod_j (Y - sigma_j(u)), monic of degree g."""
        y = symbols('y')
        poly = Poly(self.multiplication_matrix(u).charpoly(y).as_expr(), y)
        coeffs = [int(c) for c in reversed(poly.all_coeffs())]
        return [Fraction(c, u.denominator ** (self.g - i)) for i, c in enumerate(coeffs)]

    def evaluate(self, u: KElement, point) -> object:
        """Evaluate u's polynomial at a numeric or modular point (numerator only divided at the end)."""
        total = 0
        for c in reversed(u.coeffs):
            total = total * point + c
        return total / u.denominator if u.denominator != 1 else total

    def embeddings(self, precision: int = 60) -> List[mpmath.mpf]:
        """Real values w_j = 2cos(2 pi j / r), j = 1..g; embedding j sends w to w_j."""
        with mpmath.workdps(precision):
            return [2 * mpmath.cos(2 * mpmath.pi * j / self.r) for j in range(1, self.g + 1)]

    def split_prime(self, q: int) -> PrimeSplitting:
        """
        Split the rational prime q in K.

        Args:
            q: Rational prime

        Returns:
            PrimeSplitting with factors of h mod q sorted lexicographically (ascending coefficient tuples)
        """
        if not isinstance(q, int) or not isprime(q):
            raise InvalidParameterError(f"q must be prime, got {q!r}")
        if q == self.r:
            return PrimeSplitting(q, 1, 1, ((self.r - 2, 1),), True, self.g)

        f = residue_degree(self.r, q)
        _, factors = gf_factor(gf_from_int_poly(self.h_desc, q), q, ZZ)
        labels = []
        for factor, multiplicity in factors:
            if multiplicity != 1 or len(factor) - 1 != f:
                raise CertificateError(
                    f"h mod {q} does not split into distinct factors of degree {f}"
                )
            labels.append(_to_asc([int(c) % q for c in factor], f + 1))
        labels.sort()
        if len(labels) * f != self.g:
            raise CertificateError(f"factor degrees of h mod {q} do not add up to {self.g}")
        logger.debug("q=%d splits in Q(zeta_%d)+ with f=%d into %d primes", q, self.r, f, len(labels))
        return PrimeSplitting(q, f, len(labels), tuple(labels), False)

    def ramified_label(self) -> PrimeLabel:
        return PrimeLabel(self.r, 0, (self.r - 2, 1))

    def reduce_mod_prime(self, u: KElement, label: Union[PrimeLabel, str]) -> Tuple[int, ...]:
        """
        Image of u in the residue field of a prime of K.

        Args:
            u: Element, integral at the prime
            label: A PrimeLabel from split_prime, or RAMIFIED for the prime above r

        Returns:
            Ascending coordinates over F_q of the image in F_q[x]/(factor); length 1 at the ramified prime
        """
        if label == RAMIFIED:
            label = self.ramified_label()
        q, factor = label.q, label.factor
        try:
            inverse = pow(u.denominator, -1, q)
        except ValueError:
            raise NonIntegralElementError(
                f"denominator {u.denominator} is not invertible modulo {q}"
            ) from None
        f = len(factor) - 1
        rem = gf_rem(gf_from_int_poly(_to_desc(u.coeffs), q), _to_desc(factor), q, ZZ)
        return tuple((c * inverse) % q for c in _to_asc(rem, f))

    def label_permutation(self, splitting: PrimeSplitting, sigma: Union[GaloisMap, int]) -> List[int]:
        """
        Permutation of prime labels induced by sigma_j.

        If F is the factor of label i and rho a root of F, the prime sigma_j(label i) is
        generated by the factor F' with F'(D_k(rho)) = 0 for k = j^-1 mod r, i.e. F' | F o D_j.

        Returns:
            perm with sigma_j(label i) = label perm[i]
        """
        j = sigma.j if isinstance(sigma, GaloisMap) else int(sigma)
        if splitting.ramified or splitting.n_primes == 1:
            return [0]
        q = splitting.q
        inverse = galois_index(self.r, pow(j, -1, self.r))
        image = gf_from_int_poly(_to_desc(dickson(inverse)), q)
        perm = []
        for factor in splitting.factors:
            modulus = _to_desc(factor)
            root_image = gf_rem(image, modulus, q, ZZ)
            hits = [i for i, other in enumerate(splitting.factors)
                    if not gf_compose_mod(_to_desc(other), root_image, modulus, q, ZZ)]
            if len(hits) != 1:
                raise CertificateError(f"sigma_{j} does not map the prime {factor} above {q} to a unique prime")
            perm.append(hits[0])
        return perm


def residue_degree(r: int, q: int) -> int:
    """Order of q in (Z/rZ)*/{+-1}."""
    if q % r == 0:
        raise InvalidParameterError(f"{q} is not a unit modulo {r}")
    value, f = q % r, 1
    while value not in (1, r - 1):
        value = (value * q) % r
        f += 1
    return f


@lru_cache(maxsize=None)
def _dickson_mod_h(r: int, j: int) -> Tuple[int, ...]:
    field = cyclo_field(r)
    return field._reduce(_to_desc(dickson(j)), 1).coeffs


@lru_cache(maxsize=None)
def cyclo_field(r: int) -> CycloRealField:
    """Build (and cache) K = Q(zeta_r)^+."""
    check_odd_prime(r)
    h = minimal_poly(r)
    logger.debug("minimal polynomial for r=%d: %s", r, h)
    return CycloRealField(r=r, g=(r - 1) // 2, h_coeffs=tuple(h))
