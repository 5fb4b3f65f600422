"""Local data of J_r(a, b): reduction types, conductor, Serre level, irreducibility criteria."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb, gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import factorint, isprime, multiplicity

from .curves import validate_pair
from .cyclofield import KElement, check_odd_prime, cyclo_field, residue_degree
from .errors import (
    InvalidParameterError,
    InvalidUnitError,
    OutOfScopePrimeError,
    PreconditionError,
    UnsupportedParityError,
)
from .freypoly import IdentityCheck, chebyshev_coeffs, phi_r

logger = logging.getLogger(__name__)

GOOD = 'good'
MULTIPLICATIVE = 'multiplicative'
ADDITIVE = 'additive'

UNRAMIFIED = 'unramified'
STEINBERG = 'steinberg'
PRINCIPAL_SERIES = 'principal-series'
SUPERCUSPIDAL = 'supercuspidal'
TWIST_OF_STEINBERG = 'twist-of-steinberg'

IRREDUCIBLE = 'irreducible-all-odd-p'
CONDITIONAL = 'conditional'
INCONCLUSIVE = 'inconclusive'

RAY_CLASS_ASSUMPTIONS = (
    'ray class number condition (i) at the primes above 2',
    'ray class number condition (ii): h_2m / h_m divisibility',
    'conclusion (3) of the unit criterion relies on (i) and (ii)',
)


@dataclass(frozen=True)
class ReductionReport:
    """Reduction of J_r(a, b) at a rational prime q. inertia_order None means unknown or infinite."""

    q: int
    type: str
    conductor_exponent: int
    inertia_order: Optional[int]
    inertial_type: str

    def to_json(self) -> Dict[str, Any]:
        return {
            'q': self.q,
            'type': self.type,
            'conductor_exponent': self.conductor_exponent,
            'inertia_order': self.inertia_order if self.inertia_order is not None else 'UNKNOWN',
            'inertial_type': self.inertial_type,
        }


def _check_parity(a: int, b: int) -> None:
    if a % 2 != 0 or b % 4 != 1:
        raise UnsupportedParityError(
            f"expected a = 0 mod 2 and b = 1 mod 4, got a = {a % 2} mod 2, b = {b % 4} mod 4"
        )


def classify_prime(r: int, a: int, b: int, q: int) -> ReductionReport:
    """
    Reduction type, conductor exponent and inertial type of J_r(a, b) at q.

    Args:
        r: Odd prime
        a, b: Coprime integers with a^r + b^r != 0
        q: Rational prime

    Returns:
        ReductionReport; exponents at 2 and r are those at the unique prime of K above them
    """
    validate_pair(r, a, b)
    if not isprime(q):
        raise InvalidParameterError(f"q must be prime, got {q}")

    if q == 2:
        _check_parity(a, b)
        f2 = residue_degree(r, 2)
        inertial = PRINCIPAL_SERIES if (2 ** f2 - 1) % r == 0 else SUPERCUSPIDAL
        return ReductionReport(q, ADDITIVE, 2, r, inertial)
    if q == r:
        if (a + b) % r:
            inertial = PRINCIPAL_SERIES if r % 4 == 1 else SUPERCUSPIDAL
            return ReductionReport(q, ADDITIVE, 2, 4, inertial)
        return ReductionReport(q, ADDITIVE, 2, None, TWIST_OF_STEINBERG)
    if (a ** r + b ** r) % q == 0:
        return ReductionReport(q, MULTIPLICATIVE, 1, None, STEINBERG)
    return ReductionReport(q, GOOD, 0, 1, UNRAMIFIED)


@dataclass
class Conductor:
    """Conductor of J_r(a, b) over K: 2^2 q_r^2 times the radical of a^r + b^r away from 2r."""

    r: int
    a: int
    b: int
    reports: List[ReductionReport] = field(default_factory=list)

    def exponent(self, q: int) -> int:
        for report in self.reports:
            if report.q == q:
                return report.conductor_exponent
        return 0

    @property
    def multiplicative_primes(self) -> List[int]:
        return [rep.q for rep in self.reports if rep.type == MULTIPLICATIVE]

    def to_json(self) -> Dict[str, Any]:
        return {'r': self.r, 'a': self.a, 'b': self.b, 'primes': [rep.to_json() for rep in self.reports]}


def conductor(r: int, a: int, b: int) -> Conductor:
    """Classify 2, r and every prime of a^r + b^r."""
    validate_pair(r, a, b)
    primes = {2, r} | set(factorint(abs(a ** r + b ** r)))
    result = Conductor(r, a, b)
    for q in sorted(primes):
        result.reports.append(classify_prime(r, a, b, q))
    return result


@dataclass(frozen=True)
class SerreLevel:
    r: int
    e2: int
    er: int
    nd_primes: Tuple[int, ...]

    def describe(self) -> str:
        parts = [f"q_2^{self.e2}", f"q_{self.r}^{self.er}" if self.er > 1 else f"q_{self.r}"]
        parts += [f"n_{p}" for p in self.nd_primes]
        return " * ".join(parts)

    def compatible_with(self, cond: Conductor) -> bool:
        """The level divides the conductor once the primes away from 2rd are removed."""
        if self.e2 > cond.exponent(2) or self.er > cond.exponent(self.r):
            return False
        return all(cond.exponent(p) in (0, 1) for p in self.nd_primes)

    def to_json(self) -> Dict[str, Any]:
        return {'r': self.r, 'e2': self.e2, 'er': self.er, 'nd_primes': list(self.nd_primes),
                'description': self.describe()}


def serre_level(r: int, d: int, r_divides_a_plus_b: bool = False) -> SerreLevel:
    """
    Level 2^2 q_r^2 n_d of the residual representation, or 2^2 q_r n_d on the twisted pathway.

    Args:
        r: Odd prime
        d: Positive r-th-power-free integer
        r_divides_a_plus_b: Selects the twisted pathway
    """
    check_odd_prime(r)
    if d < 1:
        raise InvalidParameterError(f"d must be positive, got {d}")
    factors = factorint(d)
    if any(e >= r for e in factors.values()):
        raise InvalidParameterError(f"d = {d} is not {r}-th-power-free")
    nd = sorted(p for p in factors if p not in (2, r))
    return SerreLevel(r, 2, 1 if r_divides_a_plus_b else 2, tuple(nd))


@dataclass
class SemistableReport:
    r: int
    a: int
    b: int
    shifted_coeffs: List[int]
    alphas: List[int]
    checks: List[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_json(self) -> Dict[str, Any]:
        return {
            'r': self.r, 'a': self.a, 'b': self.b, 'passed': self.passed,
            'shifted_coeffs': [str(c) for c in self.shifted_coeffs],
            'alphas': [str(c) for c in self.alphas],
            'checks': [{'name': c.name, 'passed': c.passed, 'detail': c.detail} for c in self.checks],
        }


def _shifted_coeff(r: int, a: int, b: int, j: int) -> int:
    cheb = chebyshev_coeffs(r)
    return sum(c * (a * b) ** k * comb(r - 2 * k, j) * (a - b) ** (r - 2 * k - j)
               for k, c in enumerate(cheb) if r - 2 * k >= j)


def _alpha(r: int, j: int) -> int:
    cheb = chebyshev_coeffs(r)
    return sum((-1) ** k * 2 ** (r - 2 * k - j) * comb(r - 2 * k, j) * c
               for k, c in enumerate(cheb) if r - 2 * k >= j)


def semistable_congruences(r: int, a: int, b: int, workers: int = 1) -> SemistableReport:
    """
    Exact congruences on the coefficients A_j of H(x - (b - a)) when r | a + b.

    The alpha_j are the Chebyshev parts of A_j after a = -b mod r. Square divisibility
    is checked for 2 <= j <= g; above the middle index only r | A_j is claimed.
    """
    validate_pair(r, a, b)
    if (a + b) % r:
        raise PreconditionError(f"{r} does not divide a + b = {a + b}")
    g = (r - 1) // 2
    r2 = r * r

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        coeffs = list(executor.map(lambda j: _shifted_coeff(r, a, b, j), range(r + 1)))
        alphas = list(executor.map(lambda j: _alpha(r, j), range(r + 1)))

    report = SemistableReport(r, a, b, coeffs, alphas)
    checks = report.checks

    checks.append(IdentityCheck('constant', coeffs[0] == a ** r - b ** r,
                                f"A_0 = {coeffs[0]}, a^r - b^r = {a ** r - b ** r}"))
    phi = phi_r(r, a, b)
    checks.append(IdentityCheck('linear', coeffs[1] == r * phi, f"A_1 = {coeffs[1]}, r*phi = {r * phi}"))
    checks.append(IdentityCheck('phi', (phi - r * a ** (r - 1)) % r2 == 0,
                                f"phi = {phi % r2}, r a^(r-1) = {(r * a ** (r - 1)) % r2} mod {r2}"))

    bad = [j for j in range(2, g + 1) if alphas[j] % r2]
    checks.append(IdentityCheck('alpha_square', not bad, f"r^2 does not divide alpha_j for j in {bad}" if bad else ""))
    bad = [j for j in range(g + 2, r) if coeffs[j] % r]
    checks.append(IdentityCheck('upper', not bad, f"r does not divide A_j for j in {bad}" if bad else ""))

    middle = comb((3 * r - 1) // 2, (r + 1) // 2)
    checks.append(IdentityCheck('middle', alphas[g + 1] == middle and (middle - 2 * r) % r2 == 0,
                                f"alpha_(g+1) = {alphas[g + 1]}, binom = {middle}, {middle % r2} mod {r2}"))
    checks.append(IdentityCheck('leading', coeffs[r] == 1, f"A_r = {coeffs[r]}"))
    logger.debug("semistable battery r=%d (a,b)=(%d,%d): %s", r, a, b, report.passed)
    return report


def finiteness_check(r: int, a: int, b: int, p: int, q: int) -> bool:
    """True iff v_q(a^r + b^r) = 0 mod p, for q not dividing 2r."""
    validate_pair(r, a, b)
    if (2 * r) % q == 0:
        raise OutOfScopePrimeError(f"q = {q} divides 2r = {2 * r}")
    value = abs(a ** r + b ** r)
    return multiplicity(q, value) % p == 0


@dataclass
class IrredReport:
    verdict: str
    criterion: str
    m: int
    candidate_primes: List[int] = field(default_factory=list)
    unchecked_assumptions: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            'verdict': self.verdict,
            'criterion': self.criterion,
            'm': self.m,
            'candidate_primes': list(self.candidate_primes),
            'unchecked_assumptions': list(self.unchecked_assumptions),
        }


def verify_units(r: int, units: Sequence[KElement]) -> None:
    field_K = cyclo_field(r)
    for u in units:
        if not u.is_integral or abs(field_K.norm(u)) != 1:
            raise InvalidUnitError(f"{u} is not a unit of O_K (norm {field_K.norm(u)})")
        if u.is_rational():
            raise InvalidUnitError(f"{u} is a torsion unit")


def irreducibility_report(r: int, a: int, b: int, units: Optional[Sequence[KElement]] = None) -> IrredReport:
    """
    Decide which irreducibility criterion applies to the mod-p representations of J_r(a, b).

    Args:
        r: Odd prime
        a, b: Coprime integers
        units: Optional multiplicatively independent units of O_K

    Returns:
        IrredReport with a verdict, the criterion used and the candidate primes if any
    """
    validate_pair(r, a, b)
    f2 = residue_degree(r, 2)
    m = (2 ** f2 - 1) * (r - 1)
    g = (r - 1) // 2

    if (2 ** f2 - 1) % r:
        _check_parity(a, b)
        return IrredReport(IRREDUCIBLE, 'supercuspidal-at-2', m)
    if r % 4 != 1 and (a + b) % r:
        return IrredReport(IRREDUCIBLE, 'supercuspidal-at-r', m)
    if not units or not isprime(g):
        return IrredReport(INCONCLUSIVE, 'none', m)

    verify_units(r, units)
    field_K = cyclo_field(r)
    candidates = set()
    for s in range(1, g // 2 + 1):
        common = 0
        for eps in units:
            value = field_K.norm(field_K.power(eps, 2 * m * s) - 1)
            common = gcd(common, abs(value.numerator))
        logger.debug("s=%d: gcd of unit norms = %d", s, common)
        candidates |= {p for p in factorint(common) if p % r in (1, r - 1)}
    return IrredReport(CONDITIONAL, 'unit-norms', m, sorted(candidates), list(RAY_CLASS_ASSUMPTIONS))
