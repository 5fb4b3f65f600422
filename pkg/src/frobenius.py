"""Point counting on the Frey curves and extraction of the Frobenius trace sets T_q.

Finite fields F_{p^k} are handled through exp/log tables with respect to a generator of
the multiplicative group, stored as numpy arrays so a whole block of x-values is evaluated at once.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from sympy import Poly, factorint, sqf_part
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_pow_mod, gf_rem

from .curves import HyperellipticModel, kraus_curve, legendre_companion, validate_pair
from .cyclofield import (
    RAMIFIED,
    KElement,
    PrimeSplitting,
    X,
    cyclo_field,
    trace_descent,
)
from .errors import (
    BadReductionError,
    CertificateError,
    InconsistentLPolynomialError,
    InvalidParameterError,
    RecognitionError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CountingOptions:
    """Knobs for point counting and trace recognition."""

    workers: int = 1
    chunk_size: int = 1 << 20
    max_field_size: int = 20_000_000
    crosscheck: bool = False
    precision: int = 60
    tolerance_bits: int = 20


DEFAULT_OPTIONS = CountingOptions()


@dataclass(frozen=True)
class FiniteFieldSpec:
    """
    F_{p^k} = F_p[x]/(modulus), modulus monic irreducible, ascending coefficients.

    build() picks a primitive modulus; any other irreducible modulus is accepted and the
    tables then search for a generator of the multiplicative group.
    """

    p: int
    k: int
    modulus: Tuple[int, ...]

    def __post_init__(self):
        desc = [int(c) % self.p for c in reversed(self.modulus)]
        if len(self.modulus) != self.k + 1 or desc[0] != 1 or not gf_irreducible_p(desc, self.p, ZZ):
            raise InvalidParameterError(
                f"modulus {self.modulus} is not monic irreducible of degree {self.k} over F_{self.p}"
            )

    @property
    def size(self) -> int:
        return self.p ** self.k

    @classmethod
    def build(cls, p: int, k: int) -> 'FiniteFieldSpec':
        return _primitive_field(p, k)


@lru_cache(maxsize=None)
def _primitive_field(p: int, k: int) -> FiniteFieldSpec:
    """Lexicographically first primitive modulus of degree k over F_p."""
    size = p ** k
    order_primes = list(factorint(size - 1))
    for tail in itertools.product(range(p), repeat=k):
        if tail[0] == 0:
            continue
        modulus_desc = [1] + list(reversed(tail))
        if not gf_irreducible_p(modulus_desc, p, ZZ):
            continue
        if all(gf_pow_mod([1, 0], (size - 1) // ell, modulus_desc, p, ZZ) != [1] for ell in order_primes):
            logger.debug("F_%d^%d modulus %s", p, k, modulus_desc)
            return FiniteFieldSpec(p, k, tuple(tail) + (1,))
    raise CertificateError(f"no primitive polynomial of degree {k} over F_{p}")


class FieldTables:
    """Exp/log tables for a FiniteFieldSpec; elements are coded as sum d_i p^i."""

    def __init__(self, spec: FiniteFieldSpec):
        self.spec = spec
        self.p, self.k, self.size = spec.p, spec.k, spec.size
        self.powers = self.p ** np.arange(self.k, dtype=np.int64)
        self.modulus_desc = list(reversed(spec.modulus))

        order = self.size - 1
        self.generator = self._find_generator()
        exp = np.empty(order, dtype=np.int64)
        exp[0] = 1
        filled = 1
        while filled < order:
            step = min(filled, order - filled)
            shift = gf_pow_mod(self.generator, filled, self.modulus_desc, self.p, ZZ)
            exp[filled:filled + step] = self._mul_const(exp[:step], shift)
            filled += step
        log = np.full(self.size, -1, dtype=np.int64)
        log[exp] = np.arange(order, dtype=np.int64)
        if np.count_nonzero(log >= 0) != order:
            raise CertificateError(f"{self.generator} does not generate F_{self.size}^*")
        self.exp, self.log = exp, log

    def _find_generator(self) -> List[int]:
        """x when the modulus is primitive, otherwise the first element of order size - 1."""
        order = self.size - 1
        order_primes = list(factorint(order))
        for code in itertools.chain([self.p], range(1, self.size)):
            digits = [(code // self.p ** i) % self.p for i in range(self.k)]
            candidate = [c for c in reversed(digits)]
            while candidate and candidate[0] == 0:
                candidate.pop(0)
            if not candidate:
                continue
            if all(gf_pow_mod(candidate, order // ell, self.modulus_desc, self.p, ZZ) != [1]
                   for ell in order_primes):
                return candidate
        raise CertificateError(f"no generator of F_{self.size}^* found")

    def _mul_const(self, codes: np.ndarray, constant_desc: Sequence[int]) -> np.ndarray:
        matrix = np.zeros((self.k, self.k), dtype=np.int64)
        for i in range(self.k):
            monomial = [1] + [0] * i
            product = gf_rem(gf_mul(list(constant_desc), monomial, self.p, ZZ), self.modulus_desc, self.p, ZZ)
            column = [int(c) for c in reversed(product)]
            matrix[:len(column), i] = column
        digits = (codes[:, None] // self.powers[None, :]) % self.p
        return ((digits @ matrix.T) % self.p) @ self.powers

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        nonzero = (x != 0) & (y != 0)
        out[nonzero] = self.exp[(self.log[x[nonzero]] + self.log[y[nonzero]]) % (self.size - 1)]
        return out

    def add_constant(self, codes: np.ndarray, c: int) -> np.ndarray:
        low = codes % self.p
        return codes - low + (low + c) % self.p

    def evaluate(self, coeffs: Sequence[int], codes: np.ndarray) -> np.ndarray:
        """Evaluate an integer polynomial (ascending) at the given field elements."""
        acc = np.full(codes.shape, int(coeffs[-1]) % self.p, dtype=np.int64)
        for c in reversed(coeffs[:-1]):
            acc = self.add_constant(self.mul(acc, codes), int(c) % self.p)
        return acc

    def character_sum(self, codes: np.ndarray) -> int:
        """Sum of the quadratic character over the given values (chi(0) = 0)."""
        nonzero = codes[codes != 0]
        odd = np.count_nonzero(self.log[nonzero] & 1)
        return int(nonzero.size - 2 * odd)


@lru_cache(maxsize=4)
def field_tables(p: int, k: int) -> FieldTables:
    return FieldTables(FiniteFieldSpec.build(p, k))


def _check_good_reduction(model: HyperellipticModel, p: int) -> None:
    if p == 2:
        raise BadReductionError("odd-degree models are not counted in characteristic 2")
    disc = model.discriminant
    if disc.numerator % p == 0 or disc.denominator % p == 0:
        raise BadReductionError(f"the model {model} has bad reduction at {p}")


def count_points(model: HyperellipticModel, field_spec: FiniteFieldSpec,
                 options: CountingOptions = DEFAULT_OPTIONS) -> int:
    """
    #C(F_{p^k}) for an odd-degree model, including the single point at infinity.

    Args:
        model: Integral model with good reduction at p
        field_spec: The finite field
        options: Worker count and chunk size for the x-range split

    Returns:
        1 + sum over x of (1 + chi(f(x)))
    """
    _check_good_reduction(model, field_spec.p)
    if field_spec.size > options.max_field_size:
        raise InvalidParameterError(
            f"refusing to count over a field of size {field_spec.size} (limit {options.max_field_size})"
        )
    tables = field_tables(field_spec.p, field_spec.k) if field_spec == FiniteFieldSpec.build(
        field_spec.p, field_spec.k) else FieldTables(field_spec)
    coeffs = model.integer_coeffs()
    size = field_spec.size

    def chunk_sum(start: int) -> int:
        codes = np.arange(start, min(start + options.chunk_size, size), dtype=np.int64)
        return tables.character_sum(tables.evaluate(coeffs, codes))

    starts = range(0, size, options.chunk_size)
    if options.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as executor:
            total = sum(executor.map(chunk_sum, starts))
    else:
        total = sum(chunk_sum(start) for start in starts)
    return 1 + size + total


@dataclass(frozen=True)
class LPolynomial:
    """L(T) = 1 + c_1 T + ... + Q^g T^(2g), ascending coefficients."""

    coeffs: Tuple[int, ...]
    Q: int

    @property
    def genus(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def reverse(self) -> Tuple[int, ...]:
        """Ascending coefficients of the Frobenius characteristic polynomial X^(2g) L(1/X)."""
        return tuple(reversed(self.coeffs))

    def satisfies_functional_equation(self) -> bool:
        g = self.genus
        return all(self.coeffs[2 * g - i] == self.Q ** (g - i) * self.coeffs[i] for i in range(g + 1))

    def to_json(self) -> Dict[str, Any]:
        return {'coeffs': [str(c) for c in self.coeffs], 'Q': str(self.Q)}


@dataclass(frozen=True)
class RealWeilPolynomial:
    """P with reverse(L)(X) = X^g P(X + Q/X), ascending coefficients."""

    coeffs: Tuple[int, ...]
    Q: int

    def to_json(self) -> Dict[str, Any]:
        return {'coeffs': [str(c) for c in self.coeffs], 'Q': str(self.Q)}


def _power_sums_to_l(power_sums: Sequence[int]) -> List[int]:
    coeffs = [1]
    for k in range(1, len(power_sums) + 1):
        total = -sum(power_sums[i - 1] * coeffs[k - i] for i in range(1, k + 1))
        if total % k:
            raise InconsistentLPolynomialError(f"Newton recursion is not integral at degree {k}")
        coeffs.append(total // k)
    return coeffs


def _l_to_power_sum(coeffs: Sequence[int], m: int) -> int:
    sums: List[int] = []
    for k in range(1, m + 1):
        c_k = coeffs[k] if k < len(coeffs) else 0
        sums.append(-k * c_k - sum(sums[i - 1] * coeffs[k - i] for i in range(1, k) if k - i < len(coeffs)))
    return sums[m - 1]


def l_polynomial(model: HyperellipticModel, q: int, f: int, g: Optional[int] = None,
                 options: CountingOptions = DEFAULT_OPTIONS) -> LPolynomial:
    """
    L-polynomial of the reduction of model over F_Q, Q = q^f.

    Counts over F_{Q^m} for m = 1..g give the first g coefficients through the
    logarithmic recursion; the rest follow from the functional equation.
    """
    g = model.genus if g is None else g
    Q = q ** f
    power_sums = []
    for m in range(1, g + 1):
        count = count_points(model, FiniteFieldSpec.build(q, f * m), options)
        power_sums.append(Q ** m + 1 - count)
        logger.debug("#C(F_%d^%d) = %d", q, f * m, count)
    low = _power_sums_to_l(power_sums)
    coeffs = low + [Q ** (g - i) * low[i] for i in range(g - 1, -1, -1)]
    lp = LPolynomial(tuple(coeffs), Q)

    if options.crosscheck:
        m = g + 1
        expected = Q ** m + 1 - _l_to_power_sum(lp.coeffs, m)
        count = count_points(model, FiniteFieldSpec.build(q, f * m), options)
        if count != expected:
            raise InconsistentLPolynomialError(
                f"L-polynomial predicts {expected} points over F_{q}^{f * m}, counted {count}"
            )
    return lp


def real_weil(lp: LPolynomial) -> RealWeilPolynomial:
    """Descend reverse(L)(X) = X^g P(X + Q/X) to P."""
    return RealWeilPolynomial(tuple(trace_descent(lp.reverse(), lp.Q)), lp.Q)


@dataclass
class TraceSet:
    """The Galois-stable set T_q of traces a_q(J_r(a,b)) with a value per prime label."""

    r: int
    a: int
    b: int
    q: int
    Q: int
    splitting: PrimeSplitting
    elements: List[KElement]
    prime_assignment: Dict[int, KElement] = field(default_factory=dict)
    l_poly: Optional[LPolynomial] = None

    def negated(self) -> List[KElement]:
        return sorted((-u for u in self.elements), key=_element_key)

    def to_json(self) -> Dict[str, Any]:
        return {
            'r': self.r, 'a': self.a, 'b': self.b, 'q': self.q, 'Q': str(self.Q),
            'splitting': self.splitting.to_json(),
            'elements': [u.to_json() for u in self.elements],
            'prime_assignment': {str(i): u.to_json() for i, u in sorted(self.prime_assignment.items())},
            'l_polynomial': None if self.l_poly is None else self.l_poly.to_json(),
        }


def _element_key(u: KElement) -> Tuple:
    return (u.coeffs, u.denominator)


def _recognize(r: int, P: Sequence[int], options: CountingOptions) -> KElement:
    """Find u in O_K whose conjugates are the roots of P."""
    field_K = cyclo_field(r)
    g = field_K.g
    target = [Fraction(c) for c in P]

    distinct = Poly(sqf_part(Poly(list(reversed(P)), X, domain=ZZ).as_expr()), X)
    n = distinct.degree()
    multiplicity = g // n

    with mpmath.workdps(options.precision):
        if n == 1:
            roots = [-mpmath.mpf(int(distinct.all_coeffs()[1])) / int(distinct.all_coeffs()[0])]
        else:
            roots = [mpmath.re(z) for z in mpmath.polyroots(
                [int(c) for c in distinct.all_coeffs()], maxsteps=200, extraprec=4 * options.precision)]
        omegas = field_K.embeddings(options.precision)
        vandermonde = mpmath.matrix([[w ** i for i in range(g)] for w in omegas])
        tolerance = mpmath.mpf(2) ** (-options.tolerance_bits)

        pool = [i for i in range(n) for _ in range(multiplicity)]
        for assignment in sorted(set(itertools.permutations(pool))):
            values = mpmath.matrix([roots[i] for i in assignment])
            coords = mpmath.lu_solve(vandermonde, values)
            rounded = [int(mpmath.nint(c)) for c in coords]
            if max(abs(c - v) for c, v in zip(coords, rounded)) > tolerance:
                continue
            candidate = field_K.element(rounded)
            if field_K.char_poly(candidate) == target:
                logger.debug("recognized %s for P = %s", candidate, list(P))
                return candidate
    raise RecognitionError(f"no element of O_K has real Weil polynomial {list(P)} (r={r})")


def _euler_product(r: int, u: KElement, Q: int) -> List[KElement]:
    """Ascending coefficients of prod_sigma (X^2 - sigma(u) X + Q), computed over K."""
    field_K = cyclo_field(r)
    product = [field_K.one()]
    for conj in field_K.conjugates(u):
        factor = [field_K.from_rational(Q), -conj, field_K.one()]
        expanded = [field_K.zero() for _ in range(len(product) + 2)]
        for i, a in enumerate(product):
            for j, b in enumerate(factor):
                expanded[i + j] = expanded[i + j] + a * b
        product = expanded
    return product


def _weil_bound_holds(r: int, u: KElement, Q: int) -> bool:
    field_K = cyclo_field(r)
    with mpmath.workdps(30):
        bound = 2 * mpmath.sqrt(Q) + mpmath.mpf(2) ** -20
        return all(abs(field_K.evaluate(u, w)) <= bound for w in field_K.embeddings(30))


def trace_set(r: int, a: int, b: int, q: int, options: CountingOptions = DEFAULT_OPTIONS) -> TraceSet:
    """
    Compute T_q for J_r(a, b) at a prime q of good reduction.

    Args:
        r: Odd prime
        a, b: Coprime integers
        q: Prime not dividing 2r(a^r + b^r)
        options: Counting and recognition settings

    Returns:
        TraceSet with every element certified by the exact Euler factor identity
    """
    validate_pair(r, a, b)
    if q in (2, r) or (a ** r + b ** r) % q == 0:
        raise BadReductionError(f"J_{r}({a},{b}) does not have good reduction at {q}")

    field_K = cyclo_field(r)
    splitting = field_K.split_prime(q)
    Q = splitting.residue_size
    model = kraus_curve(r, a, b)

    lp = l_polynomial(model, q, splitting.f, field_K.g, options)
    if not lp.satisfies_functional_equation():
        raise InconsistentLPolynomialError(f"L-polynomial {lp.coeffs} fails the functional equation")
    P = real_weil(lp)
    u = _recognize(r, P.coeffs, options)

    euler = _euler_product(r, u, Q)
    reverse = lp.reverse()
    if any(c != field_K.from_rational(e) for c, e in zip(euler, reverse)) or len(euler) != len(reverse):
        raise CertificateError(f"prod (X^2 - sigma(u)X + Q) differs from the Euler factor at q={q}")
    if not _weil_bound_holds(r, u, Q):
        raise CertificateError(f"a conjugate of {u} exceeds the Weil bound 2 sqrt({Q})")

    elements = sorted(set(field_K.conjugates(u)), key=_element_key)
    base = elements[0]
    assignment: Dict[int, KElement] = {}
    for j in range(1, field_K.g + 1):
        target = field_K.label_permutation(splitting, j)[0]
        image = field_K.galois_apply(j, base)
        if assignment.setdefault(target, image) != image:
            raise CertificateError(f"trace assignment is not Galois-consistent at the prime {target} above {q}")
    if len(assignment) != splitting.n_primes:
        raise CertificateError(f"Galois action on primes above {q} is not transitive")

    return TraceSet(r, a, b, q, Q, splitting, elements, assignment, lp)


def legendre_trace(r: int, a: int, b: int, q: int, options: CountingOptions = DEFAULT_OPTIONS) -> int:
    """a_Q(L(t0)) = Q + 1 - #L(F_Q) with Q = q^f the residue size of q in K."""
    curve = legendre_companion(r, a, b)
    if q in (2, r) or (a * b * curve.u) % q == 0:
        raise BadReductionError(f"L(t0) or J_{r} has bad reduction at {q}")
    f = cyclo_field(r).split_prime(q).f
    Q = q ** f
    return Q + 1 - count_points(curve.integral_model, FiniteFieldSpec.build(q, f), options)


@dataclass(frozen=True)
class CongruenceCheck:
    """Squared trace congruence between J_r and L(t0) at the prime above r."""

    q: int
    legendre_trace: int
    per_label: Tuple[Tuple[int, int, bool], ...]

    @property
    def holds(self) -> bool:
        return all(ok for _, _, ok in self.per_label)


def legendre_congruence(r: int, a: int, b: int, q: int,
                        options: CountingOptions = DEFAULT_OPTIONS) -> CongruenceCheck:
    """Check (a_q(J_r) mod p_r)^2 = (a_Q(L(t0)) mod r)^2 at every prime label above q."""
    ts = trace_set(r, a, b, q, options)
    a_L = legendre_trace(r, a, b, q, options)
    field_K = cyclo_field(r)
    rows = []
    for label, u in sorted(ts.prime_assignment.items()):
        residue = field_K.reduce_mod_prime(u, RAMIFIED)[0]
        rows.append((label, residue, (residue * residue - a_L * a_L) % r == 0))
    return CongruenceCheck(q, a_L, tuple(rows))


@dataclass(frozen=True)
class InterchangeCheck:
    q: int
    Q: int
    sign: int
    holds: bool


def interchange_check(r: int, a: int, b: int, q: int,
                      options: CountingOptions = DEFAULT_OPTIONS) -> InterchangeCheck:
    """Compare T_q(b, a) with +-T_q(a, b), the sign being + exactly when Q = 1 mod 4."""
    forward = trace_set(r, a, b, q, options)
    backward = trace_set(r, b, a, q, options)
    sign = 1 if forward.Q % 4 == 1 else -1
    expected = forward.elements if sign == 1 else forward.negated()
    return InterchangeCheck(q, forward.Q, sign, backward.elements == expected)
