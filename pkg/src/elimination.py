"""Newform fixtures and the elimination bounds N, M, B built from Frobenius trace sets."""

import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Poly, factorint, isprime, primerange
from sympy.polys.densearith import dup_mul, dup_rem
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_from_int_poly

from .cyclofield import KElement, X, cyclo_field, galois_index, resultant_norm
from .errors import (
    FixtureCertificateError,
    InvalidParameterError,
    PreconditionError,
    UnsupportedError,
)
from .frobenius import DEFAULT_OPTIONS, CountingOptions, LPolynomial, TraceSet, trace_set
from .localdata import serre_level

logger = logging.getLogger(__name__)

PLAIN = 'plain'
SQUARED = 'squared'
SIGN_FLIPPED = 'sign_flipped'
TWIST_MODES = ('plain', 'chi_r')
CASE_MODES = ('plain', 'both_twists', 'chi_r')


def interchange_sign(Q: int) -> int:
    """Sign relating T_q(b, a) to T_q(a, b): +1 iff Q = 1 mod 4."""
    if Q % 2 == 0:
        raise InvalidParameterError(f"Q = {Q} must be odd")
    return 1 if Q % 4 == 1 else -1


def chi_r_sign(Q: int, r: int) -> int:
    """chi_r(Frob) for a residue field of size Q, which is +-1 mod r."""
    if Q % r == 1:
        return 1
    if Q % r == r - 1:
        return -1
    raise InvalidParameterError(f"Q = {Q} is not +-1 modulo {r}")


def select_variant(Q: int, r: int, twist_mode: str) -> str:
    if twist_mode not in TWIST_MODES:
        raise InvalidParameterError(f"twist mode must be one of {TWIST_MODES}, got {twist_mode!r}")
    if interchange_sign(Q) == -1:
        return SQUARED
    if twist_mode == 'chi_r' and chi_r_sign(Q, r) == -1:
        return SIGN_FLIPPED
    return PLAIN


def parse_subset(subset: Union[str, Sequence[int], None], r: int) -> Tuple[int, ...]:
    """'full' (or None) means every sigma_j; otherwise a list of Galois indices in 1..g."""
    g = (r - 1) // 2
    if subset is None or subset == 'full':
        return tuple(range(1, g + 1))
    if isinstance(subset, str):
        subset = [int(part) for part in subset.split(',') if part.strip()]
    indices = tuple(sorted({int(j) for j in subset}))
    if not indices or any(not 1 <= j <= g for j in indices):
        raise InvalidParameterError(f"subset must be 'full' or indices in 1..{g}, got {subset}")
    return indices


@dataclass(frozen=True)
class FieldElement:
    """Element of a coefficient field: power-basis numerators over a positive denominator."""

    coeffs: Tuple[int, ...]
    denominator: int = 1

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        den = int(self.denominator)
        if den == 0:
            raise InvalidParameterError("denominator must be nonzero")
        if den < 0:
            coeffs, den = tuple(-c for c in coeffs), -den
        common = den
        for c in coeffs:
            common = gcd(common, c)
        if common > 1:
            coeffs, den = tuple(c // common for c in coeffs), den // common
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'denominator', den)

    def to_json(self) -> Dict[str, Any]:
        return {'coeffs': [str(c) for c in self.coeffs], 'denominator': str(self.denominator)}

    @classmethod
    def from_json(cls, data: Union[Dict[str, Any], Sequence]) -> 'FieldElement':
        if isinstance(data, dict):
            return cls(tuple(int(c) for c in data['coeffs']), int(data.get('denominator', 1)))
        return cls(tuple(int(c) for c in data))


class CoefficientField:
    """Q[x]/(minpoly) for a monic integer minpoly."""

    def __init__(self, minpoly: Sequence[int]):
        self.minpoly = tuple(int(c) for c in minpoly)
        if len(self.minpoly) < 2 or self.minpoly[-1] != 1:
            raise FixtureCertificateError(f"field_minpoly must be monic of positive degree, got {list(self.minpoly)}")
        self.degree = len(self.minpoly) - 1
        self._desc = list(reversed(self.minpoly))

    def element(self, coeffs: Sequence[int], denominator: int = 1) -> FieldElement:
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) > self.degree:
            rem = dup_rem(dup_strip(list(reversed(coeffs))), self._desc, ZZ)
            coeffs = [int(c) for c in reversed(rem)]
        return FieldElement(tuple(coeffs) + (0,) * (self.degree - len(coeffs)), denominator)

    def constant(self, value: Union[int, Fraction]) -> FieldElement:
        value = Fraction(value)
        return self.element([value.numerator], value.denominator)

    def _pad(self, u: FieldElement) -> List[int]:
        return list(u.coeffs) + [0] * (self.degree - len(u.coeffs))

    def add(self, u: FieldElement, v: FieldElement) -> FieldElement:
        a, b = self._pad(u), self._pad(v)
        return FieldElement(tuple(x * v.denominator + y * u.denominator for x, y in zip(a, b)),
                            u.denominator * v.denominator)

    def neg(self, u: FieldElement) -> FieldElement:
        return FieldElement(tuple(-c for c in u.coeffs), u.denominator)

    def sub(self, u: FieldElement, v: FieldElement) -> FieldElement:
        return self.add(u, self.neg(v))

    def mul(self, u: FieldElement, v: FieldElement) -> FieldElement:
        product = dup_mul(dup_strip(list(reversed(self._pad(u)))), dup_strip(list(reversed(self._pad(v)))), ZZ)
        return self.element([int(c) for c in reversed(product)], u.denominator * v.denominator)

    def is_zero(self, u: FieldElement) -> bool:
        return not any(u.coeffs)

    def norm(self, u: FieldElement) -> Fraction:
        return resultant_norm(self.minpoly, self._pad(u), u.denominator)

    def abs_norm(self, u: FieldElement) -> int:
        value = self.norm(u)
        if value.denominator != 1:
            raise FixtureCertificateError(f"norm {value} is not an integer; eigenvalue data is not integral")
        return abs(value.numerator)

    def reduce_at(self, u: FieldElement, root: int, p: int) -> int:
        """Image of u under x -> root in F_p."""
        try:
            inverse = pow(u.denominator, -1, p)
        except ValueError:
            raise FixtureCertificateError(f"denominator {u.denominator} is divisible by {p}") from None
        total = 0
        for c in reversed(self._pad(u)):
            total = (total * root + c) % p
        return (total * inverse) % p

    def compose(self, coeffs: Sequence[int], point: FieldElement) -> FieldElement:
        """Evaluate an integer polynomial (ascending) at point."""
        total = self.constant(0)
        for c in reversed(coeffs):
            total = self.add(self.mul(total, point), self.constant(c))
        return total


def _split_roots(coeffs: Sequence[int], p: int) -> Optional[List[int]]:
    """Sorted roots mod p when the polynomial splits into distinct linear factors, else None."""
    _, factors = gf_factor(gf_from_int_poly(list(reversed(coeffs)), p), p, ZZ)
    degree = len(coeffs) - 1
    if len(factors) != degree or any(len(fac) != 2 or mult != 1 for fac, mult in factors):
        return None
    return sorted((-fac[1]) % p for fac, _ in factors)


def irreducibility_witness(minpoly: Sequence[int], prime_bound: int = 2000) -> bool:
    """
    Certify irreducibility over Q from factorization patterns modulo small primes.

    A factor over Q would have a degree achievable as a sum of factor degrees modulo
    every good prime; when only 0 and n remain achievable the polynomial is irreducible.
    """
    n = len(minpoly) - 1
    if n == 1:
        return True
    desc = list(reversed([int(c) for c in minpoly]))
    if not Poly(desc, X, domain=ZZ).is_sqf:
        return False
    possible = (1 << (n + 1)) - 1
    for p in primerange(3, prime_bound):
        _, factors = gf_factor(gf_from_int_poly(desc, p), p, ZZ)
        if any(mult > 1 for _, mult in factors):
            continue
        sums = 1
        for fac, _ in factors:
            sums |= sums << (len(fac) - 1)
        possible &= sums
        if possible == (1 | (1 << n)):
            logger.debug("irreducibility of degree %d certified at p=%d", n, p)
            return True
    return False


@dataclass
class SubfieldData:
    """Coefficient data in a subfield E_g, used at inert primes for Galois-stable constituents."""

    minpoly: Tuple[int, ...]
    galois_stable: bool
    eigenvalues: Dict[int, FieldElement] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return {
            'minpoly': [str(c) for c in self.minpoly],
            'galois_stable': self.galois_stable,
            'eigenvalues': [{'q': q, 'value': v.to_json()} for q, v in sorted(self.eigenvalues.items())],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'SubfieldData':
        return cls(tuple(int(c) for c in data['minpoly']), bool(data.get('galois_stable', False)),
                   {int(e['q']): FieldElement.from_json(e['value']) for e in data.get('eigenvalues', [])})


@dataclass
class NewformFixture:
    """Hecke eigenvalue data of one newform, with K = Q(zeta_r)^+ embedded in its coefficient field K_g."""

    label: str
    r: int
    level: Dict[str, Any]
    field_minpoly: Tuple[int, ...]
    omega_embedding: FieldElement
    eigenvalues: Dict[Tuple[int, int], FieldElement] = field(default_factory=dict)
    cm: bool = False
    base_change_subfield_degree: Optional[int] = None
    subfield_Eg: Optional[SubfieldData] = None
    trust_irreducible: bool = False

    @cached_property
    def field(self) -> CoefficientField:
        return CoefficientField(self.field_minpoly)

    @cached_property
    def _omega_powers(self) -> List[FieldElement]:
        Kg = self.field
        powers = [Kg.constant(1)]
        for _ in range(1, cyclo_field(self.r).g):
            powers.append(Kg.mul(powers[-1], self.omega_embedding))
        return powers

    def embed(self, u: KElement) -> FieldElement:
        """Image of u in K_g through omega_embedding."""
        Kg = self.field
        total = Kg.constant(0)
        for c, power in zip(u.coeffs, self._omega_powers):
            if c:
                total = Kg.add(total, FieldElement(tuple(c * x for x in power.coeffs), power.denominator))
        return FieldElement(total.coeffs, total.denominator * u.denominator)

    def eigenvalue(self, q: int, index: int) -> FieldElement:
        try:
            return self.eigenvalues[(q, index)]
        except KeyError:
            raise PreconditionError(
                f"fixture {self.label} has no eigenvalue at the prime {index} above {q}"
            ) from None

    def uses_subfield(self, q: int, inert: bool) -> bool:
        return (self.subfield_Eg is not None and self.subfield_Eg.galois_stable
                and self.base_change_subfield_degree is None and inert
                and q in self.subfield_Eg.eigenvalues)

    def validate(self) -> None:
        """
        Check the fixture certificates.

        Raises:
            FixtureCertificateError: Naming the first violated invariant
        """
        field_K = cyclo_field(self.r)
        Kg = self.field
        if not self.trust_irreducible and not irreducibility_witness(self.field_minpoly):
            raise FixtureCertificateError(f"{self.label}: field_minpoly is not certified irreducible")
        if Kg.degree % field_K.g:
            raise FixtureCertificateError(
                f"{self.label}: [K_g:Q] = {Kg.degree} is not divisible by g = {field_K.g}"
            )
        if not Kg.is_zero(Kg.compose(field_K.h_coeffs, self.omega_embedding)):
            raise FixtureCertificateError(f"{self.label}: omega_embedding is not a root of h, so K is not in K_g")
        for q, index in self.eigenvalues:
            if (2 * self.r) % q == 0 or not isprime(q):
                raise FixtureCertificateError(f"{self.label}: eigenvalue at invalid prime {q}")
            if not 0 <= index < field_K.split_prime(q).n_primes:
                raise FixtureCertificateError(f"{self.label}: no prime with label {index} above {q}")
        if self.subfield_Eg is not None:
            CoefficientField(self.subfield_Eg.minpoly)

    def to_json(self) -> Dict[str, Any]:
        field_K = cyclo_field(self.r)
        eigen = []
        for (q, index), value in sorted(self.eigenvalues.items()):
            factor = field_K.split_prime(q).factors[index]
            eigen.append({'q': q, 'index': index, 'factor': list(factor), 'value': value.to_json()})
        return {
            'label': self.label,
            'r': self.r,
            'level': self.level,
            'field_minpoly': [str(c) for c in self.field_minpoly],
            'omega_embedding': self.omega_embedding.to_json(),
            'eigenvalues': eigen,
            'cm': self.cm,
            'base_change_subfield_degree': self.base_change_subfield_degree,
            'subfield_Eg': None if self.subfield_Eg is None else self.subfield_Eg.to_json(),
            'trust_irreducible': self.trust_irreducible,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'NewformFixture':
        label = data.get('label', '<unnamed>')
        try:
            r = int(data['r'])
            field_K = cyclo_field(r)
            eigenvalues = {}
            for entry in data['eigenvalues']:
                q, index = int(entry['q']), int(entry['index'])
                if 'factor' in entry:
                    expected = field_K.split_prime(q).factors[index] if index < field_K.split_prime(q).n_primes else None
                    if tuple(int(c) for c in entry['factor']) != expected:
                        raise FixtureCertificateError(
                            f"{label}: label {index} above {q} names factor {entry['factor']}, expected {expected}"
                        )
                eigenvalues[(q, index)] = FieldElement.from_json(entry['value'])
            subfield = data.get('subfield_Eg')
            return cls(
                label=str(label),
                r=r,
                level=dict(data.get('level') or {}),
                field_minpoly=tuple(int(c) for c in data['field_minpoly']),
                omega_embedding=FieldElement.from_json(data['omega_embedding']),
                eigenvalues=eigenvalues,
                cm=bool(data.get('cm', False)),
                base_change_subfield_degree=data.get('base_change_subfield_degree'),
                subfield_Eg=None if subfield is None else SubfieldData.from_json(subfield),
                trust_irreducible=bool(data.get('trust_irreducible', False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FixtureCertificateError(f"{label}: malformed fixture field ({e!r})") from e


def load_fixtures(path: Union[str, Path]) -> List[NewformFixture]:
    """
    Read and certify newform fixtures from a UTF-8 JSON file.

    The file holds a list of fixtures, or an object with a "fixtures" list.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Fixture file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise FixtureCertificateError(f"{path} is not valid JSON: {e}") from e
    if isinstance(data, dict):
        data = data.get('fixtures')
    if not isinstance(data, list):
        raise FixtureCertificateError(f"{path} must contain a list of fixtures")

    fixtures = []
    for entry in data:
        if not isinstance(entry, dict):
            raise FixtureCertificateError(f"{path}: fixture entries must be objects")
        fixture = NewformFixture.from_json(entry)
        fixture.validate()
        fixtures.append(fixture)
    logger.info("loaded %d fixtures from %s", len(fixtures), path)
    return fixtures


def save_fixtures(path: Union[str, Path], fixtures: Iterable[NewformFixture]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump([fx.to_json() for fx in fixtures], f, indent=2, ensure_ascii=False, sort_keys=True)
    return path


def _lift_class(x: int, y: int, q: int) -> Tuple[int, int]:
    """Coprime integers in the residue class (x, y) mod q."""
    x, y = x % q, y % q
    if gcd(x, y) == 1:
        return x, y
    if x == 0:
        return q, y
    k = 1
    while gcd(x, y + k * q) != 1:
        k += 1
    return x, y + k * q


def _interchanged(ts: TraceSet, a: int, b: int) -> TraceSet:
    sign = interchange_sign(ts.Q)
    elements = ts.elements if sign == 1 else ts.negated()
    assignment = {i: (u if sign == 1 else -u) for i, u in ts.prime_assignment.items()}
    l_poly = None
    if ts.l_poly is not None:
        l_poly = LPolynomial(tuple(c * sign ** i for i, c in enumerate(ts.l_poly.coeffs)), ts.Q)
    return TraceSet(ts.r, a, b, ts.q, ts.Q, ts.splitting, list(elements), assignment, l_poly)


class TraceStore:
    """Thread-safe memo of trace sets keyed by (r, x mod q, y mod q, q)."""

    def __init__(self, options: CountingOptions = DEFAULT_OPTIONS):
        self.options = options
        self._store: Dict[Tuple[int, int, int, int], TraceSet] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._store)

    def get(self, r: int, x: int, y: int, q: int) -> TraceSet:
        x, y = x % q, y % q
        key = (r, x, y, q)
        with self._lock:
            cached = self._store.get(key)
            swapped = self._store.get((r, y, x, q))
            if cached is not None:
                self.hits += 1
                return cached
        a, b = _lift_class(x, y, q)
        if swapped is not None:
            ts = _interchanged(swapped, a, b)
        else:
            ts = trace_set(r, a, b, q, self.options)
        with self._lock:
            self.misses += 1
            return self._store.setdefault(key, ts)


def _galois_labels(r: int, q: int, subset: Sequence[int]) -> List[Tuple[int, int]]:
    field_K = cyclo_field(r)
    splitting = field_K.split_prime(q)
    return [(j, field_K.label_permutation(splitting, j)[0]) for j in subset]


def _difference(Kg: CoefficientField, s: FieldElement, a: FieldElement, variant: str) -> FieldElement:
    if variant == SQUARED:
        return Kg.sub(Kg.mul(s, s), Kg.mul(a, a))
    if variant == SIGN_FLIPPED:
        return Kg.add(s, a)
    return Kg.sub(s, a)


def _class_factor(fx: NewformFixture, q: int, subset: Sequence[int], ts: TraceSet, variant: str) -> int:
    """prod over u in T_q of gcd over sigma of |Norm(sigma(u) -+ a_sigma(q)(g))|."""
    field_K = cyclo_field(fx.r)
    if fx.uses_subfield(q, ts.splitting.inert):
        Eg = CoefficientField(fx.subfield_Eg.minpoly)
        t = Eg.constant(ts.elements[0].rationals()[0])
        return Eg.abs_norm(_difference(Eg, t, fx.subfield_Eg.eigenvalues[q], variant))

    Kg = fx.field
    pairs = _galois_labels(fx.r, q, subset)
    total = 1
    for u in ts.elements:
        common = 0
        for j, label in pairs:
            s = fx.embed(field_K.galois_apply(j, u))
            common = gcd(common, Kg.abs_norm(_difference(Kg, s, fx.eigenvalue(q, label), variant)))
        total *= common
    return total


def bound_N(fx: NewformFixture, q: int, subset: Union[str, Sequence[int], None], ts: TraceSet) -> int:
    """
    N_{q,S}(g) for one trace set.

    Args:
        fx: Newform fixture for the same r as ts
        q: Auxiliary prime
        subset: Galois indices (or 'full')
        ts: Trace set at q

    Returns:
        Non-negative integer; 0 means no information
    """
    if ts.r != fx.r or ts.q != q:
        raise InvalidParameterError(f"trace set for (r, q) = ({ts.r}, {ts.q}) does not match ({fx.r}, {q})")
    return _class_factor(fx, q, parse_subset(subset, fx.r), ts, PLAIN)


def bound_M(fx: NewformFixture, q: int, subset: Union[str, Sequence[int], None]) -> int:
    """gcd over sigma of |Norm(a_sigma(q)(g)^2 - (Q+1)^2)|."""
    Q = cyclo_field(fx.r).split_prime(q).residue_size
    Kg = fx.field
    shift = Kg.constant((Q + 1) ** 2)
    common = 0
    for _, label in _galois_labels(fx.r, q, parse_subset(subset, fx.r)):
        a = fx.eigenvalue(q, label)
        common = gcd(common, Kg.abs_norm(Kg.sub(Kg.mul(a, a), shift)))
    return common


def single_prime_bound(fx: NewformFixture, q: int, label: int, ts: TraceSet) -> int:
    """N at one prime of K above q with S = {1}."""
    Kg = fx.field
    a = fx.eigenvalue(q, label)
    total = 1
    for u in ts.elements:
        total *= Kg.abs_norm(Kg.sub(fx.embed(u), a))
    return total


def split_prime_bounds(fx: NewformFixture, q: int, ts: TraceSet) -> int:
    """gcd over the primes of K above q of their single-prime bounds."""
    common = 0
    for label in range(ts.splitting.n_primes):
        common = gcd(common, single_prime_bound(fx, q, label, ts))
    return common


@dataclass
class BoundValue:
    q: int
    Q: int
    subset: Tuple[int, ...]
    variant: str
    M: int
    class_factors: Dict[Tuple[int, int], int]
    B: int

    def to_json(self) -> Dict[str, Any]:
        return {
            'q': self.q, 'Q': self.Q, 'subset': list(self.subset), 'variant': self.variant,
            'M': str(self.M), 'B': str(self.B),
            'class_factors': [{'x': x, 'y': y, 'factor': str(v)} for (x, y), v in sorted(self.class_factors.items())],
        }


def residue_classes(r: int, q: int) -> List[Tuple[int, int]]:
    return [(x, y) for x in range(q) for y in range(x, q) if (x ** r + y ** r) % q]


def bound_B(fx: NewformFixture, q: int, subset: Union[str, Sequence[int], None], r: int, d: int,
            twist_mode: str = 'plain', store: Optional[TraceStore] = None, workers: int = 1) -> BoundValue:
    """
    B_{q,S}(g) = M_{q,S}(g) times the per-class trace factors over all residue classes mod q.

    The formula variant follows Q mod 4, Q mod r and the twist mode.
    """
    if fx.r != r:
        raise InvalidParameterError(f"fixture {fx.label} is for r={fx.r}, not r={r}")
    if not isprime(q) or (2 * r * d) % q == 0:
        raise PreconditionError(f"q = {q} must be a prime not dividing 2rd = {2 * r * d}")
    indices = parse_subset(subset, r)
    Q = cyclo_field(r).split_prime(q).residue_size
    variant = select_variant(Q, r, twist_mode)
    store = store if store is not None else TraceStore()

    classes = residue_classes(r, q)

    def factor(cls: Tuple[int, int]) -> int:
        return _class_factor(fx, q, indices, store.get(r, cls[0], cls[1], q), variant)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            factors = list(executor.map(factor, classes))
    else:
        factors = [factor(cls) for cls in classes]

    M = bound_M(fx, q, indices)
    B = M
    for value in factors:
        B *= value
    logger.info("%s q=%d variant=%s: M=%d, %d classes, B %s 0", fx.label, q, variant, M, len(classes),
                "=" if B == 0 else "!=")
    return BoundValue(q, Q, indices, variant, M, dict(zip(classes, factors)), B)


@dataclass
class FixtureBounds:
    label: str
    cm: bool
    values: List[BoundValue]
    survivors: Optional[List[int]]
    unfactored: int = 1
    small_primes: Tuple[int, ...] = (2, 3)

    @property
    def all_survive(self) -> bool:
        return self.survivors is None

    @property
    def cm_obstruction(self) -> bool:
        return self.all_survive and self.cm

    @property
    def eliminated(self) -> bool:
        return (not self.all_survive and self.unfactored == 1
                and set(self.survivors) <= set(self.small_primes))

    def to_json(self) -> Dict[str, Any]:
        return {
            'label': self.label,
            'cm': self.cm,
            'bounds': [v.to_json() for v in self.values],
            'survivors': 'ALL' if self.survivors is None else list(self.survivors),
            'excluded_externally': [] if self.survivors is None else
            [p for p in self.survivors if p in self.small_primes],
            'unfactored': str(self.unfactored),
            'cm_obstruction': self.cm_obstruction,
            'eliminated': self.eliminated,
        }


@dataclass
class BoundReport:
    r: int
    d: int
    q_list: List[int]
    subset: Tuple[int, ...]
    twist_mode: str
    entries: List[FixtureBounds] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            'r': self.r, 'd': self.d, 'q_list': list(self.q_list), 'subset': list(self.subset),
            'twist_mode': self.twist_mode, 'fixtures': [e.to_json() for e in self.entries],
        }


def _prime_support(value: int, limit: Optional[int]) -> Tuple[List[int], int]:
    primes, cofactor = [], 1
    for p, e in factorint(value, limit=limit).items():
        if isprime(p):
            primes.append(p)
        else:
            cofactor *= p ** e
    return sorted(primes), cofactor


def survivors(fixtures: Sequence[NewformFixture], q_list: Sequence[int], subset: Union[str, Sequence[int], None],
              r: int, d: int = 1, twist_mode: str = 'plain', small_primes: Sequence[int] = (2, 3),
              factor_limit: Optional[int] = None, store: Optional[TraceStore] = None,
              workers: int = 1) -> BoundReport:
    """
    Primes p that divide B_q for every auxiliary q, per fixture.

    Zero bounds carry no information; if every bound is zero all primes survive.
    """
    store = store if store is not None else TraceStore()
    report = BoundReport(r, d, list(q_list), parse_subset(subset, r), twist_mode)
    for fx in fixtures:
        values = [bound_B(fx, q, subset, r, d, twist_mode, store, workers) for q in q_list]
        common = 0
        for value in values:
            common = gcd(common, value.B)
        if common == 0:
            entry = FixtureBounds(fx.label, fx.cm, values, None, small_primes=tuple(small_primes))
        else:
            primes, cofactor = _prime_support(common, factor_limit)
            entry = FixtureBounds(fx.label, fx.cm, values, primes, cofactor, tuple(small_primes))
        logger.info("%s: survivors %s", fx.label, 'ALL' if entry.all_survive else entry.survivors)
        report.entries.append(entry)
    return report


def cm_fixture(r: int, q_list: Sequence[int], options: CountingOptions = DEFAULT_OPTIONS,
               store: Optional[TraceStore] = None) -> NewformFixture:
    """The CM form attached to J_r(0, 1), with K_g = K."""
    field_K = cyclo_field(r)
    store = store if store is not None else TraceStore(options)
    eigenvalues = {}
    for q in q_list:
        if (2 * r) % q == 0:
            raise InvalidParameterError(f"q = {q} must be coprime to 2r")
        ts = store.get(r, 0, 1, q)
        for label, u in ts.prime_assignment.items():
            eigenvalues[(q, label)] = FieldElement(u.coeffs, u.denominator)
    return NewformFixture(
        label=f"cm-{r}",
        r=r,
        level=serre_level(r, 1).to_json(),
        field_minpoly=field_K.h_coeffs,
        omega_embedding=FieldElement((0, 1) + (0,) * (field_K.g - 2)) if field_K.g > 1 else FieldElement((-1,)),
        eigenvalues=eigenvalues,
        cm=True,
    )


def conjugate_fixture(fx: NewformFixture, j: int) -> NewformFixture:
    """
    Present the Hecke conjugate of a fixture with K_g = K through the generator sigma_j(w).

    Eigenvalue coordinates are unchanged; w is re-expressed as sigma_j^-1 of the new generator.
    """
    field_K = cyclo_field(fx.r)
    if tuple(fx.field_minpoly) != field_K.h_coeffs:
        raise UnsupportedError("conjugate_fixture needs a fixture with K_g = K")
    inverse = next(k for k in range(1, field_K.g + 1) if galois_index(fx.r, j * k) == 1)
    image = field_K.galois_apply(inverse, field_K.omega())
    return NewformFixture(
        label=f"{fx.label}^sigma_{j}",
        r=fx.r,
        level=dict(fx.level),
        field_minpoly=fx.field_minpoly,
        omega_embedding=FieldElement(image.coeffs, image.denominator),
        eigenvalues=dict(fx.eigenvalues),
        cm=fx.cm,
        base_change_subfield_degree=fx.base_change_subfield_degree,
        subfield_Eg=fx.subfield_Eg,
        trust_irreducible=fx.trust_irreducible,
    )


@dataclass(frozen=True)
class PairVerdict:
    i: int
    j: int
    accepted: bool
    witness: str

    def to_json(self) -> Dict[str, Any]:
        return {'i': self.i, 'j': self.j, 'accepted': self.accepted, 'witness': self.witness}


@dataclass
class RefinedReport:
    p: int
    q: int
    case_mode: str
    pairs: List[PairVerdict] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return 'accept' if any(pair.accepted for pair in self.pairs) else 'reject'

    def accepted_pairs(self) -> List[Tuple[int, int]]:
        return [(pair.i, pair.j) for pair in self.pairs if pair.accepted]

    def to_json(self) -> Dict[str, Any]:
        return {'p': self.p, 'q': self.q, 'case_mode': self.case_mode, 'verdict': self.verdict,
                'pairs': [pair.to_json() for pair in self.pairs]}


def _k_residue(u: KElement, root: int, p: int) -> int:
    total = 0
    for c in reversed(u.coeffs):
        total = (total * root + c) % p
    return (total * pow(u.denominator, -1, p)) % p


def refined_eliminate(fx: NewformFixture, p: int, q: int, case_mode: str = 'plain', d: int = 1,
                      subset: Union[str, Sequence[int], None] = None, store: Optional[TraceStore] = None,
                      screen: bool = True) -> RefinedReport:
    """
    Test the mod-P trace congruences prime by prime when p is totally split in K_g.

    Args:
        fx: Newform fixture
        p: Candidate exponent
        q: Auxiliary prime
        case_mode: 'plain', 'chi_r' or 'both_twists'
        d: Coefficient of the equation
        subset: Galois indices compared
        store: Shared trace store
        screen: Apply the multiplicative-reduction screen (Q+1)^2 = a^2 first

    Returns:
        RefinedReport with one verdict per consistent pair of residue maps
    """
    r = fx.r
    if case_mode not in CASE_MODES:
        raise InvalidParameterError(f"case mode must be one of {CASE_MODES}, got {case_mode!r}")
    if not isprime(p) or (2 * r * d * q) % p == 0:
        raise PreconditionError(f"p = {p} must be a prime not dividing 2rdq = {2 * r * d * q}")
    if not isprime(q) or (2 * r * d) % q == 0:
        raise PreconditionError(f"q = {q} must be a prime not dividing 2rd = {2 * r * d}")

    field_K = cyclo_field(r)
    Kg = fx.field
    roots_Kg = _split_roots(fx.field_minpoly, p)
    if roots_Kg is None:
        raise UnsupportedError(f"p = {p} is not totally split in the coefficient field of {fx.label}")
    roots_K = _split_roots(field_K.h_coeffs, p)
    if roots_K is None:
        raise FixtureCertificateError(f"{fx.label}: p = {p} splits in K_g but not in K")

    Q = field_K.split_prime(q).residue_size
    pairs = _galois_labels(r, q, parse_subset(subset, r))
    if interchange_sign(Q) == -1:
        signs: Tuple[int, ...] = ()
    elif case_mode == 'plain':
        signs = (1,)
    elif case_mode == 'chi_r':
        signs = (chi_r_sign(Q, r),)
    else:
        signs = tuple(sorted({1, chi_r_sign(Q, r)}, reverse=True))

    store = store if store is not None else TraceStore()
    classes = residue_classes(r, q)
    report = RefinedReport(p, q, case_mode)

    for j, rho in enumerate(roots_Kg):
        w = Kg.reduce_at(fx.omega_embedding, rho, p)
        if w not in roots_K:
            raise FixtureCertificateError(
                f"{fx.label}: omega_embedding({rho}) = {w} mod {p} is not a root of h"
            )
        i = roots_K.index(w)
        eigen = {label: Kg.reduce_at(fx.eigenvalue(q, label), rho, p) for _, label in pairs}

        if screen and all((eigen[label] ** 2 - (Q + 1) ** 2) % p == 0 for _, label in pairs):
            report.pairs.append(PairVerdict(i, j, True, 'multiplicative screen'))
            continue

        witness = None
        first_failure = ''
        for x, y in classes:
            ts = store.get(r, x, y, q)
            for u in ts.elements:
                residues = [(_k_residue(field_K.galois_apply(jj, u), w, p), eigen[label], jj, label)
                            for jj, label in pairs]
                if not signs:
                    failures = [(jj, label) for s, a, jj, label in residues if (s * s - a * a) % p]
                    if not failures:
                        witness = f"class ({x},{y}), u = {u}, up to sign"
                else:
                    failures = []
                    for sign in signs:
                        failures = [(jj, label) for s, a, jj, label in residues if (s - sign * a) % p]
                        if not failures:
                            witness = f"class ({x},{y}), u = {u}, sign {sign:+d}"
                            break
                if witness:
                    break
                if not first_failure:
                    jj, label = failures[0]
                    first_failure = f"class ({x},{y}) fails at sigma_{jj}, prime {label} above {q}"
            if witness:
                break
        report.pairs.append(PairVerdict(i, j, witness is not None, witness or first_failure))

    logger.info("refined p=%d q=%d %s: %s", p, q, case_mode, report.verdict)
    return report
