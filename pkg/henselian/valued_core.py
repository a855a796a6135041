"""Exact arithmetic in valued fields.

One abstract interface (``ValuedField`` / ``FieldElement``) is instantiated by
Q_p and by the Laurent series fields k((t)) with k = F_p or k = Q. Elements
built from rationals (or, in k((t)), from Laurent polynomials) are exact;
approximate elements carry a relative precision, and a value whose known digits
have all cancelled is "exhausted": its valuation is not determined and asking
for it raises ``PrecisionExhaustedError`` instead of guessing.

Value group is Z throughout, with the uniformizer (p, resp. t) of valuation 1.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

from config import LAURENT_PRECISION_CAP
from .errors import (
    DivisionByZeroError,
    FieldMismatchError,
    NotInValuationRingError,
    PrecisionExhaustedError,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


class _Infinity:
    """Valuation of zero: above every integer and absorbing under addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


INF = _Infinity()
Valuation = Union[int, _Infinity]


# ---------------------------------------------------------------------------
# Rational helpers
# ---------------------------------------------------------------------------

def padic_valuation(q: Rational, p: int) -> Valuation:
    """v_p of a rational; INF for zero."""
    q = Fraction(q)
    if q == 0:
        return INF
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def split_unit(q: Rational, p: int) -> Tuple[int, Fraction]:
    """Write a nonzero rational as p^v * u with u a p-adic unit."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("zero has no unit part")
    v = padic_valuation(q, p)
    return v, q / Fraction(p) ** v


def unit_residue(u: Rational, p: int, k: int) -> int:
    """Class of the p-adic unit u modulo p^k, as an integer in [0, p^k)."""
    u = Fraction(u)
    modulus = p ** k
    return (u.numerator * pow(u.denominator, -1, modulus)) % modulus


# ---------------------------------------------------------------------------
# Residue fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueField:
    """F_p when ``prime`` is set, Q otherwise."""

    prime: Optional[int] = None

    @property
    def is_finite(self) -> bool:
        return self.prime is not None

    def normalize(self, value: Rational):
        if self.prime is None:
            return Fraction(value)
        value = Fraction(value)
        if value.denominator % self.prime == 0:
            raise NotInValuationRingError(f"{value} has no image in F_{self.prime}")
        return (value.numerator * pow(value.denominator, -1, self.prime)) % self.prime

    def add(self, a, b):
        return a + b if self.prime is None else (a + b) % self.prime

    def mul(self, a, b):
        return a * b if self.prime is None else (a * b) % self.prime

    def neg(self, a):
        return -a if self.prime is None else (-a) % self.prime

    def inv(self, a):
        if a == 0:
            raise DivisionByZeroError("division by zero in the residue field")
        return 1 / Fraction(a) if self.prime is None else pow(a, -1, self.prime)

    def zero(self):
        return Fraction(0) if self.prime is None else 0

    def element(self, value: Rational) -> "ResidueElement":
        return ResidueElement(self, self.normalize(value))

    def __str__(self):
        return "Q" if self.prime is None else f"F_{self.prime}"


@dataclass(frozen=True)
class ResidueElement:
    field: ResidueField
    value: Rational

    def __mul__(self, other: "ResidueElement") -> "ResidueElement":
        if other.field != self.field:
            raise FieldMismatchError(f"cannot multiply residues of {self.field} and {other.field}")
        return ResidueElement(self.field, self.field.mul(self.value, other.value))

    def __eq__(self, other):
        if isinstance(other, ResidueElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.normalize(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return str(self.value)


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

class ValuedField(ABC):
    """A discretely valued field with a fixed uniformizer."""

    @property
    @abstractmethod
    def residue_field(self) -> ResidueField:
        ...

    @abstractmethod
    def embed(self, q: Rational) -> "FieldElement":
        ...

    @abstractmethod
    def uniformizer_power(self, k: int) -> "FieldElement":
        ...

    def zero(self) -> "FieldElement":
        return self.embed(0)

    def one(self) -> "FieldElement":
        return self.embed(1)


@dataclass(frozen=True)
class PAdicField(ValuedField):
    prime: int

    def __post_init__(self):
        if self.prime < 2:
            raise ValueError(f"prime must be >= 2, got {self.prime}")

    @property
    def residue_field(self) -> ResidueField:
        return ResidueField(self.prime)

    def embed(self, q: Rational) -> "ExactRational":
        return ExactRational(Fraction(q), self)

    def uniformizer_power(self, k: int) -> "ExactRational":
        return ExactRational(Fraction(self.prime) ** k, self)

    def __str__(self):
        return f"Q_{self.prime}"


@dataclass(frozen=True)
class LaurentField(ValuedField):
    """k((t)) with k = F_p (``coefficient_prime`` set) or k = Q."""

    coefficient_prime: Optional[int] = None
    precision_cap: int = LAURENT_PRECISION_CAP

    @property
    def residue_field(self) -> ResidueField:
        return ResidueField(self.coefficient_prime)

    def embed(self, q: Rational) -> "LaurentSeries":
        return LaurentSeries.from_terms(self, {0: q})

    def uniformizer_power(self, k: int) -> "LaurentSeries":
        return LaurentSeries.from_terms(self, {k: 1})

    def __str__(self):
        return f"{self.residue_field}((t))"


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

class Op(Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    NEG = "neg"
    INV = "inv"


class FieldElement(ABC):
    """Common surface of every element; ``field`` names its valued field."""

    @property
    @abstractmethod
    def field(self) -> ValuedField:
        ...

    @abstractmethod
    def is_exact_zero(self) -> bool:
        ...

    @abstractmethod
    def valuation(self) -> Valuation:
        ...

    @abstractmethod
    def _leading_residue(self) -> ResidueElement:
        """Residue of an element of valuation exactly 0."""

    @abstractmethod
    def _add(self, other: "FieldElement") -> "FieldElement":
        ...

    @abstractmethod
    def _mul(self, other: "FieldElement") -> "FieldElement":
        ...

    @abstractmethod
    def _neg(self) -> "FieldElement":
        ...

    @abstractmethod
    def _inv(self) -> "FieldElement":
        ...

    def _known_zero_residue(self) -> bool:
        """True when the value is known to lie in the maximal ideal without a valuation."""
        return False

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, (int, Fraction)):
            return self.field.embed(other)
        return other

    def __add__(self, other):
        return arith(Op.ADD, self, self._coerce(other))

    def __radd__(self, other):
        return arith(Op.ADD, self._coerce(other), self)

    def __sub__(self, other):
        return arith(Op.SUB, self, self._coerce(other))

    def __rsub__(self, other):
        return arith(Op.SUB, self._coerce(other), self)

    def __mul__(self, other):
        return arith(Op.MUL, self, self._coerce(other))

    def __rmul__(self, other):
        return arith(Op.MUL, self._coerce(other), self)

    def __truediv__(self, other):
        return arith(Op.MUL, self, arith(Op.INV, self._coerce(other)))

    def __neg__(self):
        return arith(Op.NEG, self)


@dataclass(frozen=True, eq=True)
class ExactRational(FieldElement):
    value: Fraction
    context: PAdicField

    @property
    def field(self) -> PAdicField:
        return self.context

    @property
    def prime(self) -> int:
        return self.context.prime

    def is_exact_zero(self) -> bool:
        return self.value == 0

    def valuation(self) -> Valuation:
        return padic_valuation(self.value, self.prime)

    def _leading_residue(self) -> ResidueElement:
        return ResidueElement(self.field.residue_field, unit_residue(self.value, self.prime, 1))

    def _add(self, other):
        if isinstance(other, ExactRational):
            return ExactRational(self.value + other.value, self.context)
        return _padic_add(_lift_exact(self, other), other)

    def _mul(self, other):
        if isinstance(other, ExactRational):
            return ExactRational(self.value * other.value, self.context)
        return _padic_mul(_lift_exact(self, other), other)

    def _neg(self):
        return ExactRational(-self.value, self.context)

    def _inv(self):
        if self.value == 0:
            raise DivisionByZeroError("division by zero")
        return ExactRational(1 / self.value, self.context)

    def __str__(self):
        return str(self.value)


class PAdicKind(Enum):
    EXACT_ZERO = "exact-zero"
    APPROX = "approx"


@dataclass(frozen=True)
class PAdicNumber(FieldElement):
    """p^val * unit known to ``precision`` base-p digits of the unit.

    An APPROX value with precision 0 is exhausted: it is zero modulo
    p^val and nothing more is known.
    """

    prime: int
    kind: PAdicKind = PAdicKind.APPROX
    val: int = 0
    unit: int = 0
    precision: int = 0

    def __post_init__(self):
        if self.kind is PAdicKind.APPROX and self.precision > 0:
            if self.unit % self.prime == 0 or not 0 < self.unit < self.prime ** self.precision:
                raise ValueError(f"unit {self.unit} is not a unit modulo {self.prime}^{self.precision}")
        elif self.unit != 0:
            raise ValueError("exact zero and exhausted values carry no unit digits")

    @classmethod
    def zero(cls, prime: int) -> "PAdicNumber":
        return cls(prime, PAdicKind.EXACT_ZERO)

    @classmethod
    def exhausted(cls, prime: int, absolute_precision: int) -> "PAdicNumber":
        return cls(prime, PAdicKind.APPROX, absolute_precision, 0, 0)

    @classmethod
    def from_rational(cls, q: Rational, prime: int, precision: int) -> "PAdicNumber":
        if Fraction(q) == 0:
            return cls.zero(prime)
        v, u = split_unit(q, prime)
        return cls(prime, PAdicKind.APPROX, v, unit_residue(u, prime, precision), precision)

    @property
    def field(self) -> PAdicField:
        return PAdicField(self.prime)

    @property
    def is_exhausted(self) -> bool:
        return self.kind is PAdicKind.APPROX and self.precision == 0

    @property
    def absolute_precision(self) -> Valuation:
        if self.kind is PAdicKind.EXACT_ZERO:
            return INF
        return self.val + self.precision

    def is_exact_zero(self) -> bool:
        return self.kind is PAdicKind.EXACT_ZERO

    def valuation(self) -> Valuation:
        if self.kind is PAdicKind.EXACT_ZERO:
            return INF
        if self.is_exhausted:
            raise PrecisionExhaustedError(
                f"all known digits are zero below p^{self.val}; valuation not determined")
        return self.val

    def to_fraction(self) -> Fraction:
        """The representative p^val * unit (0 when no digit is known)."""
        if self.kind is PAdicKind.EXACT_ZERO or self.is_exhausted:
            return Fraction(0)
        return Fraction(self.prime) ** self.val * self.unit

    def equal_at(self, other: "PAdicNumber", m: int) -> bool:
        if self.is_exact_zero() or other.is_exact_zero():
            return self.is_exact_zero() and other.is_exact_zero()
        k = min(m, self.precision, other.precision)
        return self.val == other.val and (self.unit - other.unit) % self.prime ** k == 0

    def _known_zero_residue(self) -> bool:
        return self.is_exhausted and self.val >= 1

    def _leading_residue(self) -> ResidueElement:
        return ResidueElement(self.field.residue_field, self.unit % self.prime)

    def _add(self, other):
        if isinstance(other, ExactRational):
            other = _lift_exact(other, self)
        return _padic_add(self, other)

    def _mul(self, other):
        if isinstance(other, ExactRational):
            other = _lift_exact(other, self)
        return _padic_mul(self, other)

    def _neg(self):
        if self.kind is PAdicKind.EXACT_ZERO or self.is_exhausted:
            return self
        modulus = self.prime ** self.precision
        return PAdicNumber(self.prime, self.kind, self.val, (-self.unit) % modulus, self.precision)

    def _inv(self):
        if self.kind is PAdicKind.EXACT_ZERO:
            raise DivisionByZeroError("division by zero")
        if self.is_exhausted:
            raise PrecisionExhaustedError("cannot invert a value with no known digits")
        modulus = self.prime ** self.precision
        return PAdicNumber(self.prime, self.kind, -self.val, pow(self.unit, -1, modulus), self.precision)

    def __str__(self):
        if self.kind is PAdicKind.EXACT_ZERO:
            return "0"
        if self.is_exhausted:
            return f"O({self.prime}^{self.val})"
        return f"{self.unit}*{self.prime}^{self.val} + O({self.prime}^{self.val + self.precision})"


def _lift_exact(x: ExactRational, like: PAdicNumber) -> PAdicNumber:
    """Approximate an exact rational finely enough not to limit ``like``."""
    if x.value == 0:
        return PAdicNumber.zero(x.prime)
    v = padic_valuation(x.value, x.prime)
    reference = like.val if like.kind is PAdicKind.APPROX else v
    precision = like.precision + abs(v - reference) + 1
    return PAdicNumber.from_rational(x.value, x.prime, precision)


def _padic_add(x: PAdicNumber, y: PAdicNumber) -> PAdicNumber:
    if x.is_exact_zero():
        return y
    if y.is_exact_zero():
        return x
    p = x.prime
    if x.is_exhausted or y.is_exhausted:
        return PAdicNumber.exhausted(p, min(x.absolute_precision, y.absolute_precision))
    m = min(x.val, y.val)
    k = min(x.precision, y.precision)
    modulus = p ** k
    total = (x.unit * p ** (x.val - m) + y.unit * p ** (y.val - m)) % modulus
    if total == 0:
        logger.debug(f"cancellation consumed all {k} digits at p^{m}")
        return PAdicNumber.exhausted(p, m + k)
    lost = padic_valuation(total, p)
    rel = k - lost
    return PAdicNumber(p, PAdicKind.APPROX, m + lost, (total // p ** lost) % p ** rel, rel)


def _padic_mul(x: PAdicNumber, y: PAdicNumber) -> PAdicNumber:
    p = x.prime
    if x.is_exact_zero() or y.is_exact_zero():
        return PAdicNumber.zero(p)
    if x.is_exhausted or y.is_exhausted:
        return PAdicNumber.exhausted(p, x.val + y.val)
    k = min(x.precision, y.precision)
    return PAdicNumber(p, PAdicKind.APPROX, x.val + y.val, (x.unit * y.unit) % p ** k, k)


@dataclass(frozen=True)
class LaurentSeries(FieldElement):
    """t^val * (coeffs[0] + coeffs[1] t + ...) over F_p or Q.

    ``precision`` None marks an exact Laurent polynomial. Otherwise
    ``precision`` coefficients are known; with no coefficient known the
    series is exhausted and ``val`` is its absolute precision.
    """

    context: LaurentField
    val: int = 0
    coeffs: Tuple = ()
    precision: Optional[int] = None

    def __post_init__(self):
        if self.coeffs and self.coeffs[0] == 0:
            raise ValueError("leading coefficient must be nonzero")
        if self.precision is not None and len(self.coeffs) != self.precision:
            raise ValueError(f"expected {self.precision} coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_terms(cls, field: LaurentField, terms: Dict[int, Rational],
                   precision: Optional[int] = None) -> "LaurentSeries":
        """Exact series from {exponent: coefficient}; with ``precision`` the
        terms are read from the lowest exponent on as known digits."""
        k = field.residue_field
        items = {e: k.normalize(c) for e, c in terms.items()}
        nonzero = [e for e, c in items.items() if c != 0]
        if not nonzero:
            if precision is None:
                return cls(field)
            return cls(field, min(items), (), 0)
        low = min(nonzero)
        if precision is None:
            high = max(nonzero)
            return cls(field, low, tuple(items.get(e, k.zero()) for e in range(low, high + 1)))
        return _normalize_laurent(field, low, [items.get(e, k.zero()) for e in range(low, low + precision)],
                                  precision)

    @property
    def field(self) -> LaurentField:
        return self.context

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    @property
    def is_exhausted(self) -> bool:
        return self.precision == 0

    def is_exact_zero(self) -> bool:
        return self.precision is None and not self.coeffs

    def coefficient(self, exponent: int):
        i = exponent - self.val
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.residue_field.zero()

    def valuation(self) -> Valuation:
        if self.is_exact_zero():
            return INF
        if self.is_exhausted:
            raise PrecisionExhaustedError(
                f"all known coefficients are zero below t^{self.val}; valuation not determined")
        return self.val

    def _known_zero_residue(self) -> bool:
        return self.is_exhausted and self.val >= 1

    def _leading_residue(self) -> ResidueElement:
        return ResidueElement(self.field.residue_field, self.coeffs[0])

    def _add(self, other: "LaurentSeries") -> "LaurentSeries":
        k = self.field.residue_field
        if self.is_exact_zero():
            return other
        if other.is_exact_zero():
            return self
        if self.is_exhausted or other.is_exhausted:
            absolute = min(_laurent_absolute(self), _laurent_absolute(other))
            return LaurentSeries(self.field, absolute, (), 0)
        m = min(self.val, other.val)
        if self.is_exact and other.is_exact:
            high = max(self.val + len(self.coeffs), other.val + len(other.coeffs))
            coeffs = [k.add(self.coefficient(e), other.coefficient(e)) for e in range(m, high)]
            return _normalize_laurent(self.field, m, coeffs, None)
        n = min(c.precision for c in (self, other) if c.precision is not None)
        coeffs = [k.add(self.coefficient(e), other.coefficient(e)) for e in range(m, m + n)]
        return _normalize_laurent(self.field, m, coeffs, n)

    def _mul(self, other: "LaurentSeries") -> "LaurentSeries":
        k = self.field.residue_field
        if self.is_exact_zero() or other.is_exact_zero():
            return LaurentSeries(self.field)
        if self.is_exhausted or other.is_exhausted:
            return LaurentSeries(self.field, self.val + other.val, (), 0)
        if self.is_exact and other.is_exact:
            n = len(self.coeffs) + len(other.coeffs) - 1
            precision = None
        else:
            n = min(c.precision for c in (self, other) if c.precision is not None)
            precision = n
        coeffs = []
        for i in range(n):
            acc = k.zero()
            for j in range(i + 1):
                if j < len(self.coeffs) and i - j < len(other.coeffs):
                    acc = k.add(acc, k.mul(self.coeffs[j], other.coeffs[i - j]))
            coeffs.append(acc)
        return _normalize_laurent(self.field, self.val + other.val, coeffs, precision)

    def _neg(self):
        k = self.field.residue_field
        return LaurentSeries(self.field, self.val, tuple(k.neg(c) for c in self.coeffs), self.precision)

    def _inv(self):
        k = self.field.residue_field
        if self.is_exact_zero():
            raise DivisionByZeroError("division by zero")
        if self.is_exhausted:
            raise PrecisionExhaustedError("cannot invert a series with no known coefficients")
        if self.is_exact and len(self.coeffs) == 1:
            return LaurentSeries(self.field, -self.val, (k.inv(self.coeffs[0]),))
        n = self.precision if self.precision is not None else self.field.precision_cap
        a = list(self.coeffs) + [k.zero()] * max(0, n - len(self.coeffs))
        lead_inv = k.inv(a[0])
        b = [lead_inv]
        for i in range(1, n):
            acc = k.zero()
            for j in range(1, i + 1):
                acc = k.add(acc, k.mul(a[j], b[i - j]))
            b.append(k.neg(k.mul(lead_inv, acc)))
        return LaurentSeries(self.field, -self.val, tuple(b), n)

    def __str__(self):
        if self.is_exact_zero():
            return "0"
        terms = [f"{c}*t^{self.val + i}" for i, c in enumerate(self.coeffs) if c != 0]
        body = " + ".join(terms) if terms else "0"
        if self.precision is None:
            return body
        return f"{body} + O(t^{self.val + self.precision})"


def _laurent_absolute(x: LaurentSeries) -> Valuation:
    if x.precision is None:
        return INF
    return x.val + x.precision


def _normalize_laurent(field: LaurentField, val: int, coeffs: Sequence,
                       precision: Optional[int]) -> LaurentSeries:
    """Strip leading zeros; each one stripped from an approximate series costs a digit."""
    coeffs = list(coeffs)
    lead = 0
    while lead < len(coeffs) and coeffs[lead] == 0:
        lead += 1
    if precision is None:
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if lead == len(coeffs):
            return LaurentSeries(field)
        return LaurentSeries(field, val + lead, tuple(coeffs[lead:]))
    if lead == len(coeffs):
        return LaurentSeries(field, val + precision, (), 0)
    return LaurentSeries(field, val + lead, tuple(coeffs[lead:]), precision - lead)


FieldElementLike = Union[ExactRational, PAdicNumber, LaurentSeries]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def embed(field: ValuedField, q: Rational) -> FieldElement:
    return field.embed(q)


def valuation(x: FieldElement) -> Valuation:
    return x.valuation()


def residue(x: FieldElement) -> ResidueElement:
    k = x.field.residue_field
    if x._known_zero_residue():
        return ResidueElement(k, k.zero())
    v = x.valuation()
    if v < 0:
        raise NotInValuationRingError(f"{x} has valuation {v} < 0")
    if v > 0:
        return ResidueElement(k, k.zero())
    return x._leading_residue()


def ac(x: FieldElement) -> ResidueElement:
    """Angular component: residue of x * pi^(-v(x)), with ac(0) = 0."""
    if x.is_exact_zero():
        k = x.field.residue_field
        return ResidueElement(k, k.zero())
    v = x.valuation()
    return residue(arith(Op.MUL, x, x.field.uniformizer_power(-v)))


def _check_same_field(x: FieldElement, y: FieldElement) -> None:
    if x.field != y.field:
        raise FieldMismatchError(f"operands live in {x.field} and {y.field}")


def arith(op: Op, x: FieldElement, y: Optional[FieldElement] = None) -> FieldElement:
    if op in (Op.NEG, Op.INV):
        if y is not None:
            raise ValueError(f"{op.name} takes a single operand")
        return x._neg() if op is Op.NEG else x._inv()
    if y is None:
        raise ValueError(f"{op.name} takes two operands")
    _check_same_field(x, y)
    if op is Op.ADD:
        return x._add(y)
    if op is Op.SUB:
        return x._add(y._neg())
    return x._mul(y)


def sub(x: FieldElement, y: FieldElement) -> FieldElement:
    return arith(Op.SUB, x, y)


def restricted_div(x: FieldElement, y: FieldElement) -> FieldElement:
    """x/y when v(x) >= v(y) and y != 0, else 0."""
    _check_same_field(x, y)
    if y.is_exact_zero():
        return x.field.zero()
    if x.valuation() >= y.valuation():
        return arith(Op.MUL, x, arith(Op.INV, y))
    return x.field.zero()


def valuation_le(x: FieldElement, y: FieldElement) -> bool:
    """The divisibility relation v(x) <= v(y)."""
    _check_same_field(x, y)
    return x.valuation() <= y.valuation()
