"""Hensel lifting and the n-th power predicates P_n on Q_p.

Everything is decided on exact rationals. A unit u is an n-th power in Z_p
exactly when its class modulo p^e, e = 2*v_p(n) + 1, is the class of an n-th
power of a unit, so the coset tables below are finite and are built once per
(p, n).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Tuple

from .errors import HenselConditionError
from .valued_core import (
    INF,
    LaurentSeries,
    PAdicKind,
    PAdicNumber,
    Rational,
    ac,
    padic_valuation,
    split_unit,
    unit_residue,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Poly:
    """Polynomial with exact rational coefficients, lowest degree first."""

    coeffs: Tuple[Fraction, ...]
    prime: Optional[int] = None

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise ValueError("the zero polynomial has no leading coefficient")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: Rational) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "Poly":
        if self.degree == 0:
            raise ValueError("constant polynomial has zero derivative")
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0), self.prime)

    def with_prime(self, prime: int) -> "Poly":
        return Poly(self.coeffs, prime)

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                var = "t" if i == 1 else f"t^{i}"
                body = var if mag == 1 else f"{mag}*{var}"
            if not terms:
                terms.append(body if c > 0 else f"-{body}")
            else:
                terms.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(terms)


@dataclass(frozen=True)
class CosetRep:
    """Representative lambda of the coset lambda * P_n."""

    representative: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "representative", Fraction(self.representative))
        if self.representative == 0:
            raise ValueError("coset representative must be nonzero")


def hensel_lift(f: Poly, a: Rational, target_precision: int) -> PAdicNumber:
    """Newton iteration from a, exact until v(f(r)) >= target_precision.

    Requires v(f(a)) > 2*v(f'(a)); the result is truncated to absolute
    precision p^target_precision, although the condition v(f(r)) >= target_precision
    only pins r down mod p^(target_precision - v(f'(r))).
    """
    p = f.prime
    if p is None:
        raise ValueError("hensel_lift needs a polynomial with a prime context")
    a = Fraction(a)
    df = f.derivative()
    fa, da = f(a), df(a)
    if da == 0:
        raise HenselConditionError(f"f'({a}) = 0: Hensel condition fails")
    vf, vd = padic_valuation(fa, p), padic_valuation(da, p)
    if not vf > 2 * vd:
        raise HenselConditionError(f"v(f(a)) = {vf} is not > 2*v(f'(a)) = {2 * vd}")

    r = a
    steps = 0
    while True:
        fr = f(r)
        if fr == 0 or padic_valuation(fr, p) >= target_precision:
            break
        r = r - fr / df(r)
        steps += 1
    logger.debug(f"Hensel lift of {f} from {a} at p={p}: {steps} Newton steps")

    if r == 0:
        return PAdicNumber.zero(p)
    v, u = split_unit(r, p)
    if v >= target_precision:
        return PAdicNumber.exhausted(p, target_precision)
    rel = target_precision - v
    return PAdicNumber(p, PAdicKind.APPROX, v, unit_residue(u, p, rel), rel)


def unit_power_modulus(p: int, n: int) -> int:
    """e(n, p) = 2*v_p(n) + 1: classes mod p^e decide n-th powers of units."""
    return 2 * padic_valuation(n, p) + 1


@lru_cache(maxsize=None)
def unit_power_classes(p: int, n: int) -> FrozenSet[int]:
    """Classes mod p^e of n-th powers of units."""
    modulus = p ** unit_power_modulus(p, n)
    return frozenset(pow(u, n, modulus) for u in range(1, modulus) if u % p)


@lru_cache(maxsize=None)
def _unit_coset_table(p: int, n: int) -> Tuple[Tuple[int, ...], Dict[int, int]]:
    """Smallest representatives of U/U^n and the class -> representative map."""
    modulus = p ** unit_power_modulus(p, n)
    powers = unit_power_classes(p, n)
    reps: List[int] = []
    owner: Dict[int, int] = {}
    for u in range(1, modulus):
        if u % p == 0 or u in owner:
            continue
        reps.append(u)
        for w in powers:
            owner[(u * w) % modulus] = u
    logger.debug(f"unit cosets of P_{n} at p={p}: {len(reps)} classes mod {modulus}")
    return tuple(reps), owner


def unit_coset_reps(p: int, n: int) -> Tuple[int, ...]:
    return _unit_coset_table(p, n)[0]


def is_nth_power(x: Rational, n: int, p: int) -> bool:
    x = Fraction(x)
    if x == 0:
        raise ValueError("P_n lives in K^x: zero is never tested")
    if n == 1:
        return True
    v, u = split_unit(x, p)
    if v % n:
        return False
    e = unit_power_modulus(p, n)
    return unit_residue(u, p, e) in unit_power_classes(p, n)


def coset_reps(p: int, n: int) -> List[CosetRep]:
    """Representatives u * p^j of Q_p^x / P_n, j outer, units ascending."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    units = unit_coset_reps(p, n)
    return [CosetRep(Fraction(u * p ** j), n) for j in range(n) for u in units]


def power_index(p: int, n: int) -> int:
    """[Q_p^x : P_n], the length of coset_reps(p, n)."""
    return n * len(unit_coset_reps(p, n))


def coset_of(x: Rational, n: int, p: int) -> CosetRep:
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero lies in no coset of P_n")
    v, u = split_unit(x, p)
    e = unit_power_modulus(p, n)
    _, owner = _unit_coset_table(p, n)
    rep = owner[unit_residue(u, p, e)]
    return CosetRep(Fraction(rep * p ** (v % n)), n)


def same_coset(x: Rational, y: Rational, n: int, p: int) -> bool:
    return coset_of(x, n, p) == coset_of(y, n, p)


# k((t)) with k = F_p and p not dividing n: the tame case, where a unit is an
# n-th power exactly when its leading coefficient is one in F_p.

def _check_tame(x: LaurentSeries, n: int) -> int:
    p = x.field.coefficient_prime
    if p is None:
        raise ValueError("P_n over Q((t)) has infinite index and is not decided")
    if n % p == 0:
        raise ValueError(f"wild case p | n (p={p}, n={n}) is not decided over F_p((t))")
    return p


def laurent_is_nth_power(x: LaurentSeries, n: int) -> bool:
    p = _check_tame(x, n)
    v = x.valuation()
    if v is INF:
        raise ValueError("P_n lives in K^x: zero is never tested")
    if v % n:
        return False
    lead = ac(x).value
    return any(pow(w, n, p) == lead for w in range(1, p))


def laurent_power_index(p: int, n: int) -> int:
    """[F_p((t))^x : P_n] = n * gcd(n, p - 1) when p does not divide n."""
    if n % p == 0:
        raise ValueError(f"wild case p | n (p={p}, n={n})")
    return n * gcd(n, p - 1)
