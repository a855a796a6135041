"""Brute-force ground truth for the henselian library.

Residue classes are enumerated directly; nothing here calls the library's
arithmetic, power tables or cell logic, so agreement between the two is a
real check. Cells and formulas are only read as plain data.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from config import (
    ORACLE_DEPTH_LARGE_PRIME,
    ORACLE_DEPTH_SMALL_PRIME,
    ORACLE_EXTRA_DIGITS,
    ORACLE_MAX_VIOLATIONS,
    ORACLE_VALUATION_WINDOW,
)


def vp(q, p: int) -> Optional[int]:
    """p-adic valuation of a rational, None for zero"""
    q = Fraction(q)
    if q == 0:
        return None
    num, den, v = q.numerator, q.denominator, 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_digits(q, p: int, k: int) -> int:
    """Class mod p^k of the unit part of a nonzero rational"""
    q = Fraction(q)
    v = vp(q, p)
    u = q / Fraction(p) ** v
    m = p ** k
    return (u.numerator * pow(u.denominator, -1, m)) % m


# Largest modulus whose residue products still fit in int64
MAX_INT64_MODULUS = 3_037_000_499


@lru_cache(maxsize=None)
def oracle_nth_power_classes(p: int, n: int, k: int) -> FrozenSet[int]:
    """Classes mod p^k of u^n over all units u mod p^k"""
    m = p ** k
    if m > MAX_INT64_MODULUS:
        raise ValueError(f"modulus {p}^{k} is too large for int64 residue arithmetic")
    residues = np.arange(1, m, dtype=np.int64)
    units = residues[residues % p != 0]
    acc = np.ones_like(units)
    for _ in range(n):
        acc = (acc * units) % m
    return frozenset(int(x) for x in np.unique(acc))


def power_depth(p: int, n: int) -> int:
    depth = 1
    while n % p == 0:
        n //= p
        depth += 2
    return depth + ORACLE_EXTRA_DIGITS


def oracle_is_power(x, n: int, p: int) -> bool:
    v = vp(x, p)
    if v is None:
        return False
    if v % n:
        return False
    k = power_depth(p, n)
    return unit_digits(x, p, k) in oracle_nth_power_classes(p, n, k)


def oracle_member(cell, t) -> bool:
    """Membership of t in a cell, decided from the cell's raw fields"""
    t = Fraction(t)
    d = t - Fraction(cell.center)
    lam = Fraction(cell.lam)
    if lam == 0:
        return d == 0
    if d == 0:
        return False
    k = vp(d, cell.prime)
    if cell.hi is not None and k <= cell.hi:
        return False
    if cell.lo is not None and k >= cell.lo:
        return False
    return oracle_is_power(d / lam, cell.n, cell.prime)


def default_depth(p: int) -> int:
    return ORACLE_DEPTH_SMALL_PRIME if p <= 5 else ORACLE_DEPTH_LARGE_PRIME


@dataclass
class SampleGrid:
    """All p^v * u with v in [v_lo, v_hi] and u in [1, p^k) prime to p, plus 0 and extras."""

    p: int
    v_lo: int = ORACLE_VALUATION_WINDOW[0]
    v_hi: int = ORACLE_VALUATION_WINDOW[1]
    k: Optional[int] = None
    extra: List[Fraction] = field(default_factory=list)

    def __post_init__(self):
        if self.k is None:
            self.k = default_depth(self.p)

    def with_points(self, points: Iterable) -> "SampleGrid":
        return SampleGrid(self.p, self.v_lo, self.v_hi, self.k,
                          self.extra + [Fraction(x) for x in points])

    def __iter__(self) -> Iterator[Fraction]:
        seen = set()
        units = [u for u in range(1, self.p ** self.k) if u % self.p]
        for point in [Fraction(0)] + list(self.extra):
            if point not in seen:
                seen.add(point)
                yield point
        for v in range(self.v_lo, self.v_hi + 1):
            scale = Fraction(self.p) ** v
            for u in units:
                point = scale * u
                if point not in seen:
                    seen.add(point)
                    yield point

    def __len__(self):
        return sum(1 for _ in self)


def _shift(cell) -> int:
    """Scale s with t - center in p^s R for every member (0 for points)"""
    if Fraction(cell.lam) == 0 or cell.hi is None:
        return 0
    return cell.hi + 1


def oracle_measure(cell, k: int) -> Fraction:
    """Members among the classes t - center = p^s (x + p^k R), times p^(-s-k)

    The zero class x = 0 is counted whole when the cell reaches that deep,
    so the count is exact only for cells with both bounds at resolving depth.
    """
    if cell.hi is None and Fraction(cell.lam) != 0:
        raise ValueError("cells unbounded above have no finite oracle measure")
    p = cell.prime
    s = _shift(cell)
    center = Fraction(cell.center)
    scale = Fraction(p) ** s
    count = 0
    for x in range(1, p ** k):
        if oracle_member(cell, center + scale * x):
            count += 1
    if _reaches_depth(cell, s + k):
        count += 1
    return Fraction(count, p ** (s + k))


def _reaches_depth(cell, depth: int) -> bool:
    """Does the cell contain points with v(t - center) >= depth?"""
    if Fraction(cell.lam) == 0:
        return True
    if cell.lo is not None and cell.lo <= depth:
        return False
    return True


def resolving_depth(cell) -> int:
    """Depth from which oracle_measure of a bounded cell stops changing"""
    if Fraction(cell.lam) == 0:
        return 1
    if cell.hi is None or cell.lo is None:
        raise ValueError("only cells with both bounds have a resolving depth")
    s = _shift(cell)
    return max(1, cell.lo - s + power_depth(cell.prime, cell.n) - ORACLE_EXTRA_DIGITS - 1)


def oracle_integrate(f: Callable[[Fraction], Fraction], domain, k: int) -> Fraction:
    """Sum of f(rep) * p^(-s-k) over the nonzero depth-k classes rep in the domain"""
    if domain.hi is None and Fraction(domain.lam) != 0:
        raise ValueError("domain must be bounded above")
    p = domain.prime
    s = _shift(domain)
    center = Fraction(domain.center)
    scale = Fraction(p) ** s
    weight = Fraction(1, p ** (s + k))
    total = Fraction(0)
    for x in range(1, p ** k):
        t = center + scale * x
        if oracle_member(domain, t):
            total += f(t) * weight
    return total


def oracle_abs(f_values: Callable[[Fraction], Fraction], p: int, s: int) -> Callable[[Fraction], Fraction]:
    """t -> |f(t)|^s"""
    def value(t):
        v = vp(f_values(t), p)
        return Fraction(0) if v is None else Fraction(1, p) ** (s * v)
    return value


def oracle_partition_check(cells, grid: SampleGrid,
                           predicate: Optional[Callable[[Fraction], bool]] = None) -> Dict:
    """Every grid point must lie in exactly one cell, or, with a predicate,
    in one cell exactly when the predicate holds"""
    violations = []
    checked = 0
    for t in grid:
        checked += 1
        count = sum(1 for cell in cells if oracle_member(cell, t))
        expected = 1 if predicate is None or predicate(t) else 0
        if count != expected:
            if len(violations) < ORACLE_MAX_VIOLATIONS:
                violations.append({'point': t, 'count': count, 'expected': expected})
    return {
        'ok': not violations,
        'violations': violations,
        'points_checked': checked,
    }


def evaluate_split(poly, t) -> Fraction:
    t = Fraction(t)
    value = Fraction(poly.unit)
    for root, mult in poly.factors:
        value *= (t - Fraction(root)) ** mult
    return value


def oracle_formula_holds(phi, t, p: int) -> bool:
    """Evaluate a formula tree by node type name, with oracle arithmetic"""
    kind = type(phi).__name__
    if kind == "And":
        return oracle_formula_holds(phi.left, t, p) and oracle_formula_holds(phi.right, t, p)
    if kind == "Or":
        return oracle_formula_holds(phi.left, t, p) or oracle_formula_holds(phi.right, t, p)
    if kind == "Not":
        return not oracle_formula_holds(phi.operand, t, p)
    if kind == "EqZero":
        return evaluate_split(phi.f, t) == 0
    if kind == "PowAtom":
        return oracle_is_power(evaluate_split(phi.f, t), phi.m, p)
    if kind in ("AbsLt", "AbsLe"):
        vf = vp(evaluate_split(phi.f, t), p)
        vg = vp(evaluate_split(phi.g, t), p)
        # None is the valuation of zero, above every integer
        if kind == "AbsLt":
            if vf is None:
                return vg is not None
            return vg is not None and vf > vg
        if vf is None:
            return True
        return vg is not None and vf >= vg
    raise TypeError(f"unknown formula node {kind}")


def tail_bound(x, k: int, d: int) -> Fraction:
    """Upper bound for sum_{j > k} j^d x^j with 0 < x < 1"""
    x = Fraction(x)
    if not 0 < x < 1:
        raise ValueError(f"need 0 < x < 1, got {x}")
    first = Fraction(k + 1) ** d * x ** (k + 1)
    ratio = x * Fraction(k + 2, k + 1) ** d
    if ratio >= 1:
        raise ValueError(f"k = {k} is too small for a geometric bound at x = {x}, d = {d}")
    return first / (1 - ratio)


def truncated_level_sum(term: Callable[[int], Fraction], k_start: int, k_stop: int) -> Fraction:
    """Plain sum of term(k) for k_start <= k < k_stop"""
    return sum((term(k) for k in range(k_start, k_stop)), Fraction(0))


def count_members(cells, points: Iterable) -> List[Tuple[Fraction, int]]:
    return [(Fraction(t), sum(1 for c in cells if oracle_member(c, t))) for t in points]
