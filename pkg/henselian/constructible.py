"""Constructible functions in one variable and their integrals.

A function is a finite sum of pieces q * v(t - center)^d * p^(-e * v(t - center)),
each living on a cell; distinct cells in one function are disjoint. On a
(0)-cell a piece is just the constant q.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, lcm
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import sympy as sp

from config import MAX_LOG_POWER
from .cells import (
    INFINITE,
    Cell,
    first_level,
    cell_contains,
    cell_measure,
    cell_sort_key,
    cell_witness,
    level_fraction,
)
from .errors import InfiniteMeasureError, UnsupportedLogPowerError, ValuationOfZeroError
from .prepare import (
    LevelComparison,
    PolyLike,
    PreparedCell,
    SplitPoly,
    as_split,
    level_affine,
    prepare,
    split_at_thresholds,
)
from .rational_function import T, RationalFunctionT
from .valued_core import Rational, padic_valuation

logger = logging.getLogger(__name__)


class NonIntegrable(Enum):
    NON_INTEGRABLE = "NON_INTEGRABLE"

    def __str__(self):
        return self.value


NON_INTEGRABLE = NonIntegrable.NON_INTEGRABLE
Integral = Union[Fraction, NonIntegrable]


class Mode(Enum):
    V = "v"
    ABS = "abs"


class AlgebraOp(Enum):
    ADD = "add"
    MUL = "mul"
    SCALE = "scale"


@dataclass(frozen=True)
class Piece:
    cell: Cell
    q: Fraction
    d: int = 0
    e: int = 0

    def sort_key(self):
        return cell_sort_key(self.cell) + (self.d, self.e)


@dataclass(frozen=True)
class ConstructibleFunction:
    prime: int
    pieces: Tuple[Piece, ...] = ()

    @classmethod
    def build(cls, prime: int, pieces: Iterable[Piece]) -> "ConstructibleFunction":
        """Normal form: like terms combined, zero terms dropped, pieces sorted."""
        totals: Dict[Tuple[Cell, int, int], Fraction] = {}
        for piece in pieces:
            if piece.cell.prime != prime:
                raise ValueError(f"piece over p={piece.cell.prime} in a function over p={prime}")
            d, e = (0, 0) if piece.cell.is_point else (piece.d, piece.e)
            key = (piece.cell, d, e)
            totals[key] = totals.get(key, Fraction(0)) + Fraction(piece.q)
        kept = [Piece(cell, q, d, e) for (cell, d, e), q in totals.items() if q != 0]
        return cls(prime, tuple(sorted(kept, key=Piece.sort_key)))

    def cells(self) -> List[Cell]:
        seen = []
        for piece in self.pieces:
            if piece.cell not in seen:
                seen.append(piece.cell)
        return seen

    def is_zero(self) -> bool:
        return not self.pieces

    def __add__(self, other):
        return algebra(AlgebraOp.ADD, self, other)

    def __mul__(self, other):
        if isinstance(other, ConstructibleFunction):
            return algebra(AlgebraOp.MUL, self, other)
        return algebra(AlgebraOp.SCALE, self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return algebra(AlgebraOp.SCALE, self, -1)


def indicator(cell: Cell) -> ConstructibleFunction:
    return ConstructibleFunction.build(cell.prime, [Piece(cell, Fraction(1))])


def from_prepared(f: PolyLike, cells: Sequence[PreparedCell], mode: Mode,
                  index: int = 0) -> ConstructibleFunction:
    """v(f) or |f| read off a preparation of f (the ``index``-th prepared function)."""
    f = as_split(f)
    if not cells:
        raise ValueError("from_prepared needs at least one prepared cell")
    p = cells[0].cell.prime
    pieces = []
    for pc in cells:
        if pc.cell.is_point and pc.data[index].h != f(pc.cell.center):
            raise ValueError(f"prepared data on {pc.cell} does not belong to {f}")
        alpha, b = level_affine(pc, index)
        if pc.cell.is_point:
            if pc.data[index].h == 0:
                if mode is Mode.V:
                    raise ValuationOfZeroError(f"{f} vanishes at {pc.cell.center}")
                continue
            value = Fraction(alpha) if mode is Mode.V else Fraction(1, p) ** alpha
            pieces.append(Piece(pc.cell, value))
            continue
        if mode is Mode.V:
            pieces.append(Piece(pc.cell, Fraction(alpha), 0, 0))
            pieces.append(Piece(pc.cell, Fraction(b), 1, 0))
        else:
            pieces.append(Piece(pc.cell, Fraction(1, p) ** int(alpha), 0, int(b)))
    return ConstructibleFunction.build(p, pieces)


def _level(cell: Cell, t: Fraction) -> int:
    return padic_valuation(t - cell.center, cell.prime)


def evaluate(f: ConstructibleFunction, t: Rational) -> Fraction:
    t = Fraction(t)
    total = Fraction(0)
    for piece in f.pieces:
        if not cell_contains(piece.cell, t):
            continue
        if piece.cell.is_point:
            total += piece.q
            continue
        k = _level(piece.cell, t)
        total += piece.q * Fraction(k) ** piece.d * Fraction(1, f.prime) ** (piece.e * k)
    return total


def common_refinement(cells: Sequence[Cell]) -> List[PreparedCell]:
    """Disjoint cells, each inside or disjoint from every input cell.

    The centers' linear polynomials t - gamma_i are prepared at the lcm of
    the input moduli and split where v(t - gamma_i) crosses an input bound,
    so data index i carries v(t - gamma_i) on every output cell.
    """
    if not cells:
        return []
    p = cells[0].prime
    centers = sorted({c.center for c in cells})
    modulus = lcm(*(c.n for c in cells))
    polys = [SplitPoly(1, ((gamma, 1),)) for gamma in centers]
    prepared = prepare(polys, p, modulus)
    comparisons = []
    for c in cells:
        j = centers.index(c.center)
        for bound in (c.lo, c.hi):
            if bound is not None:
                comparisons.append(LevelComparison(j, None, bound))
    refined = split_at_thresholds(prepared, comparisons)
    logger.debug(f"common refinement of {len(cells)} cells: {len(refined)} pieces")
    return refined


def _transport(piece: Piece, target: PreparedCell, centers: List[Fraction]) -> List[Piece]:
    """Rewrite a piece on its cell as pieces in v(t - target center)."""
    j = centers.index(piece.cell.center)
    alpha, b = level_affine(target, j)
    p = target.cell.prime
    if piece.cell.is_point or target.cell.is_point:
        if target.cell.is_point and not piece.cell.is_point:
            k = alpha
            return [Piece(target.cell, piece.q * Fraction(k) ** piece.d * Fraction(1, p) ** (piece.e * k))]
        return [Piece(target.cell, piece.q)]
    alpha, b = int(alpha), int(b)
    scale = piece.q * Fraction(1, p) ** (piece.e * alpha)
    out = []
    for i in range(piece.d + 1):
        if b == 0 and i > 0:
            break
        coeff = scale * comb(piece.d, i) * Fraction(alpha) ** (piece.d - i) * b ** i
        out.append(Piece(target.cell, coeff, i, piece.e * b))
    return out


def _restrict(f: ConstructibleFunction, family: List[PreparedCell],
              centers: List[Fraction]) -> Dict[Cell, List[Piece]]:
    out: Dict[Cell, List[Piece]] = {}
    for pc in family:
        witness = cell_witness(pc.cell)
        for piece in f.pieces:
            if cell_contains(piece.cell, witness):
                out.setdefault(pc.cell, []).extend(_transport(piece, pc, centers))
    return out


def algebra(op: AlgebraOp, f: ConstructibleFunction,
            g: Union[ConstructibleFunction, Rational]) -> ConstructibleFunction:
    p = f.prime
    if op is AlgebraOp.SCALE:
        if isinstance(g, ConstructibleFunction):
            raise TypeError("SCALE takes a rational factor")
        return ConstructibleFunction.build(p, [Piece(x.cell, x.q * Fraction(g), x.d, x.e) for x in f.pieces])
    if not isinstance(g, ConstructibleFunction):
        raise TypeError(f"{op.name} takes two constructible functions")
    if g.prime != p:
        raise ValueError(f"primes differ: {p} and {g.prime}")
    if f.is_zero() or g.is_zero():
        if op is AlgebraOp.MUL:
            return ConstructibleFunction.build(p, [])
        return g if f.is_zero() else f

    if set(f.cells()) == set(g.cells()):
        by_cell_f = _group(f.pieces)
        by_cell_g = _group(g.pieces)
    else:
        cells = f.cells() + g.cells()
        if not cells:
            return ConstructibleFunction.build(p, [])
        centers = sorted({c.center for c in cells})
        family = common_refinement(cells)
        by_cell_f = _restrict(f, family, centers)
        by_cell_g = _restrict(g, family, centers)

    pieces = []
    if op is AlgebraOp.ADD:
        for group in list(by_cell_f.values()) + list(by_cell_g.values()):
            pieces.extend(group)
    else:
        for cell, left in by_cell_f.items():
            for a in left:
                for b in by_cell_g.get(cell, []):
                    pieces.append(Piece(cell, a.q * b.q, a.d + b.d, a.e + b.e))
    return ConstructibleFunction.build(p, pieces)


def _group(pieces: Sequence[Piece]) -> Dict[Cell, List[Piece]]:
    out: Dict[Cell, List[Piece]] = {}
    for piece in pieces:
        out.setdefault(piece.cell, []).append(piece)
    return out


def power(f: ConstructibleFunction, s: int) -> ConstructibleFunction:
    """f^s; negative s needs a single d = 0 piece per cell."""
    if s < 0:
        groups = _group(f.pieces)
        pieces = []
        for cell, group in groups.items():
            if len(group) != 1 or group[0].d != 0:
                raise ValueError(f"cannot invert a non-monomial function on {cell}")
            pieces.append(Piece(cell, group[0].q ** s, 0, group[0].e * s))
        return ConstructibleFunction.build(f.prime, pieces)
    result = ConstructibleFunction.build(f.prime, [Piece(c, Fraction(1)) for c in f.cells()])
    for _ in range(s):
        result = algebra(AlgebraOp.MUL, result, f)
    return result


# Closed forms for sum_{j >= 0} j^i y^j = y * A_i(y) / (1 - y)^(i + 1), where A_i
# is the Eulerian polynomial.

def _eulerian(i: int, m: int) -> int:
    return sum((-1) ** l * comb(i + 1, l) * (m + 1 - l) ** i for l in range(m + 1))


def _power_series_sum(i: int, y: Fraction) -> Fraction:
    """sum_{j >= 0} j^i y^j for |y| < 1."""
    if i == 0:
        return 1 / (1 - y)
    top = sum(_eulerian(i, m) * y ** (m + 1) for m in range(i))
    return top / (1 - y) ** (i + 1)


def _progression_sum(start: int, step: int, d: int, x: Fraction) -> Fraction:
    """sum_{j >= 0} (start + step*j)^d x^(start + step*j), assumed convergent."""
    y = x ** step
    total = Fraction(0)
    for i in range(d + 1):
        total += comb(d, i) * Fraction(start) ** (d - i) * Fraction(step) ** i * _power_series_sum(i, y)
    return x ** start * total


def _integrate_piece(piece: Piece, p: int) -> Integral:
    cell = piece.cell
    if cell.is_point:
        return Fraction(0)
    if piece.d > MAX_LOG_POWER:
        raise UnsupportedLogPowerError(f"v(t)^{piece.d} exceeds the supported power {MAX_LOG_POWER}")
    k0 = first_level(cell)
    if k0 is None:
        return Fraction(0)
    n = cell.n
    x = Fraction(1, p) ** (piece.e + 1)
    weight = piece.q * (1 - Fraction(1, p)) * level_fraction(p, n)
    if cell.hi is not None and cell.lo is not None:
        levels = range(k0, cell.lo, n)
        return weight * sum(Fraction(k) ** piece.d * x ** k for k in levels)
    if cell.hi is not None:
        if x >= 1:
            return NON_INTEGRABLE
        return weight * _progression_sum(k0, n, piece.d, x)
    if cell.lo is not None:
        if x <= 1:
            return NON_INTEGRABLE
        return weight * _progression_sum(k0, -n, piece.d, x)
    return NON_INTEGRABLE


def integrate(f: ConstructibleFunction) -> Integral:
    """Integral over K against Haar measure with mu(R) = 1."""
    total = Fraction(0)
    for piece in f.pieces:
        value = _integrate_piece(piece, f.prime)
        if value is NON_INTEGRABLE:
            logger.debug(f"piece on {piece.cell} (d={piece.d}, e={piece.e}) diverges")
            return NON_INTEGRABLE
        total += value
    return total


def _domain_cells(f: SplitPoly, p: int, domain: Cell) -> List[Tuple[PreparedCell, Cell]]:
    """Prepared (1)-cells of f inside the domain."""
    centre_poly = SplitPoly(1, ((domain.center, 1),))
    prepared = prepare([f, centre_poly], p, domain.n)
    comparisons = [LevelComparison(1, None, b) for b in (domain.lo, domain.hi) if b is not None]
    kept = []
    for pc in split_at_thresholds(prepared, comparisons):
        if not pc.cell.is_point and cell_contains(domain, cell_witness(pc.cell)):
            kept.append(pc)
    return kept


def igusa_zeta(f: PolyLike, p: int, domain: Cell) -> RationalFunctionT:
    """Z(T) with Z(p^(-s)) = integral over the domain of |f(t)|^s |dt|."""
    f = as_split(f)
    if domain.is_point:
        return RationalFunctionT.from_expr(sp.Integer(0))
    if cell_measure(domain) is INFINITE:
        raise InfiniteMeasureError(f"domain {domain} has infinite measure")
    expr = sp.Integer(0)
    cells = _domain_cells(f, p, domain)
    for pc in cells:
        cell = pc.cell
        if cell.hi is None:
            raise InfiniteMeasureError(f"prepared cell {cell} is unbounded")
        alpha, b = level_affine(pc, 0)
        alpha, b = int(alpha), int(b)
        k0 = first_level(cell)
        if k0 is None:
            continue
        n = cell.n
        frac = level_fraction(p, n) * (1 - Fraction(1, p))
        weight = sp.Rational(frac.numerator, frac.denominator)
        ratio = sp.Rational(1, p ** n) * T ** (b * n)
        first = sp.Rational(1, p) ** k0 * T ** (alpha + b * k0)
        if cell.lo is None:
            series = first / (1 - ratio)
        else:
            count = (cell.lo - 1 - k0) // n + 1
            series = first * (1 - ratio ** count) / (1 - ratio)
        expr += weight * series
    logger.debug(f"zeta of {f} at p={p} over {domain}: {len(cells)} cells")
    return RationalFunctionT.from_expr(expr)


def absolute_power(f: PolyLike, p: int, s: int) -> ConstructibleFunction:
    """|f|^s as a constructible function (s may be negative)."""
    f = as_split(f)
    prepared = prepare([f], p)
    base = from_prepared(f, prepared, Mode.ABS)
    return power(base, s)


def integrand(f: PolyLike, p: int, domain: Cell, mode: Mode = Mode.ABS,
              s: int = 1) -> ConstructibleFunction:
    """1_domain * |f|^s (mode ABS) or 1_domain * v(f)^s (mode V, s >= 0).

    In mode V the roots of f are left out; they are points of measure zero.
    """
    f = as_split(f)
    prepared = prepare([f], p)
    if mode is Mode.V:
        if s < 0:
            raise ValueError("v(f)^s needs s >= 0")
        prepared = [pc for pc in prepared if not (pc.cell.is_point and pc.data[0].h == 0)]
    base = from_prepared(f, prepared, mode)
    if s != 1:
        base = power(base, s)
    return algebra(AlgebraOp.MUL, indicator(domain), base)
