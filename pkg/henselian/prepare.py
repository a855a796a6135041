"""Cell decomposition with preparation for polynomials split over Q.

The decomposition is built "swiss cheese" style. Around a center gamma the
levels v(t - gamma) = k fall into two kinds:

* refined levels, within e of the distance d_c = v(c - gamma) to some other
  root c. Each is cut into single-level cells by cosets of P_N, with
  N = lcm(M, N_e) and U^(N_e) contained in 1 + p^e R. On such a cell every
  factor t - c is constant up to 1 + p^e R, so f is too.
* every other level, grouped into maximal intervals. There each factor is
  either (t - gamma)(1 + small) or (gamma - c)(1 + small), so f is a monomial
  in t - gamma up to 1 + p^e R.

Residue classes at a refined level that contain further roots are open discs;
they are carved out and decomposed recursively around their smallest root.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy

from .cells import Cell, cell_contains, cell_is_empty, cell_sort_key, cell_witness
from .errors import UnsupportedPolynomialError
from .hensel_power import Poly, coset_reps, is_nth_power, unit_coset_reps, unit_power_modulus
from .valued_core import INF, Rational, Valuation, padic_valuation, split_unit

if TYPE_CHECKING:
    from .formula import QFFormula

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitPoly:
    """unit * prod (t - root)^mult, roots distinct and kept in ascending order."""

    unit: Fraction
    factors: Tuple[Tuple[Fraction, int], ...] = ()

    def __post_init__(self):
        unit = Fraction(self.unit)
        if unit == 0:
            raise ValueError("a split polynomial needs a nonzero unit")
        factors = tuple(sorted((Fraction(r), int(m)) for r, m in self.factors))
        roots = [r for r, _ in factors]
        if len(set(roots)) != len(roots):
            raise ValueError(f"repeated root in {factors}")
        if any(m < 1 for _, m in factors):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "factors", factors)

    @classmethod
    def from_factors(cls, unit: Rational, factors: Iterable[Tuple[Rational, int]]) -> "SplitPoly":
        """Like the constructor, but repeated roots are merged."""
        merged: Dict[Fraction, int] = {}
        for root, mult in factors:
            merged[Fraction(root)] = merged.get(Fraction(root), 0) + mult
        return cls(Fraction(unit), tuple(merged.items()))

    @classmethod
    def from_poly(cls, poly: Poly) -> "SplitPoly":
        """Factor over Q with sympy; irreducible factors of degree > 1 are rejected."""
        t = sympy.Symbol("t")
        expr = sum(sympy.Rational(c.numerator, c.denominator) * t ** i for i, c in enumerate(poly.coeffs))
        coeff, parts = sympy.factor_list(expr, t, domain="QQ")
        unit = Fraction(int(sympy.fraction(coeff)[0]), int(sympy.fraction(coeff)[1]))
        factors = []
        for factor, mult in parts:
            lin = sympy.Poly(factor, t)
            if lin.degree() != 1:
                raise UnsupportedPolynomialError(f"{factor} does not split over Q")
            a, b = (Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in lin.all_coeffs())
            unit *= a ** mult
            factors.append((-b / a, int(mult)))
        return cls.from_factors(unit, factors)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.factors)

    def roots(self) -> List[Fraction]:
        return [r for r, _ in self.factors]

    def multiplicity(self, root: Rational) -> int:
        return dict(self.factors).get(Fraction(root), 0)

    def __call__(self, t: Rational) -> Fraction:
        acc = self.unit
        for root, mult in self.factors:
            acc *= (Fraction(t) - root) ** mult
        return acc

    def to_poly(self, prime: Optional[int] = None) -> Poly:
        coeffs = [self.unit]
        for root, mult in self.factors:
            for _ in range(mult):
                shifted = [Fraction(0)] + coeffs
                coeffs = [s - root * c for s, c in zip(shifted, coeffs + [Fraction(0)])]
        return Poly(tuple(coeffs), prime)

    def __str__(self):
        parts = []
        for root, mult in self.factors:
            if root == 0:
                base = "t"
            elif root > 0:
                base = f"(t-{_fmt(root)})"
            else:
                base = f"(t+{_fmt(-root)})"
            parts.append(base if mult == 1 else f"{base}^{mult}")
        if not parts:
            return _fmt(self.unit)
        if self.unit == 1:
            return "*".join(parts)
        return "*".join([_fmt(self.unit)] + parts)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


PolyLike = Union[SplitPoly, Poly]


def as_split(f: PolyLike) -> SplitPoly:
    if isinstance(f, SplitPoly):
        return f
    return SplitPoly.from_poly(f)


@dataclass(frozen=True)
class PreparedFunction:
    """On the cell, f(t) lies in unit * (1 + p^e R) * h * ((t - center)/lam)^(a/n).

    a is a multiple of n throughout, so v(f(t)) = v(h) + a*(v(t - center) - v(lam))/n.
    """

    h: Fraction
    a: int
    unit: Fraction = Fraction(1)


@dataclass(frozen=True)
class PreparedCell:
    cell: Cell
    data: Tuple[PreparedFunction, ...]
    certificate_modulus: int

    @property
    def n(self) -> int:
        return self.cell.n

    @property
    def lam(self) -> Fraction:
        return self.cell.lam

    def with_cell(self, cell: Cell) -> "PreparedCell":
        return PreparedCell(cell, self.data, self.certificate_modulus)


def level_modulus(p: int, e: int) -> int:
    """Least N_e with every N_e-th power of a unit in 1 + p^e R."""
    if p != 2:
        return (p - 1) * p ** (e - 1)
    if e == 1:
        return 1
    return max(2, 2 ** (e - 2))


class _Preparer:
    def __init__(self, fs: Sequence[SplitPoly], p: int, modulus: int):
        self.fs = list(fs)
        self.p = p
        self.modulus = modulus
        self.e = unit_power_modulus(p, modulus)
        self.level_n = lcm(modulus, level_modulus(p, self.e))
        self.roots = sorted({r for f in self.fs for r in f.roots()})
        self.cells: List[PreparedCell] = []

    def run(self) -> List[PreparedCell]:
        self.region(self.roots[0] if self.roots else Fraction(0), None)
        return sorted(self.cells, key=lambda pc: cell_sort_key(pc.cell))

    def emit(self, cell: Cell, data: List[PreparedFunction]):
        self.cells.append(PreparedCell(cell, tuple(data), self.e))

    def region(self, center: Fraction, lower: Optional[int]):
        """Decompose the disc v(t - center) >= lower (all of K when lower is None)."""
        p = self.p
        self.emit(Cell(center, p, lam=0), [PreparedFunction(f(center), 0) for f in self.fs])

        distance = {c: padic_valuation(c - center, p) for c in self.roots if c != center}
        refined = sorted({k for d in distance.values() for k in range(d - self.e + 1, d + self.e)
                          if lower is None or k >= lower})
        discs: Dict[Tuple[int, int], List[Fraction]] = {}
        for c, d in distance.items():
            if lower is None or d >= lower:
                _, u = split_unit(c - center, p)
                discs.setdefault((d, (u.numerator * pow(u.denominator, -1, p)) % p), []).append(c)
        logger.debug(f"region around {center} (lower={lower}): "
                     f"{len(refined)} refined levels, {len(discs)} inner discs")

        for k in refined:
            excluded = {ac for (d, ac) in discs if d == k}
            self.level_cells(center, k, excluded)
        for first, last in _gaps(refined, lower):
            self.interval_cells(center, first, last, distance)
        for (d, _), members in sorted(discs.items()):
            self.region(min(members), d + 1)

    def level_cells(self, center: Fraction, k: int, excluded: set):
        p, n = self.p, self.level_n
        j = k % n
        for u in unit_coset_reps(p, n):
            if u % p in excluded:
                continue
            cell = Cell(center, p, lo=k + 1, hi=k - 1, lam=Fraction(u * p ** j), n=n)
            sample = center + u * Fraction(p) ** k
            self.emit(cell, [PreparedFunction(f(sample), 0) for f in self.fs])

    def interval_cells(self, center: Fraction, first: Optional[int], last: Optional[int],
                       distance: Dict[Fraction, int]):
        p, n = self.p, self.modulus
        above = {c for c, d in distance.items() if last is not None and d > last}
        monomials = []
        for f in self.fs:
            b = f.multiplicity(center) + sum(m for r, m in f.factors if r in above)
            h = f.unit
            for r, m in f.factors:
                if r != center and r not in above:
                    h *= (center - r) ** m
            monomials.append((b, h))
        hi = None if first is None else first - 1
        lo = None if last is None else last + 1
        for rep in coset_reps(p, n):
            cell = Cell(center, p, lo=lo, hi=hi, lam=rep.representative, n=n)
            if cell_is_empty(cell):
                continue
            self.emit(cell, [PreparedFunction(h * rep.representative ** b, n * b) for b, h in monomials])


def _gaps(refined: List[int], lower: Optional[int]) -> List[Tuple[Optional[int], Optional[int]]]:
    """Maximal runs of levels >= lower that avoid ``refined``; None marks an open end."""
    gaps = []
    start = lower
    for k in refined:
        if start is None or k > start:
            gaps.append((start, k - 1))
        start = k + 1
    gaps.append((start, None))
    return gaps


def prepare(fs: Sequence[PolyLike], p: int, coset_modulus: int = 1) -> List[PreparedCell]:
    """Partition K into cells on which every f_j is prepared."""
    if not fs:
        raise ValueError("prepare needs at least one polynomial")
    if coset_modulus < 1:
        raise ValueError(f"coset modulus must be >= 1, got {coset_modulus}")
    split = [as_split(f) for f in fs]
    cells = _Preparer(split, p, coset_modulus).run()
    logger.debug(f"prepared {len(split)} functions at p={p}, M={coset_modulus}: {len(cells)} cells")
    return cells


def level_affine(pc: PreparedCell, j: int) -> Tuple[Valuation, Fraction]:
    """(alpha, b) with v(f_j(t)) = alpha + b * v(t - center) on the cell."""
    item = pc.data[j]
    v_h = padic_valuation(item.h, pc.cell.prime)
    if pc.cell.is_point:
        return v_h, Fraction(0)
    b = Fraction(item.a, pc.n)
    return v_h - b * pc.cell.lam_valuation, b


@dataclass(frozen=True)
class LevelComparison:
    """v(f_left) against v(f_right) + shift; right None compares with the constant shift."""

    left: int
    right: Optional[int] = None
    shift: int = 0


def _boundaries(pc: PreparedCell, comparisons: Sequence[LevelComparison]) -> List[int]:
    """Levels B such that the cut between B and B + 1 is needed."""
    cuts = set()
    for comp in comparisons:
        a_l, b_l = level_affine(pc, comp.left)
        if comp.right is None:
            a_r, b_r = Fraction(comp.shift), Fraction(0)
        else:
            a_r, b_r = level_affine(pc, comp.right)
            a_r += comp.shift
        if b_l == b_r:
            continue
        crossing = (a_r - a_l) / (b_l - b_r)
        if crossing.denominator == 1:
            cuts.update({int(crossing) - 1, int(crossing)})
        else:
            cuts.add(crossing.numerator // crossing.denominator)
    return sorted(cuts)


def split_at_thresholds(cells: Sequence[PreparedCell],
                        comparisons: Sequence[LevelComparison]) -> List[PreparedCell]:
    """Refine prepared cells so each comparison has a constant outcome on each."""
    out = []
    for pc in cells:
        cell = pc.cell
        if cell.is_point:
            out.append(pc)
            continue
        edges = [b for b in _boundaries(pc, comparisons)
                 if (cell.hi is None or b > cell.hi) and (cell.lo is None or b + 1 < cell.lo)]
        if not edges:
            out.append(pc)
            continue
        hi = cell.hi
        for b in edges + [None]:
            lo = cell.lo if b is None else b + 1
            piece = cell.with_bounds(lo, hi)
            if not cell_is_empty(piece):
                out.append(pc.with_cell(piece))
            hi = b
    return sorted(out, key=lambda c: cell_sort_key(c.cell))


def level_valuation(pc: PreparedCell, j: int) -> Valuation:
    """v(f_j(t)) on a cell where it is constant, taken at the witness level."""
    alpha, b = level_affine(pc, j)
    if pc.cell.is_point or b == 0:
        return alpha
    k = padic_valuation(cell_witness(pc.cell) - pc.cell.center, pc.cell.prime)
    return alpha + b * k


def atom_holds(atom, pc: PreparedCell, index: Dict[SplitPoly, int]) -> bool:
    """Truth of one atom on a prepared cell split at the atom's thresholds."""
    from .formula import AbsLe, AbsLt, EqZero, PowAtom

    p = pc.cell.prime
    if isinstance(atom, (AbsLt, AbsLe)):
        vf = _constant_valuation(pc, index[atom.f])
        vg = _constant_valuation(pc, index[atom.g])
        return vf > vg if isinstance(atom, AbsLt) else vf >= vg
    if isinstance(atom, PowAtom):
        item = pc.data[index[atom.f]]
        value = item.h * item.unit
        return value != 0 and is_nth_power(value, atom.m, p)
    if isinstance(atom, EqZero):
        return pc.cell.is_point and pc.data[index[atom.f]].h == 0
    raise TypeError(f"not an atom: {atom!r}")


def _constant_valuation(pc: PreparedCell, j: int) -> Valuation:
    if pc.cell.is_point:
        return padic_valuation(pc.data[j].h, pc.cell.prime)
    return level_valuation(pc, j)


def _merge_adjacent(cells: List[Cell]) -> List[Cell]:
    """Join cells of one center and coset whose level ranges meet."""
    groups: Dict[Tuple, List[Cell]] = {}
    points = []
    for cell in cells:
        if cell.is_point:
            points.append(cell)
        else:
            groups.setdefault((cell.center, cell.lam, cell.n), []).append(cell)
    merged = list(points)
    for group in groups.values():
        group.sort(key=lambda c: (c.hi is not None, c.hi if c.hi is not None else 0))
        current = group[0]
        for nxt in group[1:]:
            touching = (current.lo is not None and nxt.hi is not None
                        and cell_is_empty(current.with_bounds(nxt.hi + 1, current.lo - 1)))
            if touching:
                current = current.with_bounds(nxt.lo, current.hi)
            else:
                merged.append(current)
                current = nxt
        merged.append(current)
    return merged


def decompose(phi: "QFFormula", p: int) -> List[Cell]:
    """Cells whose disjoint union is {t in Q_p : phi(t)}."""
    polys = phi.polynomials()
    moduli = phi.pow_moduli()
    modulus = lcm(*moduli) if moduli else 1
    prepared = prepare(polys, p, modulus)
    index = {f: j for j, f in enumerate(polys)}
    comparisons = [LevelComparison(index[a.f], index[a.g]) for a in phi.comparisons()]
    pieces = split_at_thresholds(prepared, comparisons)
    chosen = [pc.cell for pc in pieces if phi.decide(lambda atom: atom_holds(atom, pc, index))]
    result = sorted(_merge_adjacent(chosen), key=cell_sort_key)
    logger.debug(f"decomposed {phi.render()} at p={p}: {len(pieces)} pieces, {len(result)} cells")
    return result


def cells_contain(cells: Iterable[Cell], t: Rational) -> int:
    """How many of the cells contain t."""
    return sum(1 for cell in cells if cell_contains(cell, t))
