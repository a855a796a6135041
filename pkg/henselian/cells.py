"""One-variable cells {t : hi < v(t - center) < lo, t - center in lam * P_n}.

Bounds are stored as valuations. A missing ``hi`` leaves |t - center|
unbounded above, a missing ``lo`` lets t approach the center. ``lam == 0``
makes the cell the single point {center}.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import List, Optional, Tuple, Union

from .hensel_power import coset_of, coset_reps, power_index
from .valued_core import Rational, padic_valuation

logger = logging.getLogger(__name__)


class Infinite(Enum):
    INFINITE = "INFINITE"

    def __str__(self):
        return self.value


INFINITE = Infinite.INFINITE
Measure = Union[Fraction, Infinite]


@dataclass(frozen=True)
class Cell:
    center: Fraction
    prime: int
    lo: Optional[int] = None
    hi: Optional[int] = None
    lam: Fraction = Fraction(1)
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.n < 1:
            raise ValueError(f"coset modulus must be >= 1, got {self.n}")
        if self.lam == 0:
            if self.lo is not None or self.hi is not None:
                raise ValueError("a (0)-cell is a point and carries no bounds")
            object.__setattr__(self, "n", 1)

    @property
    def is_point(self) -> bool:
        return self.lam == 0

    @property
    def lam_valuation(self) -> int:
        return padic_valuation(self.lam, self.prime)

    def with_bounds(self, lo: Optional[int], hi: Optional[int]) -> "Cell":
        return Cell(self.center, self.prime, lo, hi, self.lam, self.n)

    def __str__(self):
        if self.is_point:
            return f"{{{_fmt(self.center)}}}"
        d = "t" if self.center == 0 else f"t-({_fmt(self.center)})"
        parts = []
        if self.hi is not None:
            parts.append(f"{self.hi} <")
        parts.append(f"v({d})")
        if self.lo is not None:
            parts.append(f"< {self.lo}")
        bounds = " ".join(parts) if (self.hi is not None or self.lo is not None) else f"{d} != 0"
        return f"{{t | {bounds}, {d} in {_fmt(self.lam)}*P_{self.n}}}"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def cell_sort_key(cell: Cell) -> Tuple:
    """Center, then hi (absent first), then lo (absent last), then lambda."""
    return (
        cell.center,
        cell.hi is not None,
        cell.hi if cell.hi is not None else 0,
        cell.lo is None,
        cell.lo if cell.lo is not None else 0,
        cell.lam,
        cell.n,
    )


def cell_contains(cell: Cell, t: Rational) -> bool:
    d = Fraction(t) - cell.center
    if cell.is_point:
        return d == 0
    if d == 0:
        return False
    k = padic_valuation(d, cell.prime)
    if cell.hi is not None and not k > cell.hi:
        return False
    if cell.lo is not None and not k < cell.lo:
        return False
    return coset_of(d, cell.n, cell.prime) == coset_of(cell.lam, cell.n, cell.prime)


def first_level(cell: Cell) -> Optional[int]:
    """Lowest admissible level, or the highest one for cells with no hi."""
    r = cell.lam_valuation % cell.n
    if cell.hi is not None:
        k = cell.hi + 1
        k += (r - k) % cell.n
        if cell.lo is not None and k >= cell.lo:
            return None
        return k
    if cell.lo is not None:
        k = cell.lo - 1
        return k - (k - r) % cell.n
    return cell.lam_valuation


def cell_is_empty(cell: Cell) -> bool:
    if cell.is_point:
        return False
    return first_level(cell) is None


def admissible_levels(cell: Cell, window: Tuple[int, int]) -> List[int]:
    """Valuations k in window[0]..window[1] with v(t - center) = k realised in the cell."""
    if cell.is_point:
        return []
    r = cell.lam_valuation
    return [k for k in range(window[0], window[1] + 1)
            if (k - r) % cell.n == 0
            and (cell.hi is None or k > cell.hi)
            and (cell.lo is None or k < cell.lo)]


def cell_witness(cell: Cell) -> Fraction:
    """An exact member: center + lam * p^(k - v(lam)) at the first admissible level."""
    if cell.is_point:
        return cell.center
    k = first_level(cell)
    if k is None:
        raise ValueError(f"empty cell {cell} has no witness")
    return cell.center + cell.lam * Fraction(cell.prime) ** (k - cell.lam_valuation)


def level_fraction(p: int, n: int) -> Fraction:
    """Share of the units at one level that lie in a fixed coset of P_n."""
    return Fraction(n, power_index(p, n))


def cell_measure(cell: Cell) -> Measure:
    """Haar measure with mu(R) = 1."""
    if cell.is_point or cell_is_empty(cell):
        return Fraction(0)
    if cell.hi is None:
        return INFINITE
    p, n = cell.prime, cell.n
    k0 = first_level(cell)
    ratio = Fraction(1, p ** n)
    if cell.lo is None:
        levels = Fraction(1, p) ** k0 / (1 - ratio)
    else:
        count = (cell.lo - 1 - k0) // n + 1
        levels = Fraction(1, p) ** k0 * (1 - ratio ** count) / (1 - ratio)
    return levels * (1 - Fraction(1, p)) * level_fraction(p, n)


def refine_by_coset(cell: Cell, m: int) -> List[Cell]:
    """Split into the nonempty cosets of P_lcm(n, m) inside lam * P_n."""
    if cell.is_point:
        raise ValueError("refine_by_coset needs a (1)-cell")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    target_n = lcm(cell.n, m)
    if target_n == cell.n:
        return [cell]
    p = cell.prime
    own = coset_of(cell.lam, cell.n, p)
    out = []
    for rep in coset_reps(p, target_n):
        if coset_of(rep.representative, cell.n, p) != own:
            continue
        sub = Cell(cell.center, p, cell.lo, cell.hi, rep.representative, target_n)
        if not cell_is_empty(sub):
            out.append(sub)
    logger.debug(f"refined {cell} by P_{target_n}: {len(out)} cells")
    return out
