"""Quantifier-free formulas in one variable t over the Macintyre language.

Atoms compare absolute values of split polynomials, test membership in P_m,
or test vanishing; connectives are &, | and !.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List

from .hensel_power import is_nth_power
from .prepare import SplitPoly
from .valued_core import Rational, padic_valuation


class QFFormula:
    """Base class for formula nodes."""

    def atoms(self) -> List["QFFormula"]:
        raise NotImplementedError

    def decide(self, atom_truth: Callable[["QFFormula"], bool]) -> bool:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def polynomials(self) -> List[SplitPoly]:
        """Distinct polynomials in order of first appearance."""
        seen: List[SplitPoly] = []
        for atom in self.atoms():
            for f in atom.operands():
                if f not in seen:
                    seen.append(f)
        return seen

    def pow_moduli(self) -> List[int]:
        return sorted({a.m for a in self.atoms() if isinstance(a, PowAtom)})

    def comparisons(self) -> List["QFFormula"]:
        return [a for a in self.atoms() if isinstance(a, (AbsLt, AbsLe))]

    def evaluate(self, t: Rational, p: int) -> bool:
        """Direct evaluation at an exact rational point."""
        t = Fraction(t)
        return self.decide(lambda atom: atom.holds_at(t, p))

    def __str__(self):
        return self.render()


class _Atom(QFFormula):
    def atoms(self):
        return [self]

    def decide(self, atom_truth):
        return atom_truth(self)

    def operands(self) -> List[SplitPoly]:
        raise NotImplementedError

    def holds_at(self, t: Fraction, p: int) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class AbsLt(_Atom):
    """|f(t)| < |g(t)|"""

    f: SplitPoly
    g: SplitPoly

    def operands(self):
        return [self.f, self.g]

    def holds_at(self, t, p):
        return padic_valuation(self.f(t), p) > padic_valuation(self.g(t), p)

    def render(self):
        return f"abs({self.f}) < abs({self.g})"


@dataclass(frozen=True)
class AbsLe(_Atom):
    """|f(t)| <= |g(t)|"""

    f: SplitPoly
    g: SplitPoly

    def operands(self):
        return [self.f, self.g]

    def holds_at(self, t, p):
        return padic_valuation(self.f(t), p) >= padic_valuation(self.g(t), p)

    def render(self):
        return f"abs({self.f}) <= abs({self.g})"


@dataclass(frozen=True)
class PowAtom(_Atom):
    """f(t) in P_m"""

    m: int
    f: SplitPoly

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"pow needs m >= 1, got {self.m}")

    def operands(self):
        return [self.f]

    def holds_at(self, t, p):
        value = self.f(t)
        return value != 0 and is_nth_power(value, self.m, p)

    def render(self):
        return f"pow({self.m}, {self.f})"


@dataclass(frozen=True)
class EqZero(_Atom):
    f: SplitPoly

    def operands(self):
        return [self.f]

    def holds_at(self, t, p):
        return self.f(t) == 0

    def render(self):
        return f"{self.f} = 0"


@dataclass(frozen=True)
class And(QFFormula):
    left: QFFormula
    right: QFFormula

    def atoms(self):
        return self.left.atoms() + self.right.atoms()

    def decide(self, atom_truth):
        return self.left.decide(atom_truth) and self.right.decide(atom_truth)

    def render(self):
        return f"{_wrap(self.left, Or)} & {_wrap(self.right, (Or, And))}"


@dataclass(frozen=True)
class Or(QFFormula):
    left: QFFormula
    right: QFFormula

    def atoms(self):
        return self.left.atoms() + self.right.atoms()

    def decide(self, atom_truth):
        return self.left.decide(atom_truth) or self.right.decide(atom_truth)

    def render(self):
        return f"{self.left.render()} | {_wrap(self.right, Or)}"


@dataclass(frozen=True)
class Not(QFFormula):
    operand: QFFormula

    def atoms(self):
        return self.operand.atoms()

    def decide(self, atom_truth):
        return not self.operand.decide(atom_truth)

    def render(self):
        if isinstance(self.operand, (PowAtom, Not)):
            return f"!{self.operand.render()}"
        return f"!({self.operand.render()})"


def _wrap(node: QFFormula, kinds) -> str:
    text = node.render()
    return f"({text})" if isinstance(node, kinds) else text
