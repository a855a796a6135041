"""Reduced rational functions in T = p^(-s) with rational coefficients."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

import sympy as sp

T = sp.Symbol("T")


def _to_fraction(c) -> Fraction:
    num, den = sp.fraction(sp.Rational(c))
    return Fraction(int(num), int(den))


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class RationalFunctionT:
    """num/den, coefficients lowest degree first.

    Normal form: gcd(num, den) = 1 and den(0) = 1 when den(0) != 0,
    otherwise den monic.
    """

    num: Tuple[Fraction, ...]
    den: Tuple[Fraction, ...]

    @classmethod
    def from_expr(cls, expr) -> "RationalFunctionT":
        """Cancel and normalise a sympy expression in T."""
        num, den = sp.fraction(sp.cancel(sp.together(expr)))
        num_poly = sp.Poly(num, T, domain="QQ")
        den_poly = sp.Poly(den, T, domain="QQ")
        num_c = [_to_fraction(c) for c in reversed(num_poly.all_coeffs())]
        den_c = [_to_fraction(c) for c in reversed(den_poly.all_coeffs())]
        scale = den_c[0] if den_c[0] != 0 else den_c[-1]
        num_c = _trim([c / scale for c in num_c])
        den_c = _trim([c / scale for c in den_c])
        return cls(tuple(num_c), tuple(den_c))

    def to_expr(self):
        num = sum(sp.Rational(c.numerator, c.denominator) * T ** i for i, c in enumerate(self.num))
        den = sum(sp.Rational(c.numerator, c.denominator) * T ** i for i, c in enumerate(self.den))
        return num / den

    def evaluate(self, value) -> Fraction:
        value = Fraction(value)
        den = _horner(self.den, value)
        if den == 0:
            raise ZeroDivisionError(f"denominator vanishes at T = {value}")
        return _horner(self.num, value) / den

    def is_zero(self) -> bool:
        return self.num == (Fraction(0),)

    def render(self) -> str:
        num = _render_poly(self.num)
        if self.den == (Fraction(1),):
            return num
        return f"({num})/({_render_poly(self.den)})"

    def to_json(self) -> Dict[str, List[str]]:
        return {"num": [_fmt(c) for c in self.num], "den": [_fmt(c) for c in self.den]}

    def __str__(self):
        return self.render()


def _trim(coeffs: List[Fraction]) -> List[Fraction]:
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs or [Fraction(0)]


def _horner(coeffs, value: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * value + c
    return acc


def _render_poly(coeffs) -> str:
    """1 - T/5, 4*T^2/3 + T, ... in ascending degree."""
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0 and (i > 0 or len(coeffs) > 1):
            continue
        mag = abs(c)
        if i == 0:
            body = _fmt(mag)
        else:
            var = "T" if i == 1 else f"T^{i}"
            body = var if mag.numerator == 1 else f"{mag.numerator}*{var}"
            if mag.denominator != 1:
                body += f"/{mag.denominator}"
        if not terms:
            terms.append(body if c >= 0 else f"-{body}")
        else:
            terms.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(terms)
