"""Surface syntax: polynomials, formulas, field elements and cells.

Polynomials in t are written with + - * / ^ and parentheses. A single
product of rationals, t, and parenthesised linear factors (optionally raised
to a power) is read as a split polynomial; anything else is an expanded
polynomial. Formulas combine the atoms

    abs(f) < abs(g)    abs(f) <= abs(g)    pow(n, f)    f = 0

with ! (tightest), & and | (loosest).
"""

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from henselian.cells import Cell
from henselian.formula import AbsLe, AbsLt, And, EqZero, Not, Or, PowAtom, QFFormula
from henselian.hensel_power import Poly
from henselian.prepare import SplitPoly, as_split
from henselian.valued_core import FieldElement, LaurentField, LaurentSeries, PAdicField, ValuedField


class ParseError(ValueError):
    """Syntax error at a 1-based column."""

    def __init__(self, message: str, column: int):
        super().__init__(f"syntax error at column {column}: {message}")
        self.column = column
        self.reason = message


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|(<=|[-+*/^(),<=&|!])|([A-Za-z_]+)|(\S))")


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break  # only trailing whitespace is left
        number, symbol, word, junk = m.groups()
        column = m.start(m.lastindex) + 1
        if junk is not None:
            raise ParseError(f"unexpected character '{junk}'", column)
        if number is not None:
            tokens.append(Token("num", number, column))
        elif symbol is not None:
            tokens.append(Token(symbol, symbol, column))
        else:
            tokens.append(Token("name", word, column))
        pos = m.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


# Expression trees are tuples: ("num", q), ("t",), ("add" | "sub" | "mul" | "div", a, b),
# ("pow", base, k), ("neg", a), ("paren", a).
Expr = Tuple


class _Parser:
    def __init__(self, text: str, allow_negative_powers: bool = False):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_negative_powers = allow_negative_powers

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _consume(self, kind: Optional[str] = None) -> Token:
        token = self._peek()
        if kind is not None and token.kind != kind:
            found = "end of input" if token.kind == "end" else f"'{token.text}'"
            raise ParseError(f"expected '{kind}' but found {found}", token.column)
        self.pos += 1
        return token

    def _expect_end(self):
        token = self._peek()
        if token.kind != "end":
            raise ParseError(f"unexpected '{token.text}'", token.column)

    # expr := term (('+' | '-') term)*
    def expr(self) -> Expr:
        node = self.term()
        while self._peek().kind in ("+", "-"):
            op = self._consume().kind
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    # term := unary (('*' | '/') unary)*
    def term(self) -> Expr:
        node = self.unary()
        while self._peek().kind in ("*", "/"):
            op = self._consume().kind
            node = ("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self) -> Expr:
        if self._peek().kind == "-":
            self._consume()
            return ("neg", self.unary())
        if self._peek().kind == "+":
            self._consume()
            return self.unary()
        return self.power()

    # power := primary ('^' integer)?
    def power(self) -> Expr:
        base = self.primary()
        if self._peek().kind != "^":
            return base
        self._consume("^")
        sign = 1
        if self._peek().kind == "-":
            token = self._consume()
            if not self.allow_negative_powers:
                raise ParseError("negative exponents are not allowed here", token.column)
            sign = -1
        exponent = int(self._consume("num").text)
        return ("pow", base, sign * exponent)

    def primary(self) -> Expr:
        token = self._peek()
        if token.kind == "num":
            self._consume()
            return ("num", Fraction(int(token.text)))
        if token.kind == "name" and token.text == "t":
            self._consume()
            return ("t",)
        if token.kind == "(":
            self._consume()
            inner = self.expr()
            self._consume(")")
            return ("paren", inner)
        found = "end of input" if token.kind == "end" else f"'{token.text}'"
        raise ParseError(f"expected a number, t or '(' but found {found}", token.column)

    # formula := conj ('|' conj)*
    def formula(self) -> QFFormula:
        node = self.conj()
        while self._peek().kind == "|":
            self._consume()
            node = Or(node, self.conj())
        return node

    # conj := neg ('&' neg)*
    def conj(self) -> QFFormula:
        node = self.neg()
        while self._peek().kind == "&":
            self._consume()
            node = And(node, self.neg())
        return node

    def neg(self) -> QFFormula:
        if self._peek().kind == "!":
            self._consume()
            return Not(self.neg())
        return self.group()

    def group(self) -> QFFormula:
        if self._peek().kind != "(":
            return self.atom()
        start = self.pos
        try:
            self._consume("(")
            inner = self.formula()
            self._consume(")")
            return inner
        except ParseError as first:
            # "(t-1)*(t) = 0" starts like a parenthesised formula
            self.pos = start
            try:
                return self.atom()
            except ParseError as second:
                raise first if first.column > second.column else second

    def atom(self) -> QFFormula:
        token = self._peek()
        if token.kind == "name" and token.text == "abs":
            f = self._abs_operand()
            op = self._peek()
            if op.kind not in ("<", "<="):
                raise ParseError("expected '<' or '<=' after abs(...)", op.column)
            self._consume()
            g = self._abs_operand()
            return AbsLt(f, g) if op.kind == "<" else AbsLe(f, g)
        if token.kind == "name" and token.text == "pow":
            self._consume()
            self._consume("(")
            m_token = self._consume("num")
            m = int(m_token.text)
            if m < 1:
                raise ParseError("pow needs n >= 1", m_token.column)
            self._consume(",")
            f = self._polynomial(self.expr(), m_token.column)
            self._consume(")")
            return PowAtom(m, f)
        column = token.column
        f = self._polynomial(self.expr(), column)
        self._consume("=")
        zero = self._consume("num")
        if int(zero.text) != 0:
            raise ParseError("only '= 0' comparisons are supported", zero.column)
        return EqZero(f)

    def _abs_operand(self) -> SplitPoly:
        self._consume("name")
        self._consume("(")
        column = self._peek().column
        f = self._polynomial(self.expr(), column)
        self._consume(")")
        return f

    def _polynomial(self, node: Expr, column: int) -> SplitPoly:
        return as_split(to_polynomial(node, column))


def _laurent_terms(node: Expr, column: int) -> Dict[int, Fraction]:
    """Expand an expression tree into {exponent: coefficient}."""
    kind = node[0]
    if kind == "num":
        return {0: node[1]} if node[1] != 0 else {}
    if kind == "t":
        return {1: Fraction(1)}
    if kind == "paren":
        return _laurent_terms(node[1], column)
    if kind == "neg":
        return {e: -c for e, c in _laurent_terms(node[1], column).items()}
    if kind in ("add", "sub"):
        left = _laurent_terms(node[1], column)
        right = _laurent_terms(node[2], column)
        sign = 1 if kind == "add" else -1
        out = dict(left)
        for e, c in right.items():
            out[e] = out.get(e, Fraction(0)) + sign * c
        return {e: c for e, c in out.items() if c != 0}
    if kind == "mul":
        return _multiply(_laurent_terms(node[1], column), _laurent_terms(node[2], column))
    if kind == "div":
        den = _laurent_terms(node[2], column)
        if len(den) != 1:
            raise ParseError("division is only by a nonzero constant or a power of t", column)
        (e, c), = den.items()
        return {k - e: v / c for k, v in _laurent_terms(node[1], column).items()}
    if kind == "pow":
        base = _laurent_terms(node[1], column)
        k = node[2]
        if k < 0:
            if len(base) != 1:
                raise ParseError("only monomials take negative exponents", column)
            (e, c), = base.items()
            return {e * k: c ** k}
        out = {0: Fraction(1)}
        for _ in range(k):
            out = _multiply(out, base)
        return out
    raise ParseError(f"unexpected node {kind}", column)


def _multiply(a: Dict[int, Fraction], b: Dict[int, Fraction]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[ea + eb] = out.get(ea + eb, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def _factors(node: Expr) -> List[Tuple[str, Expr]]:
    """Flatten a top-level product into ('mul' | 'div', factor) pairs."""
    if node[0] == "mul":
        return _factors(node[1]) + _factors(node[2])
    if node[0] == "div":
        return _factors(node[1]) + [("div", node[2])]
    return [("mul", node)]


def _split_form(node: Expr, column: int) -> Optional[SplitPoly]:
    """Read a product of constants, t and linear factors as a split polynomial."""
    unit = Fraction(1)
    if node[0] == "neg":
        unit, node = Fraction(-1), node[1]
    roots: List[Tuple[Fraction, int]] = []
    for op, factor in _factors(node):
        exponent = 1
        if factor[0] == "pow":
            factor, exponent = factor[1], factor[2]
        terms = _laurent_terms(factor, column)
        if any(e < 0 for e in terms):
            return None
        degree = max(terms) if terms else 0
        if not terms:
            raise ParseError("the zero polynomial is not allowed", column)
        if exponent == 0:
            continue
        if degree == 0:
            value = terms[0] ** exponent
            unit = unit / value if op == "div" else unit * value
        elif degree == 1 and op == "mul" and factor[0] in ("t", "paren"):
            a, b = terms[1], terms.get(0, Fraction(0))
            unit *= a ** exponent
            roots.append((-b / a, exponent))
        else:
            return None
    return SplitPoly.from_factors(unit, roots)


def to_polynomial(node: Expr, column: int = 1) -> Union[SplitPoly, Poly]:
    split = _split_form(node, column)
    if split is not None:
        return split
    terms = _laurent_terms(node, column)
    if any(e < 0 for e in terms):
        raise ParseError("negative powers of t are not polynomials", column)
    if not terms:
        raise ParseError("the zero polynomial is not allowed", column)
    return Poly(tuple(terms.get(i, Fraction(0)) for i in range(max(terms) + 1)))


def parse_poly(text: str) -> Union[SplitPoly, Poly]:
    """Factored input gives a SplitPoly, expanded input a Poly."""
    parser = _Parser(text)
    node = parser.expr()
    parser._expect_end()
    return to_polynomial(node)


def parse_formula(text: str) -> QFFormula:
    parser = _Parser(text)
    phi = parser.formula()
    parser._expect_end()
    return phi


def parse_rational(text: str) -> Fraction:
    parser = _Parser(text)
    node = parser.expr()
    parser._expect_end()
    terms = _laurent_terms(node, 1)
    if any(e != 0 for e in terms):
        raise ParseError(f"'{text}' is not a rational constant", 1)
    return terms.get(0, Fraction(0))


def parse_element(text: str, field: ValuedField) -> FieldElement:
    """Rationals in Q_p; Laurent polynomials (negative powers allowed) in k((t))."""
    parser = _Parser(text, allow_negative_powers=isinstance(field, LaurentField))
    node = parser.expr()
    parser._expect_end()
    terms = _laurent_terms(node, 1)
    if isinstance(field, PAdicField):
        if any(e != 0 for e in terms):
            raise ParseError("t is not an element of Q_p", 1)
        return field.embed(terms.get(0, Fraction(0)))
    return LaurentSeries.from_terms(field, terms) if terms else field.zero()


def parse_cell(data: Union[str, dict], prime: int) -> Cell:
    """Cell from its JSON form {"center", "lo", "hi", "lambda", "n"}."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid cell JSON: {e.msg}", e.colno) from e
    if not isinstance(data, dict):
        raise ParseError("a cell must be a JSON object", 1)
    unknown = set(data) - {"center", "lo", "hi", "lambda", "n"}
    if unknown:
        raise ParseError(f"unknown cell keys {sorted(unknown)}", 1)

    def rational(key, default):
        value = data.get(key, default)
        return parse_rational(str(value))

    def bound(key):
        value = data.get(key)
        if value is not None and not isinstance(value, int):
            raise ParseError(f"cell '{key}' must be an integer or null", 1)
        return value

    n = data.get("n", 1)
    if not isinstance(n, int) or n < 1:
        raise ParseError("cell 'n' must be an integer >= 1", 1)
    return Cell(rational("center", "0"), prime, bound("lo"), bound("hi"), rational("lambda", "1"), n)
