from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from henselian.cells import Cell, refine_by_coset
from henselian.constructible import (
    NON_INTEGRABLE,
    AlgebraOp,
    ConstructibleFunction,
    Mode,
    Piece,
    absolute_power,
    algebra,
    evaluate,
    from_prepared,
    igusa_zeta,
    indicator,
    integrand,
    integrate,
    power,
)
from henselian.errors import InfiniteMeasureError, UnsupportedLogPowerError, ValuationOfZeroError
from henselian.hensel_power import coset_reps
from henselian.prepare import SplitPoly, prepare
from henselian.rational_function import T, RationalFunctionT
from utils.oracle import SampleGrid, oracle_abs, oracle_integrate, vp

T_POLY = SplitPoly(1, ((0, 1),))
T_SQUARED = SplitPoly(1, ((0, 2),))
T_TIMES_T_MINUS_1 = SplitPoly(1, ((0, 1), (1, 1)))


def units_and_ideal(p):
    """R minus {0}"""
    return Cell(0, p, hi=-1)


def maximal_ideal(p):
    return Cell(0, p, hi=0)


@pytest.mark.parametrize("f, p, domain, mode, s, expected", [
    (T_POLY, 2, units_and_ideal(2), Mode.V, 1, Fraction(1)),
    (T_POLY, 5, maximal_ideal(5), Mode.ABS, 1, Fraction(1, 30)),
    (T_POLY, 5, units_and_ideal(5), Mode.ABS, 2, Fraction(25, 31)),
    (T_TIMES_T_MINUS_1, 3, units_and_ideal(3), Mode.ABS, 1, Fraction(1, 2)),
    (T_TIMES_T_MINUS_1, 3, units_and_ideal(3), Mode.ABS, 2, Fraction(5, 13)),
    (T_TIMES_T_MINUS_1, 3, units_and_ideal(3), Mode.V, 1, Fraction(1)),
    (T_POLY, 5, maximal_ideal(5), Mode.ABS, -1, NON_INTEGRABLE),
])
def test_integral_examples(f, p, domain, mode, s, expected):
    assert integrate(integrand(f, p, domain, mode, s)) == expected


def test_v_mode_rejects_negative_exponent():
    with pytest.raises(ValueError):
        integrand(T_POLY, 5, units_and_ideal(5), Mode.V, -1)


def test_valuation_of_zero_at_a_root():
    with pytest.raises(ValuationOfZeroError) as err:
        from_prepared(T_POLY, prepare([T_POLY], 5), Mode.V)
    assert err.value.kind == "valuation-of-zero"


def test_from_prepared_rejects_foreign_preparation():
    with pytest.raises(ValueError):
        from_prepared(SplitPoly(1, ((1, 1),)), prepare([T_POLY], 5), Mode.ABS)


@pytest.mark.parametrize("p, k", [(2, 6), (3, 4), (5, 3)])
def test_abs_integral_against_oracle(p, k):
    domain = units_and_ideal(p)
    exact = integrate(integrand(T_POLY, p, domain))
    approx = oracle_integrate(oracle_abs(lambda t: t, p, 1), domain, k)
    assert exact - approx == Fraction(p, p + 1) / p ** (2 * k)


def test_v_integral_against_oracle():
    k = 6
    domain = units_and_ideal(2)
    approx = oracle_integrate(lambda t: Fraction(vp(t, 2)), domain, k)
    assert approx == 1 - Fraction(1 + k, 2 ** k)
    assert integrate(integrand(T_POLY, 2, domain, Mode.V)) == 1


def test_product_integral_against_oracle():
    k = 4
    domain = units_and_ideal(3)
    approx = oracle_integrate(oracle_abs(T_TIMES_T_MINUS_1, 3, 1), domain, k)
    assert approx == Fraction(1, 2) - Fraction(3, 2 * 9 ** k)


def test_evaluate_matches_pointwise_values():
    p = 3
    g = integrand(T_TIMES_T_MINUS_1, p, units_and_ideal(p))
    for t in SampleGrid(p, -2, 3, k=2):
        value = T_TIMES_T_MINUS_1(t)
        if t == 0 or value == 0:
            continue
        expected = Fraction(1, p) ** vp(value, p) if vp(t, p) >= 0 else Fraction(0)
        assert evaluate(g, t) == expected, t


def test_build_combines_like_terms():
    cell = maximal_ideal(5)
    f = ConstructibleFunction.build(5, [Piece(cell, 1, 1, 0), Piece(cell, 2, 1, 0), Piece(cell, 0, 0, 0)])
    assert f.pieces == (Piece(cell, Fraction(3), 1, 0),)
    zero = ConstructibleFunction.build(5, [Piece(cell, 1), Piece(cell, -1)])
    assert zero.is_zero()
    with pytest.raises(ValueError):
        ConstructibleFunction.build(3, [Piece(cell, 1)])


def test_indicator_algebra():
    a, b = maximal_ideal(5), Cell(1, 5, hi=0)
    assert integrate(indicator(a) + indicator(b)) == Fraction(2, 5)
    assert integrate(indicator(units_and_ideal(5)) + indicator(a)) == Fraction(6, 5)
    assert integrate(indicator(units_and_ideal(5)) * indicator(a)) == Fraction(1, 5)
    assert integrate(3 * indicator(a)) == Fraction(3, 5)
    assert (indicator(a) + -indicator(a)).is_zero()
    assert algebra(AlgebraOp.MUL, indicator(a), ConstructibleFunction(5)).is_zero()
    with pytest.raises(TypeError):
        algebra(AlgebraOp.SCALE, indicator(a), indicator(b))
    with pytest.raises(ValueError):
        algebra(AlgebraOp.ADD, indicator(a), indicator(Cell(0, 3, hi=0)))


def test_sum_evaluates_pointwise():
    f = indicator(units_and_ideal(5)) + absolute_power(T_POLY, 5, 1)
    assert evaluate(f, 5) == 1 + Fraction(1, 5)
    assert evaluate(f, Fraction(1, 5)) == 5
    assert evaluate(f, 0) == 0


def test_power():
    cell = units_and_ideal(5)
    f = ConstructibleFunction.build(5, [Piece(cell, 2, 1, 1)])
    assert power(f, 2).pieces == (Piece(cell, Fraction(4), 2, 2),)
    with pytest.raises(ValueError):
        power(f, -1)
    g = ConstructibleFunction.build(5, [Piece(cell, 2, 0, 1)])
    assert power(g, -1).pieces == (Piece(cell, Fraction(1, 2), 0, -1),)


@pytest.mark.parametrize("piece, expected", [
    (Piece(Cell(0, 5, lo=0), 1, 0, -2), Fraction(1, 5)),
    (Piece(Cell(0, 5, lo=0), 1, 0, -1), NON_INTEGRABLE),
    (Piece(Cell(0, 5), 1, 0, 0), NON_INTEGRABLE),
    (Piece(Cell(0, 5, lam=0), 7), Fraction(0)),
    (Piece(Cell(0, 3, lo=2, hi=-3), 1), Fraction(80, 9)),
])
def test_integrate_single_pieces(piece, expected):
    assert integrate(ConstructibleFunction.build(piece.cell.prime, [piece])) == expected


def test_log_power_limit():
    f = ConstructibleFunction.build(5, [Piece(maximal_ideal(5), 1, 7, 0)])
    with pytest.raises(UnsupportedLogPowerError):
        integrate(f)


@pytest.mark.parametrize("f, p, rendered", [
    (T_POLY, 5, "(4/5)/(1 - T/5)"),
    (T_SQUARED, 5, "(4/5)/(1 - T^2/5)"),
    (T_TIMES_T_MINUS_1, 3, "(1/3 + T/3)/(1 - T/3)"),
])
def test_zeta_examples(f, p, rendered):
    assert igusa_zeta(f, p, units_and_ideal(p)).render() == rendered


def test_zeta_specialises_to_integrals():
    z = igusa_zeta(T_TIMES_T_MINUS_1, 3, units_and_ideal(3))
    assert z.evaluate(Fraction(1, 3)) == Fraction(1, 2)
    for s in (1, 2, 3):
        expected = integrate(integrand(T_TIMES_T_MINUS_1, 3, units_and_ideal(3), Mode.ABS, s))
        assert z.evaluate(Fraction(1, 3 ** s)) == expected
    z = igusa_zeta(T_POLY, 5, maximal_ideal(5))
    assert z.evaluate(1) == Fraction(1, 5)
    assert z.evaluate(Fraction(1, 5)) == Fraction(1, 30)


def test_zeta_domains():
    assert igusa_zeta(T_POLY, 5, Cell(0, 5, lam=0)).is_zero()
    with pytest.raises(InfiniteMeasureError):
        igusa_zeta(T_POLY, 5, Cell(0, 5))


def test_rational_function_normal_form():
    z = RationalFunctionT.from_expr((1 + T) / (2 - 2 * T))
    assert z.num == (Fraction(1, 2), Fraction(1, 2))
    assert z.den == (1, -1)
    assert z.render() == "(1/2 + T/2)/(1 - T)"
    assert z.to_json() == {"num": ["1/2", "1/2"], "den": ["1", "-1"]}
    assert RationalFunctionT.from_expr(sp.Integer(3)).render() == "3"
    with pytest.raises(ZeroDivisionError):
        z.evaluate(1)


def test_from_prepared_examples():
    prepared = prepare([T_POLY], 5)
    abs_t = from_prepared(T_POLY, prepared, Mode.ABS)
    assert abs_t.pieces == (Piece(Cell(0, 5), Fraction(1), 0, 1),)
    off_root = [pc for pc in prepared if not pc.cell.is_point]
    assert from_prepared(T_POLY, off_root, Mode.V).pieces == (Piece(Cell(0, 5), Fraction(1), 1, 0),)
    product = from_prepared(T_TIMES_T_MINUS_1, prepare([T_TIMES_T_MINUS_1], 3), Mode.ABS)
    assert len(product.pieces) == 4


def test_algebra_examples():
    abs_t = absolute_power(T_POLY, 5, 1)
    assert algebra(AlgebraOp.SCALE, abs_t, 0).is_zero()
    assert (abs_t * abs_t).pieces == (Piece(Cell(0, 5), Fraction(1), 0, 2),)


REFINABLE_PIECES = [
    Piece(Cell(0, 3, hi=0), Fraction(2), 1, 1),
    Piece(Cell(1, 3, lo=3, hi=0, lam=2, n=2), Fraction(1, 2), 0, 2),
    Piece(Cell(0, 3, lo=-1), Fraction(1), 0, -2),
    Piece(Cell(Fraction(1, 3), 3, lo=4, hi=0), Fraction(-1), 2, 0),
]


@pytest.mark.parametrize("m", [2, 3])
def test_integral_is_invariant_under_coset_refinement(m):
    f = ConstructibleFunction.build(3, REFINABLE_PIECES)
    refined = ConstructibleFunction.build(3, [
        Piece(part, piece.q, piece.d, piece.e)
        for piece in REFINABLE_PIECES
        for part in refine_by_coset(piece.cell, m)
    ])
    assert len(refined.cells()) > len(f.cells())
    assert integrate(refined) == integrate(f)


@st.composite
def bounded_pieces(draw, p):
    n = draw(st.sampled_from([1, 2]))
    hi = draw(st.integers(-2, 1))
    lo = draw(st.integers(hi + 1, hi + 4))
    lam = draw(st.sampled_from(coset_reps(p, n))).representative
    center = draw(st.sampled_from([Fraction(0), Fraction(1)]))
    cell = Cell(center, p, lo=lo, hi=hi, lam=lam, n=n)
    count = draw(st.integers(1, 2))
    return [
        Piece(cell, draw(st.fractions(-3, 3, max_denominator=4)), draw(st.integers(0, 2)), draw(st.integers(-1, 2)))
        for _ in range(count)
    ]


@st.composite
def linear_combinations(draw):
    p = draw(st.sampled_from([2, 3]))
    f = ConstructibleFunction.build(p, draw(bounded_pieces(p)))
    g = ConstructibleFunction.build(p, draw(bounded_pieces(p)))
    a = draw(st.fractions(-2, 2, max_denominator=3))
    return f, g, a


@pytest.mark.property_based
@given(linear_combinations())
@settings(max_examples=40, deadline=None)
def test_integral_is_linear(case):
    f, g, a = case
    combined = algebra(AlgebraOp.ADD, algebra(AlgebraOp.SCALE, f, a), g)
    assert integrate(combined) == a * integrate(f) + integrate(g)
