from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from henselian.errors import HenselConditionError
from henselian.hensel_power import (
    CosetRep,
    Poly,
    coset_of,
    coset_reps,
    hensel_lift,
    is_nth_power,
    laurent_is_nth_power,
    laurent_power_index,
    power_index,
    same_coset,
    unit_power_modulus,
)
from henselian.valued_core import LaurentField, LaurentSeries
from utils.oracle import SampleGrid, oracle_is_power, oracle_nth_power_classes, power_depth, vp

PRIMES = [2, 3, 5, 7]
EXPONENTS = [2, 3, 4]
F5T = LaurentField(5)


def test_poly_evaluation_and_rendering():
    f = Poly((-6, 0, 1), 5)
    assert f.degree == 2
    assert f(4) == 10
    assert str(f) == "t^2 - 6"
    assert f.derivative().coeffs == (0, 2)
    with pytest.raises(ValueError):
        Poly((0, 0))


@pytest.mark.parametrize("coeffs, a, p, precision, expected", [
    ((-6, 0, 1), 1, 5, 2, 16),
    ((1, 0, 1), 2, 5, 2, 7),
    ((-17, 0, 1), 1, 2, 6, 9),
    ((-2, 0, 0, 1), 3, 5, 2, 3),
])
def test_hensel_lift_examples(coeffs, a, p, precision, expected):
    root = hensel_lift(Poly(coeffs, p), a, precision)
    assert root.val == 0
    assert root.precision == precision
    assert root.unit == expected
    assert vp(Poly(coeffs)(root.to_fraction()), p) >= precision


@pytest.mark.parametrize("coeffs, a, p", [
    ((-2, 0, 1), 0, 2),
    ((-3, 0, 1), 1, 2),
    ((-2, 0, 1), 1, 5),
])
def test_hensel_condition_failures(coeffs, a, p):
    with pytest.raises(HenselConditionError) as err:
        hensel_lift(Poly(coeffs, p), a, 4)
    assert err.value.kind == "hensel-condition-failed"


def test_hensel_lift_needs_prime():
    with pytest.raises(ValueError):
        hensel_lift(Poly((-6, 0, 1)), 1, 2)


@pytest.mark.parametrize("x, n, p, expected", [
    (4, 2, 5, True),
    (2, 2, 5, False),
    (5, 2, 5, False),
    (25, 2, 5, True),
    (17, 2, 2, True),
    (5, 2, 2, False),
    (-1, 2, 3, False),
    (-1, 3, 3, True),
    (Fraction(1, 4), 2, 7, True),
    (3, 1, 5, True),
    (1, 7, 3, True),
])
def test_is_nth_power_examples(x, n, p, expected):
    assert is_nth_power(x, n, p) is expected


def test_zero_is_never_tested():
    with pytest.raises(ValueError):
        is_nth_power(0, 2, 5)
    with pytest.raises(ValueError):
        coset_of(0, 2, 5)


@pytest.mark.parametrize("p, n, e", [(5, 2, 1), (2, 2, 3), (3, 9, 5), (2, 4, 5)])
def test_unit_power_modulus(p, n, e):
    assert unit_power_modulus(p, n) == e


def test_coset_reps_examples():
    assert [c.representative for c in coset_reps(5, 2)] == [1, 2, 5, 10]
    assert [c.representative for c in coset_reps(2, 2)] == [1, 3, 5, 7, 2, 6, 10, 14]
    assert [c.representative for c in coset_reps(7, 1)] == [1]


@pytest.mark.parametrize("p, n, expected", [(2, 2, 8), (3, 3, 9), (5, 2, 4), (2, 3, 3), (3, 2, 4), (7, 3, 9)])
def test_power_index_examples(p, n, expected):
    assert power_index(p, n) == expected
    assert len(coset_reps(p, n)) == expected


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("n", EXPONENTS)
def test_power_index_matches_enumeration(p, n):
    k = power_depth(p, n)
    units = p ** (k - 1) * (p - 1)
    assert power_index(p, n) == n * units // len(oracle_nth_power_classes(p, n, k))


@pytest.mark.parametrize("x, expected", [(9, 1), (50, 2), (5, 5), (Fraction(2, 25), 2), (Fraction(1, 5), 5)])
def test_coset_of_examples(x, expected):
    assert coset_of(x, 2, 5) == CosetRep(Fraction(expected), 2)


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("n", EXPONENTS)
def test_coset_reps_partition_the_units(p, n):
    reps = coset_reps(p, n)
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            assert not oracle_is_power(a.representative / b.representative, n, p)
    for v in range(-2, 3):
        for u in range(1, p ** 2):
            if u % p == 0:
                continue
            x = Fraction(p) ** v * u
            rep = coset_of(x, n, p)
            assert rep in reps
            assert oracle_is_power(x / rep.representative, n, p)


def test_same_coset():
    assert same_coset(2, 8, 2, 5)
    assert not same_coset(2, 4, 2, 5)


@pytest.mark.parametrize("terms, n, expected", [
    ({2: 4}, 2, True),
    ({2: 2}, 2, False),
    ({1: 1}, 2, False),
    ({0: 1, 1: 3}, 2, True),
    ({-3: 2}, 3, True),
])
def test_laurent_power_examples(terms, n, expected):
    assert laurent_is_nth_power(LaurentSeries.from_terms(F5T, terms), n) is expected


def test_laurent_power_undecided_cases():
    with pytest.raises(ValueError):
        laurent_is_nth_power(LaurentSeries.from_terms(F5T, {0: 1}), 5)
    with pytest.raises(ValueError):
        laurent_is_nth_power(LaurentSeries.from_terms(LaurentField(), {0: 1}), 2)
    with pytest.raises(ValueError):
        laurent_power_index(5, 10)


@pytest.mark.parametrize("p, n, expected", [(5, 2, 4), (7, 3, 9), (5, 3, 3), (3, 2, 4)])
def test_laurent_power_index(p, n, expected):
    assert laurent_power_index(p, n) == expected


@pytest.mark.property_based
@given(st.sampled_from(PRIMES), st.sampled_from(EXPONENTS),
       st.fractions(max_denominator=2000).filter(lambda q: q != 0))
@settings(max_examples=400)
def test_is_nth_power_matches_oracle(p, n, x):
    assert is_nth_power(x, n, p) == oracle_is_power(x, n, p)


@pytest.mark.property_based
@given(st.sampled_from([3, 5, 7]), st.integers(1, 200), st.integers(-50, 50), st.integers(2, 8))
@settings(max_examples=200)
def test_hensel_lift_reaches_target(p, a, w, precision):
    assume(a % p)
    f = Poly((-(a * a + p ** 3 * w), 0, 1), p)
    root = hensel_lift(f, a, precision)
    value = Poly(f.coeffs)(root.to_fraction())
    assert value == 0 or vp(value, p) >= precision


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("n", EXPONENTS)
def test_is_nth_power_on_the_default_grid(p, n):
    for x in SampleGrid(p):
        if x == 0:
            continue
        assert is_nth_power(x, n, p) == oracle_is_power(x, n, p), x


@pytest.mark.property_based
@given(st.sampled_from([2, 3, 5]), st.sampled_from(EXPONENTS),
       st.fractions(max_denominator=500).filter(lambda q: q != 0),
       st.fractions(max_denominator=500).filter(lambda q: q != 0))
@settings(max_examples=300)
def test_coset_of_is_multiplicative(p, n, x, y):
    cx, cy = coset_of(x, n, p), coset_of(y, n, p)
    assert cx in coset_reps(p, n)
    assert coset_of(cx.representative * cy.representative, n, p) == coset_of(x * y, n, p)


def lifting_pairs():
    """(coefficients, a, p) with v(f(a)) > 2*v(f'(a)), several with v(f'(a)) > 0."""
    pairs = []
    for a in (1, 3, 5, 7, 9):
        for w in (1, -1, 3):
            pairs.append(((-(a * a + 8 * w), 0, 1), a, 2))
    for a in (1, 2, 4, 5, 7):
        for w in (1, -1):
            pairs.append(((-(a ** 3 + 27 * w), 0, 0, 1), a, 3))
    for p in (3, 5, 7):
        for b in (1, 2):
            for w in (1, -1):
                pairs.append(((-(p * p * b * b + p ** 3 * w), 0, 1), p * b, p))
    for p in (3, 5, 7, 11):
        for a in (1, 2):
            for w in (1, -2):
                pairs.append(((-(a * a + p * w), 0, 1), a, p))
    return pairs


LIFTING_PAIRS = lifting_pairs()


def test_lifting_pairs_meet_the_hensel_condition():
    assert len(LIFTING_PAIRS) >= 50
    assert sum(1 for _, a, p in LIFTING_PAIRS if p == 2) >= 10
    for coeffs, a, p in LIFTING_PAIRS:
        f = Poly(coeffs)
        assert vp(f(a), p) > 2 * vp(f.derivative()(a), p)


@pytest.mark.parametrize("coeffs, a, p", LIFTING_PAIRS)
def test_hensel_lift_to_thirty_digits(coeffs, a, p):
    root = hensel_lift(Poly(coeffs, p), a, 30)
    value = Poly(coeffs)(root.to_fraction())
    assert value == 0 or vp(value, p) >= 30


def test_lift_is_only_determined_below_the_target():
    f = Poly((-17, 0, 1), 2)
    root = hensel_lift(f, 1, 6)
    r = root.to_fraction()
    assert root.precision == 6
    assert vp(f.derivative()(r), 2) == 1
    shifted = r + 2 ** 5
    assert vp(Poly(f.coeffs)(shifted), 2) >= 6
