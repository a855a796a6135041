from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from henselian.cells import (
    INFINITE,
    Cell,
    admissible_levels,
    cell_contains,
    cell_is_empty,
    cell_measure,
    cell_sort_key,
    cell_witness,
    first_level,
    refine_by_coset,
)
from henselian.hensel_power import coset_reps
from utils.oracle import SampleGrid, oracle_measure, oracle_member, resolving_depth


def test_point_cell():
    cell = Cell(Fraction(1, 2), 5, lam=0)
    assert cell.is_point
    assert cell_contains(cell, Fraction(1, 2))
    assert not cell_contains(cell, 0)
    assert cell_measure(cell) == 0
    assert str(cell) == "{1/2}"
    with pytest.raises(ValueError):
        Cell(0, 5, lo=3, lam=0)


def test_invalid_modulus():
    with pytest.raises(ValueError):
        Cell(0, 5, n=0)


@pytest.mark.parametrize("t, expected", [(25, True), (5, False), (50, False), (100, True), (0, False), (Fraction(1, 25), False)])
def test_cell_contains(t, expected):
    cell = Cell(0, 5, hi=0, n=2)
    assert cell_contains(cell, t) is expected
    assert oracle_member(cell, t) is expected


def test_cell_rendering():
    assert str(Cell(0, 5, lam=2, n=2)) == "{t | t != 0, t in 2*P_2}"
    assert str(Cell(1, 3, hi=0)) == "{t | 0 < v(t-(1)), t-(1) in 1*P_1}"
    assert str(Cell(0, 3, lo=2, hi=-3)) == "{t | -3 < v(t) < 2, t in 1*P_1}"


@pytest.mark.parametrize("cell, expected", [
    (Cell(0, 5, hi=0, n=2), Fraction(1, 60)),
    (Cell(0, 3, lo=2, hi=-3), Fraction(80, 9)),
    (Cell(0, 5, hi=0), Fraction(1, 5)),
    (Cell(0, 5, hi=-1), Fraction(1)),
    (Cell(Fraction(1, 2), 3, lo=3, hi=0, lam=3, n=2), Fraction(1, 9)),
    (Cell(0, 2, lo=4, hi=-1, lam=3, n=2), Fraction(5, 32)),
    (Cell(0, 5, lo=2, hi=0, n=2), Fraction(0)),
])
def test_cell_measure_examples(cell, expected):
    assert cell_measure(cell) == expected


def test_unbounded_cell_has_infinite_measure():
    assert cell_measure(Cell(0, 5)) is INFINITE
    assert cell_measure(Cell(0, 5, lo=0)) is INFINITE


@pytest.mark.parametrize("cell", [
    Cell(0, 3, lo=2, hi=-3),
    Cell(0, 5, lo=6, hi=0, n=2),
    Cell(Fraction(1, 2), 3, lo=3, hi=0, lam=3, n=2),
    Cell(0, 2, lo=4, hi=-1, lam=3, n=2),
    Cell(1, 7, lo=3, hi=0, lam=3, n=2),
])
def test_cell_measure_matches_oracle(cell):
    assert cell_measure(cell) == oracle_measure(cell, resolving_depth(cell))


def test_resolving_depth_examples():
    assert resolving_depth(Cell(0, 3, lo=2, hi=-3)) == 4
    assert resolving_depth(Cell(0, 5, lo=6, hi=0, n=2)) == 5


def test_emptiness():
    assert cell_is_empty(Cell(0, 5, lo=2, hi=0, n=2))
    assert not cell_is_empty(Cell(0, 5, lo=2, hi=0, lam=5, n=2))
    assert not cell_is_empty(Cell(0, 5, lam=0))
    assert first_level(Cell(0, 5, lo=2, hi=0, n=2)) is None


def test_first_level():
    assert first_level(Cell(0, 5, hi=0, n=2)) == 2
    assert first_level(Cell(0, 5, lo=4, lam=5, n=2)) == 3
    assert first_level(Cell(0, 5, lam=25, n=3)) == 2


def test_admissible_levels():
    assert admissible_levels(Cell(0, 5, hi=0, lam=5, n=2), (-4, 4)) == [1, 3]
    assert admissible_levels(Cell(0, 5, lo=1), (-2, 4)) == [-2, -1, 0]
    assert admissible_levels(Cell(0, 5, lam=0), (-2, 4)) == []


@pytest.mark.parametrize("cell", [
    Cell(0, 5, hi=0, n=2),
    Cell(0, 5, lo=4, lam=5, n=2),
    Cell(Fraction(1, 3), 3, lo=1, hi=-4, lam=6, n=3),
    Cell(2, 2, lam=10, n=2),
])
def test_witness_is_a_member(cell):
    w = cell_witness(cell)
    assert cell_contains(cell, w)
    assert oracle_member(cell, w)


def test_witness_of_empty_cell():
    with pytest.raises(ValueError):
        cell_witness(Cell(0, 5, lo=2, hi=0, n=2))


def test_refine_by_coset_examples():
    assert [c.lam for c in refine_by_coset(Cell(0, 5), 2)] == [1, 2, 5, 10]
    assert [c.lam for c in refine_by_coset(Cell(0, 5, lo=2, hi=0), 2)] == [5, 10]
    cell = Cell(0, 5, hi=0, n=2)
    assert refine_by_coset(cell, 1) == [cell]
    with pytest.raises(ValueError):
        refine_by_coset(Cell(0, 5, lam=0), 2)


def test_refinement_stays_inside_the_coset():
    cell = Cell(0, 5, hi=-2, lam=2, n=2)
    parts = refine_by_coset(cell, 3)
    assert all(part.n == 6 for part in parts)
    assert sum(cell_measure(part) for part in parts) == cell_measure(cell)
    for t in SampleGrid(5, -2, 3, k=2):
        inside = sum(1 for part in parts if oracle_member(part, t))
        assert inside == (1 if oracle_member(cell, t) else 0)


def test_sort_key_orders_by_center_then_bounds():
    cells = [
        Cell(1, 5, hi=0),
        Cell(0, 5, lo=3, hi=0),
        Cell(0, 5, hi=0),
        Cell(0, 5, lo=3),
        Cell(0, 5, lam=0),
    ]
    ordered = sorted(cells, key=cell_sort_key)
    assert ordered[0] == Cell(0, 5, lo=3)
    assert ordered[-1] == Cell(1, 5, hi=0)
    assert ordered.index(Cell(0, 5, lo=3, hi=0)) < ordered.index(Cell(0, 5, hi=0))


@st.composite
def bounded_cells(draw):
    p = draw(st.sampled_from([2, 3]))
    n = draw(st.sampled_from([1, 2, 3]))
    hi = draw(st.integers(-2, 1))
    lo = draw(st.integers(hi + 1, hi + 4))
    lam = draw(st.sampled_from(coset_reps(p, n))).representative
    center = draw(st.sampled_from([Fraction(0), Fraction(1), Fraction(1, 2), Fraction(-3, 4)]))
    return Cell(center, p, lo=lo, hi=hi, lam=lam, n=n)


@pytest.mark.property_based
@given(bounded_cells())
@settings(max_examples=150, deadline=None)
def test_measure_agrees_with_oracle(cell):
    assert cell_measure(cell) == oracle_measure(cell, resolving_depth(cell))


@pytest.mark.property_based
@given(bounded_cells(), st.sampled_from([2, 3]))
@settings(max_examples=60, deadline=None)
def test_refinement_preserves_measure(cell, m):
    parts = refine_by_coset(cell, m)
    assert sum((cell_measure(part) for part in parts), Fraction(0)) == cell_measure(cell)


@pytest.mark.parametrize("cell, empty", [
    (Cell(0, 5, lo=1, hi=3), True),
    (Cell(0, 5, lo=3, hi=1, n=2), False),
    (Cell(0, 5, lo=4, hi=2, lam=5, n=2), False),
])
def test_emptiness_examples(cell, empty):
    assert cell_is_empty(cell) is empty
    if not empty:
        assert cell_witness(cell) in (25, 125)


def test_refining_the_maximal_ideal_keeps_all_cosets():
    parts = refine_by_coset(Cell(0, 5, hi=0), 2)
    assert [c.lam for c in parts] == [1, 2, 5, 10]
    assert sum(cell_measure(c) for c in parts) == Fraction(1, 5)
