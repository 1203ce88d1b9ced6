from fractions import Fraction

import pytest

from crspec import (
    BoxRelation,
    FiniteMetricSpace,
    FiniteRelation,
    Interval,
    IntervalSpace,
    ShiftSpace,
)

F = Fraction


def box(a_lo, a_hi, b_lo, b_hi):
    return (Interval(F(a_lo), F(a_hi)), Interval(F(b_lo), F(b_hi)))


@pytest.fixture(scope="session")
def unit():
    return IntervalSpace(0, 1)


@pytest.fixture(scope="session")
def monica(unit):
    """Left half to 0, right half to 1, the point 1 fans out to [0,1]."""
    return BoxRelation(
        unit,
        (box(0, F(1, 2), 0, 0), box(F(1, 2), 1, 1, 1), box(1, 1, 0, 1)),
    )


@pytest.fixture(scope="session")
def constant(unit):
    """Everything maps to the single point 1."""
    return BoxRelation(unit, (box(0, 1, 1, 1),))


@pytest.fixture(scope="session")
def fan(unit):
    """Four boxes whose fourth image of every point is the whole interval."""
    return BoxRelation(
        unit,
        (
            box(0, F(1, 2), 0, 0),
            box(0, 0, 0, F(1, 2)),
            box(F(1, 2), 1, 1, 1),
            box(1, 1, F(1, 2), 1),
        ),
    )


@pytest.fixture(scope="session")
def full_box(unit):
    return BoxRelation(unit, (box(0, 1, 0, 1),))


@pytest.fixture(scope="session")
def two_points():
    return FiniteMetricSpace.discrete(2)


@pytest.fixture(scope="session")
def golden_mean(two_points):
    """Two symbols with the word 11 forbidden."""
    return FiniteRelation.from_pairs(two_points, [(0, 0), (0, 1), (1, 0)])


@pytest.fixture(scope="session")
def full_shift(two_points):
    return FiniteRelation.from_pairs(two_points, [(0, 0), (0, 1), (1, 0), (1, 1)])


@pytest.fixture(scope="session")
def golden_space(golden_mean):
    return ShiftSpace.of(golden_mean)


@pytest.fixture(scope="session")
def full_space(full_shift):
    return ShiftSpace.of(full_shift)
