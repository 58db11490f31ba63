from fractions import Fraction

import pytest

from ampleangles.simplex import Tableau, phase_one


def test_feasible():
    result = phase_one([[1, 1]], [1])
    assert result.feasible
    assert sum(result.solution) == 1
    assert all(value >= 0 for value in result.solution)


def test_negative_rhs():
    result = phase_one([[-1, 0], [0, 1]], [-2, 3])
    assert result.feasible
    assert result.solution == (2, 3)


def test_infeasible():
    result = phase_one([[1], [1]], [1, 2])
    assert not result.feasible
    assert result.objective > 0


def test_nonnegativity():
    result = phase_one([[1, 1]], [Fraction(-1)])
    assert not result.feasible


def test_malformed():
    with pytest.raises(ValueError):
        Tableau([[1, 2], [1]], [0, 0])
    with pytest.raises(ValueError):
        Tableau([[1, 2]], [0, 0])
