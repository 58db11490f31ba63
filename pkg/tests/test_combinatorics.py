from fractions import Fraction

from ampleangles.combinatorics import (
    halton_points,
    radical_inverse,
    scaled_points,
    sort_uniq,
    uniq,
)


def test_uniq():
    assert list(uniq([1, 1, 2, 3, 3, 3])) == [1, 2, 3]
    assert list(uniq([])) == []
    assert list(uniq([None, None, 0])) == [None, 0]
    assert list(sort_uniq([3, 1, 3, 2, 1])) == [1, 2, 3]



def test_radical_inverse():
    assert radical_inverse(0, 2) == 0
    assert [radical_inverse(i, 2) for i in range(1, 5)] == [
        Fraction(1, 2),
        Fraction(1, 4),
        Fraction(3, 4),
        Fraction(1, 8),
    ]
    assert radical_inverse(1, 3) == Fraction(1, 3)
    assert radical_inverse(3, 3) == Fraction(1, 9)


class TestHalton:
    def test_points(self):
        points = halton_points(2, 3)
        assert points == [
            (Fraction(1, 2), Fraction(1, 3)),
            (Fraction(1, 4), Fraction(2, 3)),
            (Fraction(3, 4), Fraction(1, 9)),
        ]

    def test_open_cube(self):
        for point in halton_points(5, 50):
            assert all(0 < value < 1 for value in point)

    def test_deterministic(self):
        assert halton_points(3, 20) == halton_points(3, 20)

    def test_high_dimension(self):
        (point,) = halton_points(20, 1)
        assert len(point) == 20
        assert point[16] == Fraction(1, 59)
        assert point[19] == Fraction(1, 71)

    def test_scaled(self):
        points = scaled_points([(Fraction(1, 2), 1)], Fraction(1, 2))
        assert points == [(Fraction(1, 4), Fraction(1, 2))]
