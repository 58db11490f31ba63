from fractions import Fraction

import pytest

from ampleangles.forms import LinearForm, QuadraticForm


class TestLinearForm:
    def test_construction(self):
        f = LinearForm.of(1, [2, 0, -1])
        assert f.dim == 3
        assert f.constant == 1
        assert f.coefficients == ((0, 2), (2, -1))
        assert f.coefficient(1) == 0
        assert f.dense() == (2, 0, -1)
        assert not f.is_constant
        assert LinearForm(2, 5).is_constant
        assert f.homogeneous == LinearForm.of(0, [2, 0, -1])

        with pytest.raises(LinearForm.DimensionMismatch):
            LinearForm(2, 0, {2: 1})

    def test_arithmetic(self):
        x, y = LinearForm.variable(2, 0), LinearForm.variable(2, 1)
        assert 1 - x == LinearForm.of(1, [-1, 0])
        assert x + y + 2 == LinearForm.of(2, [1, 1])
        assert (x - y) * 3 == LinearForm.of(0, [3, -3])
        assert Fraction(1, 2) * x == LinearForm.of(0, [Fraction(1, 2), 0])
        assert x - x == LinearForm(2)
        with pytest.raises(LinearForm.DimensionMismatch):
            x + LinearForm.variable(3, 0)

    def test_evaluate(self):
        f = LinearForm.of(2, [-3, 1])
        assert f([Fraction(1, 3), 5]) == 6
        with pytest.raises(LinearForm.DimensionMismatch):
            f([1])

    def test_to_str(self):
        f = LinearForm.of(1, [-1, 2])
        assert f.to_str() == "1 - b1 + 2b2"
        assert f.to_str(["beta1", "eta1"]) == "1 - beta1 + 2eta1"
        assert LinearForm(2).to_str() == "0"
        assert LinearForm.of(0, [-1, 0]).to_str() == "-b1"

    def test_serialize(self):
        f = LinearForm.of(Fraction(1, 2), [0, -3])
        data = f.serialize()
        assert data == {"dim": 2, "constant": "1/2", "coefficients": {"1": "-3"}}
        assert LinearForm.deserialize(data) == f


class TestQuadraticForm:
    def test_product(self):
        x, y = LinearForm.variable(2, 0), LinearForm.variable(2, 1)
        q = (1 + x) * (2 - y)
        assert q.constant == 2
        assert q.linear_coefficient(0) == 2
        assert q.linear_coefficient(1) == -1
        assert q.quadratic == (((0, 1), -1),)
        assert q([1, 1]) == 2
        assert q.linear_part == LinearForm.of(0, [2, -1])

    def test_square_and_ray(self):
        b = LinearForm.variable(1, 0)
        # (1 - (1 - b))^2 - ... : the blown-up plane square 2b - b^2
        q = QuadraticForm(1, 1) - (1 - b) * (1 - b)
        assert q == QuadraticForm(1, 0, {0: 2}, {(0, 0): -1})
        assert q.along_ray([Fraction(1, 2)]) == (0, 1, Fraction(-1, 4))
        assert q([1]) == 1

    def test_arithmetic(self):
        x = LinearForm.variable(2, 0)
        q = x * x
        assert q + x == QuadraticForm(2, 0, {0: 1}, {(0, 0): 1})
        assert (q * 2 - q) == q
        assert -q == QuadraticForm(2, 0, {}, {(0, 0): -1})
        assert QuadraticForm(2, 0, {}, {(1, 0): 1, (0, 1): 1}).quadratic == (((0, 1), 2),)
        with pytest.raises(QuadraticForm.DimensionMismatch):
            q + QuadraticForm(3)

    def test_to_str(self):
        x, y = LinearForm.variable(2, 0), LinearForm.variable(2, 1)
        assert (x * y - x).to_str() == "-b1 + b1*b2"
        assert (x * x + 1).to_str(["p", "q"]) == "1 + p^2"

    def test_serialize(self):
        x, y = LinearForm.variable(2, 0), LinearForm.variable(2, 1)
        q = (x - y) * (x + 1)
        assert QuadraticForm.deserialize(q.serialize()) == q
