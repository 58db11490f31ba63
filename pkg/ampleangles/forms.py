"""Exact affine-linear and quadratic polynomials in the angle vector."""

from fractions import Fraction

from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

from .common import Rational, Serializable, format_rational, to_rational


def _names(dim: int, names: Optional[Sequence[str]]) -> Sequence[str]:
    return names if names is not None else ["b%d" % (i + 1) for i in range(dim)]


def _term(coefficient: Fraction, symbol: str, first: bool) -> str:
    magnitude = abs(coefficient)
    text = symbol if magnitude == 1 else "%s%s" % (format_rational(magnitude), symbol)
    if first:
        return text if coefficient > 0 else "-" + text
    return ("+ " if coefficient > 0 else "- ") + text


class LinearForm(Serializable):
    """constant + sum(coefficient_i * beta_i), stored sparsely with zero coefficients dropped."""

    class Error(Exception):
        pass

    class DimensionMismatch(Error):
        pass

    __slots__ = ("dim", "constant", "coefficients")

    def __init__(
        self, dim: int, constant: Rational = 0, coefficients: Mapping[int, Rational] = None
    ):
        self.dim = dim
        self.constant = Fraction(constant)
        items = []
        for index, value in sorted((coefficients or {}).items()):
            if not 0 <= index < dim:
                raise self.DimensionMismatch("Angle index %d outside dimension %d" % (index, dim))
            value = Fraction(value)
            if value:
                items.append((index, value))
        self.coefficients = tuple(items)

    @classmethod
    def variable(cls, dim: int, index: int) -> "LinearForm":
        return cls(dim, 0, {index: 1})

    @classmethod
    def of(cls, constant: Rational, coefficients: Sequence[Rational]) -> "LinearForm":
        return cls(len(coefficients), constant, dict(enumerate(coefficients)))

    def coefficient(self, index: int) -> Fraction:
        for i, value in self.coefficients:
            if i == index:
                return value
        return Fraction(0)

    def dense(self) -> Tuple[Fraction, ...]:
        values = [Fraction(0)] * self.dim
        for index, value in self.coefficients:
            values[index] = value
        return tuple(values)

    @property
    def is_constant(self) -> bool:
        return not self.coefficients

    @property
    def homogeneous(self) -> "LinearForm":
        return LinearForm(self.dim, 0, dict(self.coefficients))

    def _check(self, other: "LinearForm") -> None:
        if not isinstance(other, LinearForm):
            raise TypeError("Expected LinearForm, got %s" % type(other))
        if other.dim != self.dim:
            raise self.DimensionMismatch("Dimensions %d and %d differ" % (self.dim, other.dim))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return LinearForm(self.dim, self.constant + other, dict(self.coefficients))
        self._check(other)
        merged = dict(self.coefficients)
        for index, value in other.coefficients:
            merged[index] = merged.get(index, Fraction(0)) + value
        return LinearForm(self.dim, self.constant + other.constant, merged)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LinearForm):
            return QuadraticForm.product(self, other)
        if not isinstance(other, (int, Fraction)) or isinstance(other, bool):
            return NotImplemented
        return LinearForm(
            self.dim, self.constant * other, {i: v * other for i, v in self.coefficients}
        )

    __rmul__ = __mul__

    def __call__(self, point: Sequence[Rational]) -> Fraction:
        if len(point) != self.dim:
            raise self.DimensionMismatch(
                "Point of length %d for dimension %d" % (len(point), self.dim)
            )
        terms = (value * point[i] for i, value in self.coefficients)
        return self.constant + sum(terms, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, LinearForm):
            return False
        return (self.dim, self.constant, self.coefficients) == (
            other.dim,
            other.constant,
            other.coefficients,
        )

    def __lt__(self, other):
        return (self.dim, self.coefficients, self.constant) < (
            other.dim,
            other.coefficients,
            other.constant,
        )

    def __hash__(self):
        return hash((self.dim, self.constant, self.coefficients))

    def __repr__(self):
        return "LinearForm(%d, %s, {%s})" % (
            self.dim,
            format_rational(self.constant),
            ", ".join("%d: %s" % (i, format_rational(v)) for i, v in self.coefficients),
        )

    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        names = _names(self.dim, names)
        parts = []
        if self.constant or not self.coefficients:
            parts.append(format_rational(self.constant))
        for index, value in self.coefficients:
            parts.append(_term(value, names[index], first=not parts))
        return " ".join(parts)

    __str__ = to_str

    def serialize(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "constant": format_rational(self.constant),
            "coefficients": {str(i): format_rational(v) for i, v in self.coefficients},
        }

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "LinearForm":
        return cls(
            int(data["dim"]),
            to_rational(data["constant"]),
            {int(i): to_rational(v) for i, v in data.get("coefficients", {}).items()},
        )


class QuadraticForm(Serializable):
    """constant + linear part + sum over i <= j of q_ij * beta_i * beta_j."""

    class Error(Exception):
        pass

    class DimensionMismatch(Error):
        pass

    __slots__ = ("dim", "constant", "linear", "quadratic")

    def __init__(
        self,
        dim: int,
        constant: Rational = 0,
        linear: Mapping[int, Rational] = None,
        quadratic: Mapping[Tuple[int, int], Rational] = None,
    ):
        self.dim = dim
        self.constant = Fraction(constant)
        self.linear = LinearForm(dim, 0, linear or {}).coefficients
        merged: Dict[Tuple[int, int], Fraction] = {}
        for (i, j), value in (quadratic or {}).items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise self.DimensionMismatch("Index pair %r outside dimension %d" % ((i, j), dim))
            key = (min(i, j), max(i, j))
            merged[key] = merged.get(key, Fraction(0)) + Fraction(value)
        self.quadratic = tuple(sorted((key, value) for key, value in merged.items() if value))

    @classmethod
    def product(cls, a: LinearForm, b: LinearForm) -> "QuadraticForm":
        a._check(b)
        linear: Dict[int, Fraction] = {}
        for i, value in a.coefficients:
            linear[i] = linear.get(i, Fraction(0)) + value * b.constant
        for i, value in b.coefficients:
            linear[i] = linear.get(i, Fraction(0)) + value * a.constant
        quadratic: Dict[Tuple[int, int], Fraction] = {}
        for i, u in a.coefficients:
            for j, w in b.coefficients:
                key = (min(i, j), max(i, j))
                quadratic[key] = quadratic.get(key, Fraction(0)) + u * w
        return cls(a.dim, a.constant * b.constant, linear, quadratic)

    @property
    def linear_part(self) -> LinearForm:
        return LinearForm(self.dim, 0, dict(self.linear))

    def linear_coefficient(self, index: int) -> Fraction:
        return dict(self.linear).get(index, Fraction(0))

    def __add__(self, other):
        if isinstance(other, LinearForm):
            other = QuadraticForm(other.dim, other.constant, dict(other.coefficients))
        if isinstance(other, (int, Fraction)):
            other = QuadraticForm(self.dim, other)
        if not isinstance(other, QuadraticForm):
            return NotImplemented
        if other.dim != self.dim:
            raise self.DimensionMismatch("Dimensions %d and %d differ" % (self.dim, other.dim))
        linear = dict(self.linear)
        for i, value in other.linear:
            linear[i] = linear.get(i, Fraction(0)) + value
        quadratic = dict(self.quadratic)
        for key, value in other.quadratic:
            quadratic[key] = quadratic.get(key, Fraction(0)) + value
        return QuadraticForm(self.dim, self.constant + other.constant, linear, quadratic)

    __radd__ = __add__

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, Fraction)) or isinstance(scalar, bool):
            return NotImplemented
        return QuadraticForm(
            self.dim,
            self.constant * scalar,
            {i: v * scalar for i, v in self.linear},
            {k: v * scalar for k, v in self.quadratic},
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __call__(self, point: Sequence[Rational]) -> Fraction:
        if len(point) != self.dim:
            raise self.DimensionMismatch(
                "Point of length %d for dimension %d" % (len(point), self.dim)
            )
        total = self.constant
        for i, value in self.linear:
            total += value * point[i]
        for (i, j), value in self.quadratic:
            total += value * point[i] * point[j]
        return total

    def along_ray(self, direction: Sequence[Rational]) -> Tuple[Fraction, Fraction, Fraction]:
        """Coefficients (c0, c1, c2) of t -> q(t * direction) = c0 + c1 t + c2 t^2."""
        if len(direction) != self.dim:
            raise self.DimensionMismatch(
                "Ray of length %d for dimension %d" % (len(direction), self.dim)
            )
        c1 = sum((value * direction[i] for i, value in self.linear), Fraction(0))
        c2 = sum(
            (value * direction[i] * direction[j] for (i, j), value in self.quadratic), Fraction(0)
        )
        return self.constant, c1, c2

    def __eq__(self, other):
        if not isinstance(other, QuadraticForm):
            return False
        return (self.dim, self.constant, self.linear, self.quadratic) == (
            other.dim,
            other.constant,
            other.linear,
            other.quadratic,
        )

    def __hash__(self):
        return hash((self.dim, self.constant, self.linear, self.quadratic))

    def __repr__(self):
        return "QuadraticForm(%d, %s)" % (self.dim, self.to_str())

    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        names = _names(self.dim, names)
        parts = []
        if self.constant or not (self.linear or self.quadratic):
            parts.append(format_rational(self.constant))
        for index, value in self.linear:
            parts.append(_term(value, names[index], first=not parts))
        for (i, j), value in self.quadratic:
            symbol = "%s^2" % names[i] if i == j else "%s*%s" % (names[i], names[j])
            parts.append(_term(value, symbol, first=not parts))
        return " ".join(parts)

    __str__ = to_str

    def serialize(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "constant": format_rational(self.constant),
            "linear": {str(i): format_rational(v) for i, v in self.linear},
            "quadratic": {"%d,%d" % key: format_rational(v) for key, v in self.quadratic},
        }

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "QuadraticForm":
        quadratic = {}
        for key, value in data.get("quadratic", {}).items():
            i, j = key.split(",")
            quadratic[(int(i), int(j))] = to_rational(value)
        return cls(
            int(data["dim"]),
            to_rational(data["constant"]),
            {int(i): to_rational(v) for i, v in data.get("linear", {}).items()},
            quadratic,
        )
