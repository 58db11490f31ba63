from fractions import Fraction
import math
import re

from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

SCHEMA_VERSION = "aa-schema/1"

Rational = Union[int, Fraction]


class Serializable:
    """Values that round-trip through plain JSON-compatible dictionaries."""

    def serialize(self) -> Dict[str, Any]:
        raise NotImplementedError

    @classmethod
    def deserialize(cls, data: Dict[str, Any]):
        raise NotImplementedError


def to_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse "p/q", "p" or an int/Fraction into a Fraction.

    Floats are refused: nothing in this package is allowed to be approximate.
    """
    if isinstance(value, bool):
        raise TypeError("Expected a rational, got bool")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError("Not a rational number: %r" % value)
    raise TypeError("Expected a rational, got %s" % type(value))


def format_rational(value: Rational) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return "%d" % value.numerator
    return "%d/%d" % (value.numerator, value.denominator)


def format_vector(values: Iterable[Rational]) -> List[str]:
    return [format_rational(value) for value in values]


def parse_vector(values: Iterable[Union[str, int]]) -> Tuple[Fraction, ...]:
    return tuple(to_rational(value) for value in values)


def primitive(values: Sequence[Rational]) -> Tuple[Fraction, ...]:
    """Scale a nonzero vector by a positive factor to the primitive integer vector on its ray."""
    values = [Fraction(value) for value in values]
    if not any(values):
        return tuple(values)
    lcm = 1
    for value in values:
        lcm = lcm * value.denominator // math.gcd(lcm, value.denominator)
    integers = [int(value * lcm) for value in values]
    divisor = 0
    for value in integers:
        divisor = math.gcd(divisor, abs(value))
    return tuple(Fraction(value, divisor) for value in integers)


def sign(value: Rational) -> int:
    return (value > 0) - (value < 0)


class ClassExpression:
    """A linear combination of named generators, e.g. ``2Z+3F-E1`` or ``-K``.

    Names are resolved against a surface later; this only parses.
    """

    class Error(Exception):
        pass

    class ParseError(Error):
        pass

    _TERM = re.compile(
        r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*([A-Za-z][A-Za-z0-9_]*)?\s*"
    )

    __slots__ = ("text", "terms")

    @classmethod
    def parse(cls, text: str) -> "ClassExpression":
        if not isinstance(text, str) or not text.strip():
            raise cls.ParseError("Empty class expression")
        terms: Dict[str, Fraction] = {}
        position = 0
        stripped = text.strip()
        while position < len(stripped):
            match = cls._TERM.match(stripped, position)
            if match is None or match.end() == position:
                raise cls.ParseError("Cannot parse %r at offset %d" % (text, position))
            op, coefficient, name = match.groups()
            if name is None:
                raise cls.ParseError("Term without a generator in %r" % text)
            if op is None and position != 0:
                raise cls.ParseError("Missing operator before %r in %r" % (name, text))
            try:
                value = Fraction(coefficient) if coefficient else Fraction(1)
            except (ValueError, ZeroDivisionError):
                raise cls.ParseError("Bad coefficient %r in %r" % (coefficient, text))
            if op == "-":
                value = -value
            terms[name] = terms.get(name, Fraction(0)) + value
            position = match.end()
        return cls(text.strip(), {name: value for name, value in terms.items() if value})

    def __init__(self, text: str, terms: Dict[str, Fraction]) -> None:
        self.text = text
        self.terms = terms

    def __repr__(self):
        return "ClassExpression.parse(%r)" % self.text

    def __str__(self):
        return self.text
