from fractions import Fraction

from typing import List, Sequence, Tuple

import sympy


def uniq(sorted_iterable):
    last = None
    first = True
    for item in sorted_iterable:
        if not first and item == last:
            continue
        yield item
        last = item
        first = False


def sort_uniq(values, **kw):
    return uniq(sorted(values, **kw))


def radical_inverse(index: int, base: int) -> Fraction:
    """Van der Corput digit reversal of ``index`` in ``base``, as an exact fraction in [0, 1)."""
    numerator, denominator = 0, 1
    while index > 0:
        index, digit = divmod(index, base)
        numerator = numerator * base + digit
        denominator *= base
    return Fraction(numerator, denominator)


def halton_points(dimension: int, count: int, skip: int = 1) -> List[Tuple[Fraction, ...]]:
    """Deterministic low-discrepancy rational points in the open unit cube.

    Axis i uses the (i+1)-th prime as its base. Index 0 maps to the origin for every base, so
    ``skip`` defaults to 1.
    """
    bases = [int(sympy.prime(axis + 1)) for axis in range(dimension)]
    return [
        tuple(radical_inverse(index, base) for base in bases)
        for index in range(skip, skip + count)
    ]


def scaled_points(
    points: Sequence[Tuple[Fraction, ...]], scale: Fraction
) -> List[Tuple[Fraction, ...]]:
    return [tuple(scale * coordinate for coordinate in point) for point in points]
