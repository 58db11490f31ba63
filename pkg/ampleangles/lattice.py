"""Picard lattices of the plane, Hirzebruch surfaces and their iterated blow-ups.

Classes are coordinate vectors in the basis (base generators, E1, ..., Ex) where Ek is the
total transform of the k-th exceptional curve, so the intersection form stays block diagonal.
"""

from dataclasses import dataclass
from fractions import Fraction
import logging

from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .common import ClassExpression, Rational, Serializable, format_vector, parse_vector

log = logging.getLogger(__name__)

# ((curve label, multiplicity), ...); empty means a point on no tracked curve.
CenterSpec = Tuple[Tuple[str, int], ...]


@dataclass(frozen=True)
class BaseSurface:
    kind: str
    n: int = 0

    PLANE = "plane"
    HIRZEBRUCH = "hirzebruch"

    @classmethod
    def plane(cls) -> "BaseSurface":
        return cls(cls.PLANE, 0)

    @classmethod
    def hirzebruch(cls, n: int) -> "BaseSurface":
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ValueError("Hirzebruch index must be a nonnegative integer, got %r" % (n,))
        return cls(cls.HIRZEBRUCH, n)

    @classmethod
    def parse(cls, text: str) -> "BaseSurface":
        """Parse ``P2`` or ``F<n>`` (``F_<n>`` also accepted)."""
        value = text.strip().upper().replace("_", "")
        if value in ("P2", "PP2"):
            return cls.plane()
        if value.startswith("F") and value[1:].isdigit():
            return cls.hirzebruch(int(value[1:]))
        raise ValueError("Unknown base surface %r, expected P2 or F<n>" % text)

    @property
    def generators(self) -> Tuple[str, ...]:
        return ("H",) if self.kind == self.PLANE else ("Z", "F")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def form(self) -> Tuple[Tuple[int, ...], ...]:
        if self.kind == self.PLANE:
            return ((1,),)
        return ((-self.n, 1), (1, 0))

    def canonical(self) -> Tuple[int, ...]:
        if self.kind == self.PLANE:
            return (-3,)
        return (-2, -(self.n + 2))

    def serialize(self) -> Dict[str, Any]:
        if self.kind == self.PLANE:
            return {"type": self.PLANE}
        return {"type": self.HIRZEBRUCH, "n": self.n}

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "BaseSurface":
        if data.get("type") == cls.PLANE:
            return cls.plane()
        if data.get("type") == cls.HIRZEBRUCH:
            return cls.hirzebruch(int(data["n"]))
        raise ValueError("Unknown base surface %r" % (data,))

    def __str__(self):
        return "P2" if self.kind == self.PLANE else "F%d" % self.n


@dataclass(frozen=True)
class BlowUpRecord:
    center: CenterSpec
    exceptional_index: int
    label: str

    def serialize(self) -> Dict[str, Any]:
        return {
            "on": [label for label, _ in self.center],
            "mult": [mult for _, mult in self.center],
        }


class DivisorClass(Serializable):
    """An exact rational class on a fixed surface model."""

    class Error(Exception):
        pass

    class SurfaceMismatch(Error):
        pass

    __slots__ = ("surface_key", "coords")

    def __init__(self, surface_key: Tuple, coords: Iterable[Rational]) -> None:
        self.surface_key = surface_key
        self.coords = tuple(Fraction(value) for value in coords)

    def _check(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError("Expected DivisorClass, got %s" % type(other))
        if other.surface_key != self.surface_key:
            raise self.SurfaceMismatch("Cannot combine classes living on different surfaces")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.surface_key, (a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.surface_key, (a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.surface_key, (-a for a in self.coords))

    def __mul__(self, scalar: Rational) -> "DivisorClass":
        if not isinstance(scalar, (int, Fraction)) or isinstance(scalar, bool):
            return NotImplemented
        return DivisorClass(self.surface_key, (scalar * a for a in self.coords))

    __rmul__ = __mul__

    def __len__(self):
        return len(self.coords)

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return False
        return self.surface_key == other.surface_key and self.coords == other.coords

    def __hash__(self):
        return hash((self.surface_key, self.coords))

    def __repr__(self):
        return "DivisorClass(%s)" % ", ".join(format_vector(self.coords))

    def serialize(self) -> Dict[str, Any]:
        return {"coords": format_vector(self.coords)}


class SurfaceModel(Serializable):
    """A base surface (P2 or F_n) with an ordered blow-up history and a registry of curves.

    The registry maps labels to the current classes of tracked irreducible curves: base curves
    (``Z``/``F`` or ``H``), every exceptional curve (``E1``, ``E2``, ...) and anything
    registered by the caller. Blowing up replaces each tracked class by its strict transform.
    """

    class Error(Exception):
        pass

    class InvalidCurve(Error):
        pass

    class SurfaceMismatch(Error):
        pass

    class DimensionMismatch(Error):
        pass

    __slots__ = ("base", "blowups", "curves")

    def __init__(
        self,
        base: BaseSurface,
        blowups: Sequence[BlowUpRecord] = (),
        curves: Optional[Sequence[Tuple[str, Tuple[Fraction, ...]]]] = None,
    ) -> None:
        self.base = base
        self.blowups = tuple(blowups)
        if curves is None:
            curves = [
                (name, tuple(Fraction(int(i == j)) for j in range(base.rank)))
                for i, name in enumerate(base.generators)
            ]
        self.curves = tuple((label, tuple(coords)) for label, coords in curves)

    @property
    def rank(self) -> int:
        return self.base.rank + len(self.blowups)

    @property
    def key(self) -> Tuple:
        return (self.base, self.blowups)

    @property
    def generators(self) -> Tuple[str, ...]:
        return self.base.generators + tuple("E%d" % (k + 1) for k in range(len(self.blowups)))

    def __eq__(self, other):
        if not isinstance(other, SurfaceModel):
            return False
        return self.key == other.key and self.curves == other.curves

    def __hash__(self):
        return hash((self.key, self.curves))

    def __repr__(self):
        return "SurfaceModel(%s, blowups=%d)" % (self.base, len(self.blowups))

    def __str__(self):
        if not self.blowups:
            return str(self.base)
        return "Bl_%d %s" % (len(self.blowups), self.base)

    # classes

    def divisor(self, coords: Iterable[Rational]) -> DivisorClass:
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise self.DimensionMismatch(
                "Expected %d coordinates on %s, got %d" % (self.rank, self, len(coords))
            )
        return DivisorClass(self.key, coords)

    def zero(self) -> DivisorClass:
        return self.divisor([0] * self.rank)

    def generator(self, name: str) -> DivisorClass:
        try:
            index = self.generators.index(name)
        except ValueError:
            raise self.InvalidCurve("%s has no generator %r" % (self, name))
        return self.divisor(int(i == index) for i in range(self.rank))

    def evaluate(self, expression: Union[str, ClassExpression]) -> DivisorClass:
        """Resolve a class expression over the generators; ``K`` is the canonical class."""
        if isinstance(expression, str):
            expression = ClassExpression.parse(expression)
        total = self.zero()
        for name, coefficient in expression.terms.items():
            if name == "K":
                total = total + coefficient * self.canonical_class()
            else:
                total = total + coefficient * self.generator(name)
        return total

    def gram(self) -> List[List[Fraction]]:
        matrix = [[Fraction(0)] * self.rank for _ in range(self.rank)]
        for i, row in enumerate(self.base.form()):
            for j, value in enumerate(row):
                matrix[i][j] = Fraction(value)
        for k in range(self.base.rank, self.rank):
            matrix[k][k] = Fraction(-1)
        return matrix

    def dual(self, D: DivisorClass) -> Tuple[Fraction, ...]:
        """The functional A -> A.D as a coordinate vector."""
        self._own(D)
        base = self.base.form()
        head = tuple(
            sum((Fraction(base[i][j]) * D.coords[j] for j in range(self.base.rank)), Fraction(0))
            for i in range(self.base.rank)
        )
        return head + tuple(-value for value in D.coords[self.base.rank :])

    def intersect(self, A: DivisorClass, B: DivisorClass) -> Fraction:
        self._own(A)
        return sum((a * b for a, b in zip(A.coords, self.dual(B))), Fraction(0))

    def canonical_class(self) -> DivisorClass:
        return self.divisor(self.base.canonical() + (1,) * len(self.blowups))

    def _own(self, D: DivisorClass) -> None:
        if not isinstance(D, DivisorClass):
            raise TypeError("Expected DivisorClass, got %s" % type(D))
        if len(D.coords) != self.rank:
            raise self.DimensionMismatch(
                "Class of length %d does not live on rank %d surface %s"
                % (len(D.coords), self.rank, self)
            )
        if D.surface_key != self.key:
            raise self.SurfaceMismatch("Class does not belong to %s" % self)

    # curve registry

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.curves)

    def has_curve(self, label: str) -> bool:
        return label in self.labels

    def curve(self, label: str) -> DivisorClass:
        for name, coords in self.curves:
            if name == label:
                return self.divisor(coords)
        raise self.InvalidCurve(
            "No curve %r on %s (known: %s)" % (label, self, ", ".join(self.labels))
        )

    def register(self, label: str, D: DivisorClass) -> "SurfaceModel":
        self._own(D)
        if self.has_curve(label):
            raise self.InvalidCurve("Curve %r already registered on %s" % (label, self))
        return SurfaceModel(self.base, self.blowups, self.curves + ((label, D.coords),))

    def validate_center(self, center: CenterSpec) -> CenterSpec:
        center = tuple((label, mult) for label, mult in center)
        labels = [label for label, _ in center]
        if len(set(labels)) != len(labels):
            raise self.InvalidCurve("Repeated curve in blow-up center %r" % (center,))
        for label, mult in center:
            if not isinstance(mult, int) or mult < 1:
                raise self.InvalidCurve("Multiplicity of %r must be a positive integer" % label)
            self.curve(label)
        for i, (first, _) in enumerate(center):
            for second, _ in center[i + 1 :]:
                if self.intersect(self.curve(first), self.curve(second)) <= 0:
                    raise self.InvalidCurve("Curves %r and %r do not meet" % (first, second))
        return center

    # birational operations

    def blow_up(self, center: CenterSpec = ()) -> "SurfaceModel":
        center = self.validate_center(center)
        index = self.rank
        label = "E%d" % (len(self.blowups) + 1)
        if self.has_curve(label):
            raise self.InvalidCurve("Label %r is taken by another curve" % label)
        multiplicity = dict(center)
        curves = [
            (name, coords + (Fraction(-multiplicity.get(name, 0)),)) for name, coords in self.curves
        ]
        curves.append((label, tuple(Fraction(int(i == index)) for i in range(index + 1))))
        record = BlowUpRecord(center=center, exceptional_index=index, label=label)
        log.debug("blow up %s at %r -> %s", self, center, label)
        return SurfaceModel(self.base, self.blowups + (record,), curves)

    def is_ancestor_key(self, key: Tuple) -> bool:
        base, blowups = key
        return base == self.base and self.blowups[: len(blowups)] == blowups

    def pullback(self, D: DivisorClass) -> DivisorClass:
        """Total transform of a class living on any earlier model of this blow-up history."""
        if not isinstance(D, DivisorClass):
            raise TypeError("Expected DivisorClass, got %s" % type(D))
        if not self.is_ancestor_key(D.surface_key) or len(D.surface_key[1]) == len(self.blowups):
            raise self.DimensionMismatch("Class does not live on an earlier model of %s" % self)
        if len(D.coords) != self.base.rank + len(D.surface_key[1]):
            raise self.DimensionMismatch("Malformed class of length %d" % len(D.coords))
        return self.divisor(D.coords + (Fraction(0),) * (self.rank - len(D.coords)))

    def strict_transform(self, D: DivisorClass, mult: int) -> DivisorClass:
        """pullback(D) - mult * E for the last blow-up.

        ``mult`` is the multiplicity of the blown-up point on D.
        """
        if not isinstance(mult, int) or mult < 0:
            raise ValueError("Multiplicity must be a nonnegative integer, got %r" % (mult,))
        if not self.blowups:
            raise self.DimensionMismatch("%s has no blow-up to transform through" % self)
        if len(D.surface_key[1]) != len(self.blowups) - 1:
            raise self.DimensionMismatch("Class must live on the model before the last blow-up")
        return self.pullback(D) - mult * self.generator(self.blowups[-1].label)

    def serialize(self) -> Dict[str, Any]:
        return {
            "base": self.base.serialize(),
            "blowups": [record.serialize() for record in self.blowups],
            "curves": [
                {"label": label, "coords": format_vector(coords)} for label, coords in self.curves
            ],
        }

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "SurfaceModel":
        base = BaseSurface.deserialize(data["base"])
        surface = cls(base)
        curves = {entry["label"]: parse_vector(entry["coords"]) for entry in data.get("curves", [])}
        for entry in data.get("blowups", []):
            center = tuple(zip(entry.get("on", []), (int(m) for m in entry.get("mult", []))))
            for label, _ in center:
                if not surface.has_curve(label) and label in curves:
                    coords = curves[label][: surface.rank]
                    surface = surface.register(label, surface.divisor(coords))
            surface = surface.blow_up(center)
        if curves:
            surface = cls(base, surface.blowups, list(curves.items()))
            for _, coords in surface.curves:
                if len(coords) != surface.rank:
                    raise cls.DimensionMismatch(
                        "Curve of length %d on rank %d" % (len(coords), surface.rank)
                    )
        return surface


def make_hirzebruch(n: int) -> SurfaceModel:
    return SurfaceModel(BaseSurface.hirzebruch(n))


def make_projective_plane() -> SurfaceModel:
    return SurfaceModel(BaseSurface.plane())


def intersect(S: SurfaceModel, A: DivisorClass, B: DivisorClass) -> Fraction:
    return S.intersect(A, B)


def canonical_class(S: SurfaceModel) -> DivisorClass:
    return S.canonical_class()


def blow_up(S: SurfaceModel, center: CenterSpec = ()) -> SurfaceModel:
    return S.blow_up(center)


def pullback(S_after: SurfaceModel, D: DivisorClass) -> DivisorClass:
    return S_after.pullback(D)


def strict_transform(S_after: SurfaceModel, D: DivisorClass, mult: int) -> DivisorClass:
    return S_after.strict_transform(D, mult)


def parse_center(text: str) -> CenterSpec:
    """Parse a blow-up center.

    ``-`` is a point on no tracked curve, ``Z&F`` the point where Z meets F and ``Z:2`` a point
    of multiplicity 2 on Z.
    """
    text = text.strip()
    if text in ("", "-"):
        return ()
    center = []
    for item in text.split("&"):
        label, _, mult = item.strip().partition(":")
        if not label:
            raise ValueError("Empty curve label in center %r" % text)
        try:
            center.append((label.strip(), int(mult) if mult else 1))
        except ValueError:
            raise ValueError("Bad multiplicity in center %r" % text)
    return tuple(center)
