"""Nakai-Moishezon constraint systems in the angles.

Every row is stored in positivity orientation: the class L_beta = L - sum((1 - beta_i) C_i) is
ample (relative to the curves considered) iff every linear row is > 0 and the square is > 0.
"""

from dataclasses import dataclass
import enum
from fractions import Fraction
import logging

from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .common import Rational, Serializable, format_rational, to_rational
from .forms import LinearForm, QuadraticForm
from .lattice import BaseSurface, DivisorClass, SurfaceModel
from .logpair import BoundaryChain, angle_class

log = logging.getLogger(__name__)

LabeledCurve = Tuple[str, DivisorClass]


class Provenance:
    BOUNDARY = "boundary"
    EXCEPTIONAL = "exceptional"
    CATALOG = "catalog"
    CURVE = "user-curve"
    UNIT_CUBE = "unit-cube"
    ORTHANT = "orthant"
    QUADRATIC = "quadratic-linear-part"
    ELIMINATED = "eliminated"


@dataclass(frozen=True)
class StrictInequality:
    form: LinearForm
    provenance: str
    label: str = ""

    def holds(self, point: Sequence[Rational]) -> bool:
        return self.form(point) > 0

    def closure_holds(self, point: Sequence[Rational]) -> bool:
        return self.form(point) >= 0

    def serialize(self) -> Dict[str, Any]:
        return {"form": self.form.serialize(), "provenance": self.provenance, "label": self.label}

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "StrictInequality":
        return cls(LinearForm.deserialize(data["form"]), data["provenance"], data.get("label", ""))


class QuadraticVerdict(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    GENERAL = "general"


class ConstraintSystem(Serializable):
    """Strict linear rows plus an optional quadratic row, all meaning ``> 0``.

    ``box`` bounds every angle from above (1 is the unit cube); None leaves the open positive
    orthant. Orthant and box rows are implied and kept out of ``linear``.
    """

    class Error(Exception):
        pass

    class DimensionMismatch(Error):
        pass

    __slots__ = ("dim", "linear", "quadratic", "box", "names")

    def __init__(
        self,
        dim: int,
        linear: Sequence[StrictInequality] = (),
        quadratic: Optional[QuadraticForm] = None,
        box: Optional[Rational] = 1,
        names: Optional[Sequence[str]] = None,
    ) -> None:
        if dim < 1:
            raise self.DimensionMismatch("Angle dimension must be positive, got %d" % dim)
        self.dim = dim
        self.linear = tuple(linear)
        self.quadratic = quadratic
        self.box = None if box is None else Fraction(box)
        if self.box is not None and self.box <= 0:
            raise ValueError("Box bound must be positive, got %s" % format_rational(self.box))
        if names is None:
            names = ["b%d" % (i + 1) for i in range(dim)]
        self.names = tuple(names)
        for row in self.linear:
            if row.form.dim != dim:
                raise self.DimensionMismatch(
                    "Row %r has dimension %d, system has %d" % (row.label, row.form.dim, dim)
                )
        if quadratic is not None and quadratic.dim != dim:
            raise self.DimensionMismatch(
                "Quadratic of dimension %d in a %d system" % (quadratic.dim, dim)
            )
        if len(self.names) != dim:
            raise self.DimensionMismatch("%d names for dimension %d" % (len(self.names), dim))

    @classmethod
    def of(cls, rows: Sequence[LinearForm], **kw) -> "ConstraintSystem":
        """Build from bare forms; mostly for tests and corpora."""
        if not rows:
            raise cls.DimensionMismatch("Need at least one row to infer the dimension")
        linear = [
            StrictInequality(form, Provenance.CURVE, "row%d" % (i + 1))
            for i, form in enumerate(rows)
        ]
        return cls(rows[0].dim, linear, **kw)

    def orthant_rows(self) -> List[StrictInequality]:
        return [
            StrictInequality(LinearForm.variable(self.dim, i), Provenance.ORTHANT, self.names[i])
            for i in range(self.dim)
        ]

    def box_rows(self) -> List[StrictInequality]:
        if self.box is None:
            return []
        return [
            StrictInequality(
                self.box - LinearForm.variable(self.dim, i), Provenance.UNIT_CUBE, self.names[i]
            )
            for i in range(self.dim)
        ]

    def all_rows(self) -> List[StrictInequality]:
        return list(self.linear) + self.orthant_rows() + self.box_rows()

    def linear_holds(self, point: Sequence[Rational]) -> bool:
        return all(row.holds(point) for row in self.all_rows())

    def holds(self, point: Sequence[Rational]) -> bool:
        if not self.linear_holds(point):
            return False
        return self.quadratic is None or self.quadratic(point) > 0

    def replace(self, **kw) -> "ConstraintSystem":
        values = dict(
            dim=self.dim,
            linear=self.linear,
            quadratic=self.quadratic,
            box=self.box,
            names=self.names,
        )
        values.update(kw)
        return ConstraintSystem(**values)

    def to_hrep(self) -> str:
        """One ``c a_1 ... a_k > 0`` line per row, box and orthant rows included."""
        lines = []
        for row in self.all_rows():
            values = [row.form.constant] + list(row.form.dense())
            lines.append(" ".join(format_rational(value) for value in values) + " > 0")
        return "\n".join(lines) + "\n"

    def serialize(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "names": list(self.names),
            "box": None if self.box is None else format_rational(self.box),
            "linear": [row.serialize() for row in self.linear],
            "quadratic": None if self.quadratic is None else self.quadratic.serialize(),
        }

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "ConstraintSystem":
        return cls(
            int(data["dim"]),
            [StrictInequality.deserialize(row) for row in data.get("linear", [])],
            None if data.get("quadratic") is None else QuadraticForm.deserialize(data["quadratic"]),
            None if data.get("box") is None else to_rational(data["box"]),
            data.get("names"),
        )


def _positivity_class(S: SurfaceModel, C: BoundaryChain, L: Optional[DivisorClass]):
    return angle_class(S, C, -S.canonical_class() if L is None else L)


def boundary_constraints(
    S: SurfaceModel, C: BoundaryChain, L: Optional[DivisorClass] = None, sign: int = 1
) -> List[StrictInequality]:
    """sign * L_beta . C_i > 0 for every boundary component; L defaults to -K_S."""
    L_beta = _positivity_class(S, C, L)
    rows = []
    for index, (label, component) in enumerate(zip(C.labels, C.classes(S))):
        provenance = Provenance.BOUNDARY if index < C.layout.r else Provenance.EXCEPTIONAL
        rows.append(StrictInequality(L_beta.dot(component) * sign, provenance, label))
    return rows


def curve_constraints(
    S: SurfaceModel,
    C: BoundaryChain,
    curves: Sequence[LabeledCurve],
    L: Optional[DivisorClass] = None,
    sign: int = 1,
    provenance: str = Provenance.CURVE,
) -> List[StrictInequality]:
    L_beta = _positivity_class(S, C, L)
    return [
        StrictInequality(L_beta.dot(curve) * sign, provenance, label) for label, curve in curves
    ]


def catalog_curves(S: SurfaceModel, C: BoundaryChain) -> List[LabeledCurve]:
    """Built-in curves checked besides the boundary.

    Tracked curves off the boundary, the generic fiber (F_n) or line (P2), and for every blow-up
    centered at a point of the base surface the fiber or line through that point. A fiber is
    skipped when a tracked fiber-class curve already passes through the point. Curves through a
    point are taken in general position with respect to later blow-ups.
    """
    boundary = set(C.labels)
    curves: List[LabeledCurve] = [
        ("tracked:%s" % label, S.curve(label)) for label in S.labels if label not in boundary
    ]
    plane = S.base.kind == BaseSurface.PLANE
    generic = "H" if plane else "F"
    curves.append(("generic:%s" % generic, S.generator(generic)))

    exceptional = {record.label for record in S.blowups}
    fiber = tuple(Fraction(value) for value in (0, 1))
    for record in S.blowups:
        on = [label for label, _ in record.center]
        if any(label in exceptional for label in on):
            continue
        if not plane and any(S.curve(label).coords[:2] == fiber for label in on):
            continue
        through = S.generator(generic) - S.generator(record.label)
        curves.append(("%s-through-%s" % (generic, record.label), through))

    seen = set()
    unique = []
    for label, curve in curves:
        if curve.coords in seen:
            continue
        seen.add(curve.coords)
        unique.append((label, curve))
    return unique


def quadratic_constraint(
    S: SurfaceModel, C: BoundaryChain, L: Optional[DivisorClass] = None
) -> QuadraticForm:
    return _positivity_class(S, C, L).square()


def build_system(
    S: SurfaceModel,
    C: BoundaryChain,
    curves: Sequence[LabeledCurve] = (),
    L: Optional[DivisorClass] = None,
    sign: int = 1,
    box: Optional[Rational] = 1,
    catalog: bool = True,
    quadratic: bool = True,
) -> ConstraintSystem:
    """Boundary rows, catalog rows, caller curves and the square, in that order.

    ``sign=-1`` gives the anti-ample variant: linear rows flip, the square is kept.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be 1 or -1, got %r" % (sign,))
    rows = boundary_constraints(S, C, L, sign)
    if catalog:
        rows += curve_constraints(S, C, catalog_curves(S, C), L, sign, Provenance.CATALOG)
    rows += curve_constraints(S, C, curves, L, sign)
    q = quadratic_constraint(S, C, L) if quadratic else None
    return ConstraintSystem(C.layout.dim, rows, q, box, C.layout.names())


def classify_quadratic(q: QuadraticForm, context: str = "general") -> QuadraticVerdict:
    if q.constant > 0:
        verdict = QuadraticVerdict.SUBCRITICAL
    elif q.constant < 0:
        verdict = QuadraticVerdict.SUPERCRITICAL
    else:
        values = [value for _, value in q.linear]
        if values and all(value > 0 for value in values):
            verdict = QuadraticVerdict.CRITICAL
        else:
            verdict = QuadraticVerdict.GENERAL
    if verdict is QuadraticVerdict.GENERAL and context == "tail":
        log.warning("tail quadratic %s falls outside the trichotomy", q)
    return verdict


class NearOriginReduction:
    REDUCED = "reduced"
    INFEASIBLE = "infeasible"

    __slots__ = ("verdict", "rows", "dropped", "blocking")

    def __init__(
        self,
        verdict: str,
        rows: Sequence[StrictInequality],
        dropped: Sequence[StrictInequality],
        blocking: Optional[StrictInequality] = None,
    ) -> None:
        self.verdict = verdict
        self.rows = tuple(rows)
        self.dropped = tuple(dropped)
        self.blocking = blocking

    @property
    def infeasible(self) -> bool:
        return self.verdict == self.INFEASIBLE

    def matrix(self, dim: int) -> List[List[Fraction]]:
        """Columns are the retained rows: entry [i][j] is the beta_i coefficient of row j."""
        return [[row.form.coefficient(i) for row in self.rows] for i in range(dim)]


def near_origin_reduce(sys: ConstraintSystem) -> NearOriginReduction:
    """Drop rows with positive constant, fail on a negative constant, keep the homogeneous rest."""
    kept, dropped = [], []
    for row in sys.linear:
        if row.form.constant > 0:
            dropped.append(row)
        elif row.form.constant < 0:
            log.debug("row %s has negative constant; infeasible near the origin", row.label)
            return NearOriginReduction(NearOriginReduction.INFEASIBLE, kept, dropped, row)
        else:
            kept.append(row)
    return NearOriginReduction(NearOriginReduction.REDUCED, kept, dropped)
