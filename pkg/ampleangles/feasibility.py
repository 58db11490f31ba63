"""Exact feasibility of strict linear systems, bodies of ample angles and their certificates.

Gordan's alternative for a k x m matrix A: either some x has x.A > 0 in every column, or some
y >= 0, y != 0 has A.y = 0. Both sides come back as certificates that re-verify with plain
rational arithmetic.
"""

from fractions import Fraction
import itertools
import logging
import random

from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import cdd
import sympy

from .combinatorics import halton_points, scaled_points, sort_uniq
from .common import Rational, Serializable, format_vector, parse_vector, primitive, sign
from .constraints import (
    ConstraintSystem,
    NearOriginReduction,
    Provenance,
    QuadraticVerdict,
    StrictInequality,
    classify_quadratic,
    near_origin_reduce,
)
from .forms import LinearForm
from .simplex import phase_one

log = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]
Row = Union[LinearForm, StrictInequality]


class HomogeneousSystem(Serializable):
    """Columns of ``matrix`` are strict constraints x.A_j > 0 on x in R^k.

    With ``orthant`` the k coordinate constraints x_i > 0 are appended as identity columns.
    """

    class Error(Exception):
        pass

    class DimensionMismatch(Error):
        pass

    __slots__ = ("matrix", "k", "m")

    def __init__(self, matrix: Sequence[Sequence[Rational]], orthant: bool = False) -> None:
        rows = [tuple(Fraction(entry) for entry in row) for row in matrix]
        if not rows:
            raise self.DimensionMismatch("Need at least one variable")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise self.DimensionMismatch("Ragged matrix")
        if orthant:
            size = len(rows)
            rows = [
                row + tuple(Fraction(int(i == j)) for j in range(size))
                for i, row in enumerate(rows)
            ]
        self.matrix = tuple(rows)
        self.k = len(rows)
        self.m = len(rows[0])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Rational]], k: int, orthant: bool = False):
        if any(len(column) != k for column in columns):
            raise cls.DimensionMismatch("Every column must have %d entries" % k)
        return cls([[column[i] for column in columns] for i in range(k)], orthant=orthant)

    def column(self, j: int) -> Point:
        return tuple(row[j] for row in self.matrix)

    def apply_left(self, x: Sequence[Rational]) -> Point:
        """x.A"""
        if len(x) != self.k:
            raise self.DimensionMismatch("Vector of length %d for %d rows" % (len(x), self.k))
        return tuple(
            sum((Fraction(x[i]) * self.matrix[i][j] for i in range(self.k)), Fraction(0))
            for j in range(self.m)
        )

    def apply_right(self, y: Sequence[Rational]) -> Point:
        """A.y"""
        if len(y) != self.m:
            raise self.DimensionMismatch("Vector of length %d for %d columns" % (len(y), self.m))
        return tuple(
            sum((row[j] * Fraction(y[j]) for j in range(self.m)), Fraction(0))
            for row in self.matrix
        )

    def forms(self) -> List[LinearForm]:
        return [LinearForm.of(0, self.column(j)) for j in range(self.m)]

    def serialize(self) -> Dict[str, Any]:
        return {"k": self.k, "m": self.m, "matrix": [format_vector(row) for row in self.matrix]}

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "HomogeneousSystem":
        return cls([parse_vector(row) for row in data["matrix"]])


class FeasibilityCertificate(Serializable):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"

    __slots__ = ("kind", "vector")

    def __init__(self, kind: str, vector: Sequence[Rational]) -> None:
        if kind not in (self.FEASIBLE, self.INFEASIBLE):
            raise ValueError("Unknown certificate kind %r" % kind)
        self.kind = kind
        self.vector = tuple(Fraction(value) for value in vector)

    @classmethod
    def feasible(cls, point: Sequence[Rational]) -> "FeasibilityCertificate":
        return cls(cls.FEASIBLE, point)

    @classmethod
    def infeasible(cls, dual: Sequence[Rational]) -> "FeasibilityCertificate":
        return cls(cls.INFEASIBLE, dual)

    @property
    def is_feasible(self) -> bool:
        return self.kind == self.FEASIBLE

    @property
    def point(self) -> Point:
        if not self.is_feasible:
            raise AttributeError("Infeasibility certificates carry no point")
        return self.vector

    @property
    def dual(self) -> Point:
        if self.is_feasible:
            raise AttributeError("Feasibility certificates carry no dual vector")
        return self.vector

    def verify(self, system: HomogeneousSystem) -> bool:
        try:
            if self.is_feasible:
                return all(value > 0 for value in system.apply_left(self.vector))
            return (
                all(value >= 0 for value in self.vector)
                and any(self.vector)
                and not any(system.apply_right(self.vector))
            )
        except HomogeneousSystem.DimensionMismatch:
            return False

    def __eq__(self, other):
        if not isinstance(other, FeasibilityCertificate):
            return False
        return (self.kind, self.vector) == (other.kind, other.vector)

    def __hash__(self):
        return hash((self.kind, self.vector))

    def __repr__(self):
        return "FeasibilityCertificate.%s(%s)" % (self.kind, ", ".join(format_vector(self.vector)))

    def serialize(self) -> Dict[str, Any]:
        key = "point" if self.is_feasible else "dual"
        return {"type": self.kind, key: format_vector(self.vector)}

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "FeasibilityCertificate":
        kind = data["type"]
        return cls(kind, parse_vector(data["point" if kind == cls.FEASIBLE else "dual"]))


def certificate_bundle(
    system: HomogeneousSystem, certificate: FeasibilityCertificate
) -> Dict[str, Any]:
    """A self-contained, re-verifiable record: the system and its certificate together."""
    return {"system": system.serialize(), "certificate": certificate.serialize()}


def gordan_feasible(system: HomogeneousSystem) -> FeasibilityCertificate:
    ones = (Fraction(1),) * system.k
    if all(value > 0 for value in system.apply_left(ones)):
        return FeasibilityCertificate.feasible(ones)

    # y >= 0 with A.y = 0 and sum(y) = 1
    matrix = [list(row) for row in system.matrix] + [[Fraction(1)] * system.m]
    rhs = [Fraction(0)] * system.k + [Fraction(1)]
    result = phase_one(matrix, rhs)
    if result.feasible:
        certificate = FeasibilityCertificate.infeasible(primitive(result.solution))
    else:
        # duals (u, t) satisfy u.A_j + t <= 0 with t = objective > 0, so x = -u works
        x = primitive([-value for value in result.duals[: system.k]])
        certificate = FeasibilityCertificate.feasible(x)
    if not certificate.verify(system):
        raise HomogeneousSystem.Error("Certificate failed verification: %r" % (certificate,))
    log.debug(
        "gordan %dx%d: %s after %d pivots", system.k, system.m, certificate.kind, result.pivots
    )
    return certificate


class _Row:
    __slots__ = ("form", "history")

    def __init__(self, form: LinearForm, history: frozenset) -> None:
        self.form = form
        self.history = history


def _normalized(form: LinearForm) -> LinearForm:
    """Positive rescaling making the first nonzero coefficient +-1 (constant rows: +-1 or 0)."""
    if form.coefficients:
        scale = abs(form.coefficients[0][1])
    else:
        scale = abs(form.constant) or Fraction(1)
    return form * (1 / scale)


def _prune(rows: List[_Row], eliminated: int) -> List[_Row]:
    """Drop implied rows: Chernikov's history bound, trivially true rows, and parallel rows
    dominated by one with a smaller or equal constant.

    A dominating row only replaces rows whose history contains its own.
    """
    groups: Dict[Tuple, List[Tuple[LinearForm, _Row]]] = {}
    for row in rows:
        if len(row.history) > eliminated + 1:
            continue
        normal = _normalized(row.form)
        if normal.is_constant and normal.constant > 0:
            continue
        groups.setdefault(normal.coefficients, []).append((normal, row))
    kept = []
    for key in sorted(groups):
        candidates = sorted(
            groups[key],
            key=lambda item: (item[0].constant, len(item[1].history), sorted(item[1].history)),
        )
        survivors: List[Tuple[LinearForm, _Row]] = []
        for normal, row in candidates:
            if any(
                other.constant <= normal.constant and kept_row.history <= row.history
                for other, kept_row in survivors
            ):
                continue
            survivors.append((normal, row))
        kept.extend(row for _, row in survivors)
    return kept


def _eliminate(rows: List[_Row], var: int) -> List[_Row]:
    positive, negative, untouched = [], [], []
    for row in rows:
        value = row.form.coefficient(var)
        if value > 0:
            positive.append(row)
        elif value < 0:
            negative.append(row)
        else:
            untouched.append(row)
    combined = list(untouched)
    for upper in positive:
        a = upper.form.coefficient(var)
        for lower in negative:
            b = lower.form.coefficient(var)
            form = upper.form * (-b) + lower.form * a
            combined.append(_Row(form, upper.history | lower.history))
    return combined


def fourier_motzkin_eliminate(system: Sequence[Row], var: int) -> List[Row]:
    """Project the strict system {form > 0} along one angle.

    Rows without the variable pass through; every row with a positive coefficient is paired with
    every row with a negative one. Duplicate and dominated rows are removed. A constant row with
    value <= 0 marks infeasibility. Rows may be bare forms or labeled inequalities; labeled input
    comes back labeled, each combination naming the rows it came from.
    """
    labeled = bool(system) and isinstance(system[0], StrictInequality)
    forms = [row.form if labeled else row for row in system]
    if all(not form.coefficient(var) for form in forms):
        return list(system)
    rows = [_Row(form, frozenset([i])) for i, form in enumerate(forms)]
    kept = _prune(_eliminate(rows, var), 1)
    if not labeled:
        return [row.form for row in kept]
    return [
        StrictInequality(
            row.form,
            system[min(row.history)].provenance if len(row.history) == 1 else Provenance.ELIMINATED,
            "+".join(system[i].label for i in sorted(row.history)),
        )
        for row in kept
    ]


def fm_feasible(system: Sequence[LinearForm]) -> bool:
    """Decide {form > 0} by eliminating every variable."""
    if not system:
        return True
    dim = system[0].dim
    rows = _prune([_Row(form, frozenset([i])) for i, form in enumerate(system)], 0)
    for eliminated, var in enumerate(range(dim), start=1):
        if any(row.form.is_constant and row.form.constant <= 0 for row in rows):
            return False
        rows = _prune(_eliminate(rows, var), eliminated)
        log.debug("fourier-motzkin: %d rows after eliminating variable %d", len(rows), var)
    return all(row.form.constant > 0 for row in rows)


class OriginVerdict(Serializable):
    """Whether 0 lies in the closure of a constraint system's solution set, with evidence."""

    __slots__ = ("contains", "reduction", "system", "certificate", "quadratic", "ray", "note")

    def __init__(
        self,
        contains: Optional[bool],
        reduction: NearOriginReduction,
        system: Optional[HomogeneousSystem] = None,
        certificate: Optional[FeasibilityCertificate] = None,
        quadratic: Optional[QuadraticVerdict] = None,
        ray: Optional[Point] = None,
        note: str = "",
    ) -> None:
        self.contains = contains
        self.reduction = reduction
        self.system = system
        self.certificate = certificate
        self.quadratic = quadratic
        self.ray = ray
        self.note = note

    def serialize(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "contains": self.contains,
            "reduction": self.reduction.verdict,
            "retained": [row.label for row in self.reduction.rows],
            "dropped": [row.label for row in self.reduction.dropped],
            "quadratic": None if self.quadratic is None else self.quadratic.value,
            "ray": None if self.ray is None else format_vector(self.ray),
            "note": self.note,
        }
        if self.reduction.blocking is not None:
            data["blocking"] = self.reduction.blocking.serialize()
        if self.system is not None and self.certificate is not None:
            data.update(certificate_bundle(self.system, self.certificate))
        return data


def _homogeneous_system(dim: int, rows: Sequence[StrictInequality]) -> HomogeneousSystem:
    columns = [row.form.dense() for row in rows]
    return HomogeneousSystem.from_columns(columns, dim, orthant=True)


def _ray_sign(sys: ConstraintSystem, ray: Point) -> int:
    _, c1, c2 = sys.quadratic.along_ray(ray)
    if c1:
        return sign(c1)
    return sign(c2)


PERTURBED_RAYS = 8


def _resolve_general(
    sys: ConstraintSystem, reduction: NearOriginReduction, ray: Point
) -> Tuple[Optional[bool], Optional[Point], str]:
    """Lowest-order sign of the square along feasible rays through the origin."""
    if _ray_sign(sys, ray) > 0:
        return True, ray, "quadratic positive along certificate ray"

    linear_part = sys.quadratic.linear_part
    if linear_part.coefficients:
        extra = StrictInequality(linear_part, Provenance.QUADRATIC, "quadratic-linear-part")
        system = _homogeneous_system(sys.dim, list(reduction.rows) + [extra])
        certificate = gordan_feasible(system)
        if certificate.is_feasible:
            return True, certificate.point, "quadratic linear part positive on a feasible ray"

    rows = [row.form for row in reduction.rows]
    rows += [LinearForm.variable(sys.dim, i) for i in range(sys.dim)]
    for attempt in range(1, PERTURBED_RAYS + 1):
        step = Fraction(1, 2 ** attempt)
        direction = tuple(
            value + step * Fraction(((i + attempt) % sys.dim) + 1, sys.dim)
            for i, value in enumerate(ray)
        )
        if all(form(direction) > 0 for form in rows) and _ray_sign(sys, direction) > 0:
            return True, direction, "quadratic positive along perturbed ray %d" % attempt
    detail = "undetermined: quadratic not positive along %d tried rays" % (PERTURBED_RAYS + 2)
    return None, None, detail


def origin_in_closure(sys: ConstraintSystem) -> OriginVerdict:
    reduction = near_origin_reduce(sys)
    if reduction.infeasible:
        return OriginVerdict(
            False, reduction, note="row %s has negative constant" % reduction.blocking.label
        )

    system = _homogeneous_system(sys.dim, reduction.rows)
    certificate = gordan_feasible(system)
    if not certificate.is_feasible:
        return OriginVerdict(
            False, reduction, system, certificate, note="linear part infeasible near 0"
        )

    ray = certificate.point
    note = ""
    if sys.dim == 1:
        low, high = interval(sys)
        if low is not None:
            note = "interval (%s, %s)" % (low, "inf" if high is None else high)
    if sys.quadratic is None:
        return OriginVerdict(True, reduction, system, certificate, ray=ray, note=note)

    verdict = classify_quadratic(sys.quadratic)
    if verdict is QuadraticVerdict.SUPERCRITICAL:
        return OriginVerdict(
            False, reduction, system, certificate, verdict, note="square negative at 0"
        )
    if verdict in (QuadraticVerdict.SUBCRITICAL, QuadraticVerdict.CRITICAL):
        return OriginVerdict(True, reduction, system, certificate, verdict, ray, note)
    contains, ray, detail = _resolve_general(sys, reduction, ray)
    return OriginVerdict(contains, reduction, system, certificate, verdict, ray, detail)


def strongly_asymptotic(sys: ConstraintSystem) -> bool:
    """Whether the body contains a whole cube (0, eps)^k for some eps > 0.

    Near the origin only the homogeneous rows matter, and a row a.beta > 0 holds on the whole
    cube iff a >= 0 with some a_i > 0. The square must be positive at 0 or vanish there with a
    linear part positive in every angle.
    """
    reduction = near_origin_reduce(sys)
    if reduction.infeasible:
        return False
    for row in reduction.rows:
        values = row.form.dense()
        if any(value < 0 for value in values) or not any(values):
            return False
    q = sys.quadratic
    if q is None or q.constant > 0:
        return True
    return q.constant == 0 and all(q.linear_coefficient(i) > 0 for i in range(sys.dim))


def log_positive(sys: ConstraintSystem) -> bool:
    """The system at beta = 0, i.e. L - D ample relative to the curves considered."""
    if any(row.form.constant <= 0 for row in sys.linear):
        return False
    return sys.quadratic is None or sys.quadratic.constant > 0


def nef_at_corner(sys: ConstraintSystem) -> Optional[bool]:
    """Whether (1, ..., 1) lies in the closure of the linear rows; None off the unit cube."""
    if sys.box != 1:
        return None
    corner = (Fraction(1),) * sys.dim
    return all(row.closure_holds(corner) for row in sys.linear)


def interval(sys: ConstraintSystem) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """Closure endpoints of the linear part of a one-angle system; (None, None) when empty.

    The upper end is None when unbounded.
    """
    if sys.dim != 1:
        raise ConstraintSystem.DimensionMismatch("interval() needs one angle, got %d" % sys.dim)
    low, high = None, None
    for row in sys.all_rows():
        a, c = row.form.coefficient(0), row.form.constant
        if a > 0:
            low = -c / a if low is None else max(low, -c / a)
        elif a < 0:
            high = -c / a if high is None else min(high, -c / a)
        elif c <= 0:
            return None, None
    if high is not None and low is not None and low >= high:
        return None, None
    return low, high


def hrep_matrix(sys: ConstraintSystem) -> cdd.Matrix:
    """The closure of the linear part as a cdd inequality matrix, rows [b, a] for b + a.x >= 0."""
    rows = [[row.form.constant] + list(row.form.dense()) for row in sys.all_rows()]
    matrix = cdd.Matrix(rows, number_type="fraction")
    matrix.rep_type = cdd.RepType.INEQUALITY
    return matrix


def enumerate_vertices(sys: ConstraintSystem) -> List[Point]:
    """Vertices of the closure of the linear part, by double description."""
    generators = cdd.Polyhedron(hrep_matrix(sys)).get_generators()
    vertices = []
    for i in range(generators.row_size):
        row = generators[i]
        if i in generators.lin_set or row[0] == 0:
            continue
        head = Fraction(row[0])
        vertices.append(tuple(Fraction(value) / head for value in row[1:]))
    log.debug("double description: %d generators, %d vertices", generators.row_size, len(vertices))
    return list(sort_uniq(vertices))


def active_rank(sys: ConstraintSystem, point: Sequence[Rational]) -> int:
    """Rank of the closed rows tight at ``point``."""
    tight = [list(row.form.dense()) for row in sys.all_rows() if row.form(point) == 0]
    if not tight:
        return 0
    return int(sympy.Matrix(tight).rank())


def strict_point(
    sys: ConstraintSystem,
) -> Tuple[Optional[Point], HomogeneousSystem, FeasibilityCertificate]:
    """A point of the open polyhedron, found by homogenizing with t > 0 (last coordinate)."""
    rows = sys.all_rows()
    columns = [form.dense() + (form.constant,) for form in (row.form for row in rows)]
    columns.append((Fraction(0),) * sys.dim + (Fraction(1),))
    system = HomogeneousSystem.from_columns(columns, sys.dim + 1)
    certificate = gordan_feasible(system)
    if not certificate.is_feasible:
        return None, system, certificate
    x = certificate.point
    return tuple(value / x[-1] for value in x[:-1]), system, certificate


def sample_points(sys: ConstraintSystem, count: int = 64, levels: int = 6) -> List[Point]:
    """Deterministic points of the open linear body: Halton points scaled by 1/2^j, plus the
    homogenized witness. Only points satisfying every strict linear row are kept."""
    scale = sys.box if sys.box is not None else Fraction(1)
    base = halton_points(sys.dim, count)
    candidates = []
    for level in range(levels):
        candidates.extend(scaled_points(base, scale / 2 ** level))
    witness, _, _ = strict_point(sys)
    if witness is not None:
        candidates.append(witness)
    return [point for point in candidates if sys.linear_holds(point)]


class AmpleAngleBody(Serializable):
    __slots__ = (
        "system",
        "nonempty",
        "witness",
        "emptiness",
        "vertices",
        "samples",
        "origin",
    )

    VERTEX_DIMENSION = 4

    def __init__(
        self,
        system: ConstraintSystem,
        nonempty: bool,
        witness: Optional[Point],
        emptiness: Dict[str, Any],
        vertices: Sequence[Tuple[Point, int]],
        samples: Sequence[Tuple[Point, int]],
        origin: OriginVerdict,
    ) -> None:
        self.system = system
        self.nonempty = nonempty
        self.witness = witness
        self.emptiness = emptiness
        self.vertices = tuple(vertices)
        self.samples = tuple(samples)
        self.origin = origin

    @property
    def dim(self) -> int:
        return self.system.dim

    def interval(self) -> Tuple[Optional[Fraction], Optional[Fraction]]:
        return interval(self.system) if self.nonempty else (None, None)

    def serialize(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "nonempty": self.nonempty,
            "witness": None if self.witness is None else format_vector(self.witness),
            "strict_feasibility": self.emptiness,
            "hrep": self.system.serialize(),
            "vertices": [
                {"point": format_vector(point), "quadratic_sign": s} for point, s in self.vertices
            ],
            "samples": [
                {"point": format_vector(point), "quadratic_sign": s} for point, s in self.samples
            ],
            "origin": self.origin.serialize(),
            "strongly_asymptotic": strongly_asymptotic(self.system),
            "log_positive": log_positive(self.system),
            "nef_at_corner": nef_at_corner(self.system),
        }


def _quadratic_sign(sys: ConstraintSystem, point: Point) -> int:
    return 1 if sys.quadratic is None else sign(sys.quadratic(point))


def ample_angle_body(sys: ConstraintSystem, samples: int = 64) -> AmpleAngleBody:
    witness, system, certificate = strict_point(sys)
    emptiness = certificate_bundle(system, certificate)
    origin = origin_in_closure(sys)
    if witness is None:
        log.info("body of dimension %d is empty", sys.dim)
        return AmpleAngleBody(sys, False, None, emptiness, (), (), origin)

    vertices: List[Tuple[Point, int]] = []
    cloud: List[Tuple[Point, int]] = []
    if sys.dim <= AmpleAngleBody.VERTEX_DIMENSION:
        vertices = [(point, _quadratic_sign(sys, point)) for point in enumerate_vertices(sys)]
    else:
        cloud = [(point, _quadratic_sign(sys, point)) for point in sample_points(sys, samples)]
    log.info("body of dimension %d: %d vertices, %d samples", sys.dim, len(vertices), len(cloud))
    return AmpleAngleBody(sys, True, witness, emptiness, vertices, cloud, origin)


class ConvexityResult:
    __slots__ = ("convex", "trials", "counterexample")

    def __init__(
        self, convex: bool, trials: int, counterexample: Optional[Tuple[Point, Point]] = None
    ):
        self.convex = convex
        self.trials = trials
        self.counterexample = counterexample

    def __bool__(self):
        return self.convex


def convexity_check(
    sys: ConstraintSystem,
    trials: int = 500,
    points: Optional[Sequence[Sequence[Rational]]] = None,
    seed: int = 0,
) -> ConvexityResult:
    """Midpoints of random pairs of feasible points must be feasible."""
    if points is None:
        points = sample_points(sys)
    feasible = [tuple(Fraction(v) for v in point) for point in points]
    feasible = [point for point in feasible if sys.holds(point)]
    if len(feasible) < 2:
        return ConvexityResult(True, 0)
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(len(feasible)), 2))
    if len(pairs) > trials:
        pairs = rng.sample(pairs, trials)
    for i, j in pairs:
        a, b = feasible[i], feasible[j]
        midpoint = tuple((u + w) / 2 for u, w in zip(a, b))
        if not sys.holds(midpoint):
            log.info("convexity counterexample %s / %s", format_vector(a), format_vector(b))
            return ConvexityResult(False, len(pairs), (a, b))
    return ConvexityResult(True, len(pairs))
