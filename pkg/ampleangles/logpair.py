"""Boundary chains and angle-parametrized classes L - sum((1 - beta_i) C_i).

Angles are laid out as (beta_1..beta_r, eta_1..eta_h, nu_1..nu_v): the original chain
components, then exceptional curves of right tail blow-ups, then those of left tail blow-ups.
eta_0 is beta_r and nu_0 is beta_1; delta and gamma are accepted as aliases of eta and nu.
"""

from dataclasses import dataclass
import enum
from fractions import Fraction
import logging

from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .common import Rational, Serializable
from .forms import LinearForm, QuadraticForm
from .lattice import DivisorClass, SurfaceModel

log = logging.getLogger(__name__)

RIGHT = "right"
LEFT = "left"


@dataclass(frozen=True)
class AngleLayout:
    r: int
    h: int = 0
    v: int = 0

    def __post_init__(self):
        if self.r < 1 or self.h < 0 or self.v < 0:
            raise ValueError("Invalid angle layout r=%d h=%d v=%d" % (self.r, self.h, self.v))

    @property
    def dim(self) -> int:
        return self.r + self.h + self.v

    @property
    def x(self) -> int:
        return self.h + self.v

    def beta(self, i: int) -> int:
        if not 1 <= i <= self.r:
            raise IndexError("beta_%d outside 1..%d" % (i, self.r))
        return i - 1

    def eta(self, i: int) -> int:
        if i == 0:
            return self.beta(self.r)
        if not 1 <= i <= self.h:
            raise IndexError("eta_%d outside 1..%d" % (i, self.h))
        return self.r + i - 1

    def nu(self, i: int) -> int:
        if i == 0:
            return self.beta(1)
        if not 1 <= i <= self.v:
            raise IndexError("nu_%d outside 1..%d" % (i, self.v))
        return self.r + self.h + i - 1

    delta = eta
    gamma = nu

    def names(self) -> Tuple[str, ...]:
        return (
            tuple("beta%d" % (i + 1) for i in range(self.r))
            + tuple("eta%d" % (i + 1) for i in range(self.h))
            + tuple("nu%d" % (i + 1) for i in range(self.v))
        )

    def aliases(self) -> Dict[str, str]:
        aliases = {"delta%d" % (i + 1): "eta%d" % (i + 1) for i in range(self.h)}
        aliases.update({"gamma%d" % (i + 1): "nu%d" % (i + 1) for i in range(self.v)})
        return aliases

    def index_of(self, name: str) -> int:
        name = self.aliases().get(name, name)
        try:
            return self.names().index(name)
        except ValueError:
            raise KeyError("No angle named %r in %s" % (name, self))

    def grown(self, side: str) -> "AngleLayout":
        if side == RIGHT:
            return AngleLayout(self.r, self.h + 1, self.v)
        if side == LEFT:
            return AngleLayout(self.r, self.h, self.v + 1)
        raise ValueError("Side must be %r or %r, got %r" % (RIGHT, LEFT, side))

    def serialize(self) -> Dict[str, Any]:
        return {"r": self.r, "h": self.h, "v": self.v, "names": list(self.names())}


class ChainKind(enum.Enum):
    CHAIN = "chain"
    CYCLE = "cycle"
    DISJOINT_CHAINS = "disjoint-chains"
    INVALID = "invalid"


class BoundaryChain(Serializable):
    """Labels of tracked curves on a surface, in angle-layout order."""

    class Error(Exception):
        pass

    class InvalidChain(Error):
        pass

    class NoTails(Error):
        pass

    __slots__ = ("labels", "layout")

    def __init__(self, labels: Sequence[str], layout: Optional[AngleLayout] = None) -> None:
        self.labels = tuple(labels)
        self.layout = layout or AngleLayout(len(self.labels))
        if len(self.labels) != self.layout.dim:
            raise self.InvalidChain(
                "%d components for a layout of dimension %d" % (len(self.labels), self.layout.dim)
            )
        if len(set(self.labels)) != len(self.labels):
            raise self.InvalidChain("Repeated component in %r" % (self.labels,))

    @property
    def r(self) -> int:
        return self.layout.r

    def classes(self, S: SurfaceModel) -> Tuple[DivisorClass, ...]:
        return tuple(S.curve(label) for label in self.labels)

    def total(self, S: SurfaceModel) -> DivisorClass:
        total = S.zero()
        for component in self.classes(S):
            total = total + component
        return total

    def end_label(self, side: str) -> str:
        if side == RIGHT:
            return self.labels[self.layout.eta(self.layout.h)]
        if side == LEFT:
            return self.labels[self.layout.nu(self.layout.v)]
        raise ValueError("Side must be %r or %r, got %r" % (RIGHT, LEFT, side))

    def geometric_order(self) -> Tuple[str, ...]:
        layout = self.layout
        left = [self.labels[layout.nu(j)] for j in range(layout.v, 0, -1)]
        right = [self.labels[layout.eta(i)] for i in range(1, layout.h + 1)]
        return tuple(left) + self.labels[: layout.r] + tuple(right)

    def __eq__(self, other):
        if not isinstance(other, BoundaryChain):
            return False
        return self.labels == other.labels and self.layout == other.layout

    def __hash__(self):
        return hash((self.labels, self.layout))

    def __repr__(self):
        return "BoundaryChain(%r, %r)" % (self.labels, self.layout)

    def serialize(self) -> Dict[str, Any]:
        return {"labels": list(self.labels), "layout": self.layout.serialize()}

    @classmethod
    def deserialize(cls, data: Mapping[str, Any]) -> "BoundaryChain":
        layout = data["layout"]
        return cls(data["labels"], AngleLayout(layout["r"], layout["h"], layout["v"]))


def resolve_chain(S: SurfaceModel, items: Sequence[str]) -> Tuple[SurfaceModel, BoundaryChain]:
    """Turn chain items into tracked labels, registering new curves as needed.

    An item is a tracked label (``Z``, ``E1``), ``label=expression`` or a bare class expression.
    A repeated label registers a second curve in the same class under a primed label.
    """
    labels: List[str] = []
    for item in items:
        item = item.strip()
        if "=" in item:
            label, _, expression = item.partition("=")
            label = label.strip()
            S = S.register(label, S.evaluate(expression))
        elif S.has_curve(item) and item not in labels:
            label = item
        elif S.has_curve(item):
            label = item + "'"
            while S.has_curve(label):
                label += "'"
            S = S.register(label, S.curve(item))
        else:
            label = item
            S = S.register(label, S.evaluate(item))
        labels.append(label)
    if not labels:
        raise BoundaryChain.InvalidChain("Empty boundary")
    return S, BoundaryChain(labels)


def incidence(S: SurfaceModel, C: BoundaryChain) -> List[List[Fraction]]:
    classes = C.classes(S)
    return [[S.intersect(a, b) for b in classes] for a in classes]


def adjunction_ledger(S: SurfaceModel, C: BoundaryChain) -> List[Fraction]:
    """c_i.(K_S + C) per component: 0 for interior chain components, -1 for the ends."""
    KC = S.canonical_class() + C.total(S)
    return [S.intersect(component, KC) for component in C.classes(S)]


def verify_chain(S: SurfaceModel, C: BoundaryChain) -> ChainKind:
    classes = C.classes(S)
    K = S.canonical_class()
    for label, component in zip(C.labels, classes):
        if S.intersect(component, component + K) != -2:
            log.debug("%s fails rational adjunction", label)
            return ChainKind.INVALID
    matrix = incidence(S, C)
    count = len(classes)
    neighbours: List[List[int]] = [[] for _ in range(count)]
    for i in range(count):
        for j in range(i + 1, count):
            if matrix[i][j] not in (0, 1):
                return ChainKind.INVALID
            if matrix[i][j] == 1:
                neighbours[i].append(j)
                neighbours[j].append(i)
    if any(len(adjacent) > 2 for adjacent in neighbours):
        return ChainKind.INVALID

    components = []
    seen = set()
    for start in range(count):
        if start in seen:
            continue
        stack, members = [start], []
        seen.add(start)
        while stack:
            node = stack.pop()
            members.append(node)
            for other in neighbours[node]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        components.append(members)

    cyclic = [all(len(neighbours[node]) == 2 for node in members) for members in components]
    if len(components) == 1:
        return ChainKind.CYCLE if cyclic[0] and count >= 3 else ChainKind.CHAIN
    if any(cyclic):
        return ChainKind.INVALID
    return ChainKind.DISJOINT_CHAINS


class AngleClass:
    """A class on a surface whose coordinates are affine-linear forms in the angles."""

    __slots__ = ("surface", "coords")

    def __init__(self, surface: SurfaceModel, coords: Sequence[LinearForm]) -> None:
        if len(coords) != surface.rank:
            raise SurfaceModel.DimensionMismatch(
                "%d coordinates for rank %d surface" % (len(coords), surface.rank)
            )
        self.surface = surface
        self.coords = tuple(coords)

    @property
    def dim(self) -> int:
        return self.coords[0].dim

    def at(self, point: Sequence[Rational]) -> DivisorClass:
        return self.surface.divisor(form(point) for form in self.coords)

    def dot(self, Z: DivisorClass) -> LinearForm:
        total = LinearForm(self.dim)
        for value, form in zip(self.surface.dual(Z), self.coords):
            if value:
                total = total + form * value
        return total

    def square(self) -> QuadraticForm:
        base = self.surface.base.form()
        k = self.surface.base.rank
        total = QuadraticForm(self.dim)
        for i in range(k):
            for j in range(k):
                if base[i][j]:
                    total = total + (self.coords[i] * self.coords[j]) * Fraction(base[i][j])
        for form in self.coords[k:]:
            total = total - form * form
        return total

    def __neg__(self) -> "AngleClass":
        return AngleClass(self.surface, [-form for form in self.coords])

    def __eq__(self, other):
        if not isinstance(other, AngleClass):
            return False
        return self.surface.key == other.surface.key and self.coords == other.coords

    def __hash__(self):
        return hash((self.surface.key, self.coords))

    def __repr__(self):
        return "AngleClass(%s)" % ", ".join(str(form) for form in self.coords)

    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        generators = self.surface.generators
        parts = []
        for generator, form in zip(generators, self.coords):
            if form.is_constant and not form.constant:
                continue
            parts.append("(%s)%s" % (form.to_str(names), generator))
        return " + ".join(parts) or "0"


def angle_class(S: SurfaceModel, C: BoundaryChain, L: DivisorClass) -> AngleClass:
    """L - sum((1 - beta_i) C_i)."""
    dim = C.layout.dim
    coords = [LinearForm(dim, value) for value in L.coords]
    for index, component in enumerate(C.classes(S)):
        weight = 1 - LinearForm.variable(dim, index)
        coords = [form - weight * value for form, value in zip(coords, component.coords)]
    return AngleClass(S, coords)


def log_canonical_class(S: SurfaceModel, C: BoundaryChain) -> AngleClass:
    """K_S + sum((1 - beta_i) C_i)."""
    return -angle_class(S, C, -S.canonical_class())


def intersect_with_class(K_beta: AngleClass, Z: DivisorClass) -> LinearForm:
    return K_beta.dot(Z)


def square(K_beta: AngleClass) -> QuadraticForm:
    return K_beta.square()


def single_tail_blow_up(
    S: SurfaceModel, C: BoundaryChain, side: str
) -> Tuple[SurfaceModel, BoundaryChain]:
    """Blow up a smooth point at the right or left end of the chain; the new curve is the end."""
    end = C.end_label(side)
    after = S.blow_up(((end, 1),))
    exceptional = after.blowups[-1].label
    layout = C.layout.grown(side)
    labels = list(C.labels)
    if side == RIGHT:
        labels.insert(C.layout.r + C.layout.h, exceptional)
    else:
        labels.append(exceptional)
    log.debug("%s tail blow-up on %s -> %s", side, end, exceptional)
    return after, BoundaryChain(labels, layout)


def tail_blow_ups(
    S: SurfaceModel, C: BoundaryChain, h: int, v: int, order: Optional[str] = None
) -> Tuple[SurfaceModel, BoundaryChain]:
    """h right and v left tail blow-ups; ``order`` is a word in R/L, default all R then all L."""
    order = order if order is not None else "R" * h + "L" * v
    if order.count("R") != h or order.count("L") != v or set(order) - {"R", "L"}:
        raise ValueError("Order %r does not consist of %d R and %d L" % (order, h, v))
    for step in order:
        S, C = single_tail_blow_up(S, C, RIGHT if step == "R" else LEFT)
    return S, C


def tail_formula(
    s: SurfaceModel, c: BoundaryChain, S: SurfaceModel, C: BoundaryChain
) -> AngleClass:
    """-pi^*K_{beta,s,c} - sum((1 - eta_i + eta_{i-1}) H_i) - sum((1 - nu_j + nu_{j-1}) V_j).

    H_i and V_j are total transforms of the exceptional curves, read off the chain labels.
    """
    layout = C.layout
    dim = layout.dim
    base = -log_canonical_class(s, c)
    coords = [LinearForm(dim, form.constant, dict(form.coefficients)) for form in base.coords]
    coords += [LinearForm(dim)] * (S.rank - s.rank)

    def subtract(label: str, weight: LinearForm) -> None:
        index = S.generators.index(label)
        coords[index] = coords[index] - weight

    def angle(index: int) -> LinearForm:
        return LinearForm.variable(dim, index)

    for i in range(1, layout.h + 1):
        weight = 1 - angle(layout.eta(i)) + angle(layout.eta(i - 1))
        subtract(C.labels[layout.eta(i)], weight)
    for j in range(1, layout.v + 1):
        weight = 1 - angle(layout.nu(j)) + angle(layout.nu(j - 1))
        subtract(C.labels[layout.nu(j)], weight)
    return AngleClass(S, coords)


def verify_pullback_formula(
    s: SurfaceModel, c: BoundaryChain, h: int, v: int, order: Optional[str] = None
) -> bool:
    """Compare -K_beta computed in the lattice after h + v tail blow-ups with the closed formula."""
    if c.layout.x:
        raise BoundaryChain.InvalidChain("Base chain already carries tail angles")
    S, C = tail_blow_ups(s, c, h, v, order)
    lattice_side = -log_canonical_class(S, C)
    formula_side = tail_formula(s, c, S, C)
    agrees = lattice_side == formula_side
    if not agrees:
        log.info("tail formula mismatch for h=%d v=%d: %r != %r", h, v, lattice_side, formula_side)
    return agrees
