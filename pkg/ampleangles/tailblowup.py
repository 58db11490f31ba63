"""Tail blow-up sequences: construction, the block LP matrix, budgets and verdicts.

Starting from a chain pair (s, c = c_1 + ... + c_r), h blow-ups are made at smooth points of the
right end and v at smooth points of the left end, each new exceptional curve becoming the new
end. The pair stays asymptotically log Fano iff x = h + v does not exceed (K_s + c)^2 and the
origin lies in the closure of the resulting Nakai-Moishezon system.
"""

from dataclasses import dataclass
import enum
from fractions import Fraction
import logging

from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .common import Serializable, format_rational
from .constraints import (
    ConstraintSystem,
    StrictInequality,
    build_system,
    classify_quadratic,
    near_origin_reduce,
)
from .feasibility import (
    FeasibilityCertificate,
    HomogeneousSystem,
    certificate_bundle,
    gordan_feasible,
    origin_in_closure,
)
from .lattice import DivisorClass, SurfaceModel, make_hirzebruch
from .logpair import BoundaryChain, ChainKind, tail_blow_ups, verify_chain

log = logging.getLogger(__name__)


class TailVerdict(enum.Enum):
    NOT_ALF_BUDGET = "NotALF_Budget"
    NOT_ALF_LP = "NotALF_LP"
    ALF_MODULO_CURVES = "ALF_ModuloCurves"
    ALF_VERIFIED = "ALF_Verified"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class TailSequenceSpec:
    surface: SurfaceModel
    chain: BoundaryChain
    h: int = 0
    v: int = 0
    order: Optional[str] = None

    class Error(Exception):
        pass

    class InvalidSpec(Error):
        pass

    @property
    def x(self) -> int:
        return self.h + self.v

    @property
    def word(self) -> str:
        return self.order if self.order is not None else "R" * self.h + "L" * self.v

    def validate(self) -> ChainKind:
        for name in ("h", "v"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise self.InvalidSpec("%s must be a nonnegative integer, got %r" % (name, value))
        if self.chain.layout.x:
            raise self.InvalidSpec("Base chain must not carry tail angles")
        word = self.word
        if set(word) - {"R", "L"} or word.count("R") != self.h or word.count("L") != self.v:
            raise self.InvalidSpec("Order %r does not match h=%d v=%d" % (word, self.h, self.v))
        kind = verify_chain(self.surface, self.chain)
        if kind is ChainKind.CYCLE:
            raise BoundaryChain.NoTails("Boundary is a cycle; there are no tails")
        if kind is ChainKind.INVALID:
            raise self.InvalidSpec("Boundary is not a chain of smooth rational curves")
        return kind

    def serialize(self) -> Dict[str, Any]:
        return {
            "surface": self.surface.serialize(),
            "chain": self.chain.serialize(),
            "h": self.h,
            "v": self.v,
            "order": self.word,
        }


def apply_tail_sequence(spec: TailSequenceSpec) -> Tuple[SurfaceModel, BoundaryChain]:
    spec.validate()
    S, C = tail_blow_ups(spec.surface, spec.chain, spec.h, spec.v, spec.word)
    if verify_chain(S, C) is ChainKind.INVALID:
        raise spec.InvalidSpec("Tail blow-ups produced an invalid boundary")
    return S, C


def budget(S: SurfaceModel, C: BoundaryChain) -> Fraction:
    """(K_S + C)^2."""
    KC = S.canonical_class() + C.total(S)
    return S.intersect(KC, KC)


def self_intersections(S: SurfaceModel, C: BoundaryChain) -> Tuple[Fraction, Fraction]:
    """(c_1^2, c_r^2) of the original chain ends."""
    first, last = S.curve(C.labels[0]), S.curve(C.labels[C.layout.r - 1])
    return S.intersect(first, first), S.intersect(last, last)


def standard_chain(n: int, r: int = 2) -> Tuple[SurfaceModel, BoundaryChain]:
    """Chains of length 1..4 on F_n built from the section Z, a fiber F and S = Z + nF.

    r=4 blows up the point where F meets S, giving Z, F~, E1, S~.
    """
    surface = make_hirzebruch(n)
    if r == 1:
        return surface, BoundaryChain(["Z"])
    if r == 2:
        return surface, BoundaryChain(["Z", "F"])
    surface = surface.register("S", surface.evaluate("Z+%dF" % n))
    if r == 3:
        return surface, BoundaryChain(["Z", "F", "S"])
    if r == 4:
        surface = surface.blow_up((("F", 1), ("S", 1)))
        return surface, BoundaryChain(["Z", "F", "E1", "S"])
    raise ValueError("Standard chains have length 1 to 4, got %d" % r)


class BlockLPMatrix(Serializable):
    """The (r+h+v) x (r+2h+2v) integer matrix of the near-origin tail system.

    Rows are the angles (beta, eta, nu); columns are, in order, v_r (when h > 0), v_1 (when
    v > 0), the h-1 right and v-1 left second-difference columns, then the identity block.
    """

    class Error(Exception):
        pass

    class InvalidShape(Error):
        pass

    __slots__ = ("r", "h", "v", "tags", "entries")

    def __init__(
        self, r: int, h: int, v: int, tags: Sequence[str], entries: Sequence[Sequence[int]]
    ):
        self.r, self.h, self.v = r, h, v
        self.tags = tuple(tags)
        self.entries = tuple(tuple(Fraction(value) for value in row) for row in entries)
        width = len(self.tags)
        if len(self.entries) != r + h + v or any(len(row) != width for row in self.entries):
            raise self.InvalidShape("Entries do not match a %dx%d layout" % (r + h + v, width))

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.entries), len(self.tags)

    def column(self, tag: str) -> Tuple[Fraction, ...]:
        j = self.tags.index(tag)
        return tuple(row[j] for row in self.entries)

    def block_columns(self) -> List[str]:
        return [tag for tag in self.tags if not tag.startswith("I:")]

    def homogeneous_system(self) -> HomogeneousSystem:
        return HomogeneousSystem(self.entries)

    def __add__(self, other: "BlockLPMatrix") -> "BlockLPMatrix":
        if self.tags != other.tags or self.shape != other.shape:
            raise self.InvalidShape("Cannot add matrices with different layouts")
        entries = [[a + b for a, b in zip(x, y)] for x, y in zip(self.entries, other.entries)]
        return BlockLPMatrix(self.r, self.h, self.v, self.tags, entries)

    def __eq__(self, other):
        if not isinstance(other, BlockLPMatrix):
            return False
        return (self.tags, self.entries) == (other.tags, other.entries)

    def __hash__(self):
        return hash((self.tags, self.entries))

    def __repr__(self):
        return "BlockLPMatrix(r=%d, h=%d, v=%d, shape=%r)" % (self.r, self.h, self.v, self.shape)

    def to_text(self) -> str:
        width = max(len(format_rational(value)) for row in self.entries for value in row) + 1
        header = " ".join(tag.rjust(width) for tag in self.tags)
        body = [
            " ".join(format_rational(value).rjust(width) for value in row) for row in self.entries
        ]
        return "\n".join([header] + body)

    def serialize(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "h": self.h,
            "v": self.v,
            "columns": list(self.tags),
            "entries": [[format_rational(value) for value in row] for row in self.entries],
        }


def _layout_tags(r: int, h: int, v: int) -> List[str]:
    tags = []
    if h > 0:
        tags.append("v_r")
    if v > 0:
        tags.append("v_1")
    tags += ["T_h:%d" % j for j in range(1, h)]
    tags += ["T_v:%d" % j for j in range(1, v)]
    tags += ["I:%d" % (i + 1) for i in range(r + h + v)]
    return tags


def build_block_lp_matrix(r: int, h: int, v: int, c1_sq: int, cr_sq: int) -> BlockLPMatrix:
    if r < 1 or h < 0 or v < 0:
        raise BlockLPMatrix.InvalidShape("Need r >= 1 and h, v >= 0, got %d, %d, %d" % (r, h, v))
    if h + v == 0:
        raise BlockLPMatrix.InvalidShape("No tail blow-ups: the matrix is empty")
    size = r + h + v
    columns: Dict[str, List[int]] = {}

    def eta_row(i: int) -> int:
        return r - 1 if i == 0 else r + i - 1

    def nu_row(i: int) -> int:
        return 0 if i == 0 else r + h + i - 1

    if h > 0:
        column = [0] * size
        column[r - 1] += cr_sq - 1
        column[eta_row(1)] += 1
        columns["v_r"] = column
    if v > 0:
        column = [0] * size
        column[0] += c1_sq - 1
        column[nu_row(1)] += 1
        columns["v_1"] = column
    for j in range(1, h):
        column = [0] * size
        column[eta_row(j - 1)] += 1
        column[eta_row(j)] -= 2
        column[eta_row(j + 1)] += 1
        columns["T_h:%d" % j] = column
    for j in range(1, v):
        column = [0] * size
        column[nu_row(j - 1)] += 1
        column[nu_row(j)] -= 2
        column[nu_row(j + 1)] += 1
        columns["T_v:%d" % j] = column
    for i in range(size):
        columns["I:%d" % (i + 1)] = [int(i == k) for k in range(size)]

    tags = _layout_tags(r, h, v)
    entries = [[columns[tag][i] for tag in tags] for i in range(size)]
    return BlockLPMatrix(r, h, v, tags, entries)


def neighbour_correction(r: int, h: int, v: int) -> BlockLPMatrix:
    """Lattice rows minus closed-form rows: the old tail rows also carry their chain neighbour.

    K_beta.c_r picks up beta_{r-1} and K_beta.c_1 picks up beta_2 once r >= 2.
    """
    tags = _layout_tags(r, h, v)
    entries = [[0] * len(tags) for _ in range(r + h + v)]
    if r >= 2:
        if h > 0:
            entries[r - 2][tags.index("v_r")] += 1
        if v > 0:
            entries[1][tags.index("v_1")] += 1
    return BlockLPMatrix(r, h, v, tags, entries)


def build_tilde_lp(
    S: SurfaceModel, C: BoundaryChain, box: Optional[Fraction] = 1
) -> ConstraintSystem:
    """Boundary rows only: L_beta.C_i > 0 for every component, L = -K_S."""
    return build_system(S, C, box=box, catalog=False, quadratic=False)


class DerivedLP:
    """Near-origin boundary rows of a tail pair, arranged in the block layout."""

    __slots__ = ("matrix", "interior", "unmatched")

    def __init__(
        self,
        matrix: BlockLPMatrix,
        interior: Sequence[StrictInequality],
        unmatched: Sequence[StrictInequality],
    ) -> None:
        self.matrix = matrix
        self.interior = tuple(interior)
        self.unmatched = tuple(unmatched)


def _tag_for(C: BoundaryChain, label: str) -> Optional[str]:
    layout = C.layout
    index = C.labels.index(label)
    if index == layout.r - 1 and layout.h > 0:
        return "v_r"
    if index == 0 and layout.v > 0:
        return "v_1"
    if layout.r <= index < layout.r + layout.h:
        j = index - layout.r + 1
        return "T_h:%d" % j if j < layout.h else None
    if index >= layout.r + layout.h:
        j = index - layout.r - layout.h + 1
        return "T_v:%d" % j if j < layout.v else None
    return None


def derive_lp_matrix(S: SurfaceModel, C: BoundaryChain) -> DerivedLP:
    layout = C.layout
    if layout.r < 2:
        raise BlockLPMatrix.InvalidShape("A single-component chain has no block layout")
    if layout.x == 0:
        raise BlockLPMatrix.InvalidShape("No tail blow-ups: the matrix is empty")
    reduction = near_origin_reduce(build_tilde_lp(S, C))
    tags = _layout_tags(layout.r, layout.h, layout.v)
    columns: Dict[str, Tuple[Fraction, ...]] = {}
    interior, unmatched = [], []
    for row in reduction.rows:
        tag = _tag_for(C, row.label)
        if tag is None:
            index = C.labels.index(row.label)
            (interior if 0 < index < layout.r - 1 else unmatched).append(row)
        else:
            columns[tag] = row.form.dense()
    size = layout.dim
    entries = [[Fraction(0)] * len(tags) for _ in range(size)]
    for j, tag in enumerate(tags):
        if tag.startswith("I:"):
            entries[int(tag[2:]) - 1][j] = Fraction(1)
        elif tag in columns:
            for i in range(size):
                entries[i][j] = columns[tag][i]
    if reduction.infeasible:
        unmatched.append(reduction.blocking)
    matrix = BlockLPMatrix(layout.r, layout.h, layout.v, tags, entries)
    return DerivedLP(matrix, interior, unmatched)


def cross_derivation(s: SurfaceModel, c: BoundaryChain, h: int, v: int) -> bool:
    """Lattice-derived block matrix equals the closed-form one plus the neighbour correction."""
    c1_sq, cr_sq = self_intersections(s, c)
    S, C = tail_blow_ups(s, c, h, v)
    derived = derive_lp_matrix(S, C)
    expected = build_block_lp_matrix(c.layout.r, h, v, c1_sq, cr_sq) + neighbour_correction(
        c.layout.r, h, v
    )
    if derived.unmatched:
        log.info("unmatched near-origin rows: %s", [row.label for row in derived.unmatched])
        return False
    return derived.matrix == expected


def verify_tail_lp(
    r: int, h: int, v: int, c1_sq: int, cr_sq: int
) -> Tuple[bool, FeasibilityCertificate, BlockLPMatrix]:
    """Gordan on the block matrix; the feasible side certifies 0 in the closure of the tail LP."""
    matrix = build_block_lp_matrix(r, h, v, c1_sq, cr_sq)
    system = matrix.homogeneous_system()
    certificate = gordan_feasible(system)
    return certificate.is_feasible and certificate.verify(system), certificate, matrix


CurveInput = Tuple[str, Union[str, DivisorClass]]


class TailReport(Serializable):
    __slots__ = (
        "spec",
        "surface",
        "chain",
        "budget",
        "verdict",
        "quadratic",
        "origin",
        "tilde_origin",
        "base_origin",
        "block",
        "curves",
        "notes",
    )

    def __init__(self, **kw) -> None:
        for name in self.__slots__:
            setattr(self, name, kw.get(name))

    def serialize(self) -> Dict[str, Any]:
        layout = self.chain.layout if self.chain is not None else None
        return {
            "spec": self.spec.serialize(),
            "budget": format_rational(self.budget),
            "x": self.spec.x,
            "verdict": self.verdict.value,
            "quadratic": None if self.quadratic is None else self.quadratic.value,
            "angles": None if layout is None else list(layout.names()),
            "aliases": None if layout is None else layout.aliases(),
            "surface": None if self.surface is None else self.surface.serialize(),
            "chain": None if self.chain is None else self.chain.serialize(),
            "origin": None if self.origin is None else self.origin.serialize(),
            "tilde_lp": None if self.tilde_origin is None else self.tilde_origin.serialize(),
            "base": self.base_origin.serialize(),
            "block_lp": self.block,
            "curves": list(self.curves or []),
            "notes": list(self.notes or []),
        }


def _resolve_curves(
    S: SurfaceModel, curves: Sequence[CurveInput]
) -> List[Tuple[str, DivisorClass]]:
    resolved = []
    for label, value in curves:
        resolved.append((label, S.evaluate(value) if isinstance(value, str) else value))
    return resolved


def _blow_up_tails(spec: TailSequenceSpec, box: Optional[Fraction]):
    """Blown-up pair, its tilde-LP origin test and the block matrix verdict (None when x = 0)."""
    S, C = apply_tail_sequence(spec)
    tilde_origin = origin_in_closure(build_tilde_lp(S, C, box))
    block = None
    if spec.x > 0:
        c1_sq, cr_sq = self_intersections(spec.surface, spec.chain)
        r = spec.chain.layout.r
        feasible, certificate, matrix = verify_tail_lp(r, spec.h, spec.v, c1_sq, cr_sq)
        block = dict(matrix.serialize(), feasible=feasible)
        block.update(certificate_bundle(matrix.homogeneous_system(), certificate))
    return S, C, tilde_origin, block


def classify_tail(
    spec: TailSequenceSpec,
    extra_curves: Sequence[CurveInput] = (),
    curves_complete: bool = False,
    box: Optional[Fraction] = 1,
) -> TailReport:
    kind = spec.validate()
    s, c = spec.surface, spec.chain
    notes = []
    if c.layout.r == 1:
        notes.append("single-component chain: both tails are the same curve")
    base_budget = budget(s, c)
    base_origin = origin_in_closure(build_system(s, c, box=box))
    if not base_origin.contains:
        notes.append("base pair is not asymptotically log Fano for the curves considered")

    if spec.x > base_budget:
        log.info("x=%d exceeds budget %s", spec.x, format_rational(base_budget))
        S = C = tilde_origin = block = None
        if kind is ChainKind.CHAIN:
            S, C, tilde_origin, block = _blow_up_tails(spec, box)
        return TailReport(
            spec=spec,
            surface=S,
            chain=C,
            tilde_origin=tilde_origin,
            block=block,
            budget=base_budget,
            verdict=TailVerdict.NOT_ALF_BUDGET,
            base_origin=base_origin,
            curves=[],
            notes=notes + ["x exceeds (K_s + c)^2"],
        )

    S, C, tilde_origin, block = _blow_up_tails(spec, box)
    extra = _resolve_curves(S, extra_curves)
    system = build_system(S, C, curves=extra, box=box)
    origin = origin_in_closure(system)
    quadratic = classify_quadratic(system.quadratic, "tail")

    if origin.contains is None:
        verdict = TailVerdict.UNDETERMINED
    elif not origin.contains:
        verdict = TailVerdict.NOT_ALF_LP
    elif curves_complete:
        verdict = TailVerdict.ALF_VERIFIED
    else:
        verdict = TailVerdict.ALF_MODULO_CURVES
    curves = [row.label for row in system.linear]
    log.info("tail h=%d v=%d on %s: %s", spec.h, spec.v, s, verdict.value)
    return TailReport(
        spec=spec,
        surface=S,
        chain=C,
        budget=base_budget,
        verdict=verdict,
        quadratic=quadratic,
        origin=origin,
        tilde_origin=tilde_origin,
        base_origin=base_origin,
        block=block,
        curves=curves,
        notes=notes,
    )
