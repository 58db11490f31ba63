"""Named self-checks behind ``ampleangles verify``.

Each check recomputes a known identity with exact arithmetic and reports the statement it
exercises. ``quick`` shrinks the grids so the whole suite runs in a few seconds.
"""

from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
import itertools
import logging
import math
import random

from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from .common import format_rational, format_vector
from .constraints import (
    ConstraintSystem,
    QuadraticVerdict,
    build_system,
    classify_quadratic,
)
from .feasibility import (
    HomogeneousSystem,
    active_rank,
    ample_angle_body,
    convexity_check,
    fm_feasible,
    fourier_motzkin_eliminate,
    gordan_feasible,
    interval,
    origin_in_closure,
    strict_point,
)
from .forms import LinearForm
from .lattice import make_hirzebruch, make_projective_plane
from .logpair import (
    BoundaryChain,
    ChainKind,
    adjunction_ledger,
    tail_blow_ups,
    verify_chain,
    verify_pullback_formula,
)
from .tailblowup import (
    TailSequenceSpec,
    TailVerdict,
    budget,
    classify_tail,
    cross_derivation,
    standard_chain,
    verify_tail_lp,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    passed: bool
    detail: str = ""

    def serialize(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "passed": self.passed,
            "detail": self.detail,
        }


def _tail_cells(n_values, r_values, max_x, min_x=0) -> Iterator[Tuple[int, int, int, int]]:
    for n in n_values:
        for r in r_values:
            for x in range(min_x, max_x + 1):
                for h in range(x, -1, -1):
                    yield n, r, h, x - h


def hirzebruch_system(n: int) -> ConstraintSystem:
    """(F_n, -K, Z): one angle, open orthant."""
    return build_system(make_hirzebruch(n), BoundaryChain(["Z"]), box=None)


def blown_up_plane_system() -> ConstraintSystem:
    """(Bl_p P2, pi^*H, E1)."""
    S = make_projective_plane().blow_up()
    return build_system(S, BoundaryChain(["E1"]), L=S.generator("H"))


def _vertices_sound(sys: ConstraintSystem) -> Optional[str]:
    body = ample_angle_body(sys)
    for point, _ in body.vertices:
        if not all(row.closure_holds(point) for row in sys.all_rows()):
            return "vertex %s violates a closed row" % format_vector(point)
        if active_rank(sys, point) != sys.dim:
            return "vertex %s is not tight on %d rows" % (format_vector(point), sys.dim)
    return None


def check_hirzebruch(quick: bool = False) -> str:
    for n in range(1, 4 if quick else 11):
        sys = hirzebruch_system(n)
        low, high = interval(sys)
        if (low, high) != (0, Fraction(2, n)):
            raise AssertionError("F_%d: interval (%s, %s)" % (n, low, high))
        problem = _vertices_sound(sys)
        if problem:
            raise AssertionError("F_%d: %s" % (n, problem))
    return "closure endpoints {0, 2/n}"


def check_blown_up_plane(quick: bool = False) -> str:
    sys = blown_up_plane_system()
    low, high = interval(sys)
    if (low, high) != (0, 1):
        raise AssertionError("interval (%s, %s)" % (low, high))
    problem = _vertices_sound(sys)
    if problem:
        raise AssertionError(problem)
    return "closure endpoints {0, 1}"


def check_budget(quick: bool = False) -> str:
    count = 0
    for n, _, h, v in _tail_cells(range(4), [2], 4 if quick else 8):
        s, c = standard_chain(n, 2)
        S, C = tail_blow_ups(s, c, h, v)
        value = budget(S, C)
        if value != n + 2 - h - v:
            raise AssertionError("n=%d h=%d v=%d: budget %s" % (n, h, v, format_rational(value)))
        count += 1
    for n in range(4):
        s = make_hirzebruch(n)
        s = s.register("S", s.evaluate("Z+%dF" % n))
        if budget(s, BoundaryChain(["Z", "S"])) != 0:
            raise AssertionError("F_%d: disjoint sections have nonzero budget" % n)
    return "%d sequences lose one per blow-up" % count


def check_adjunction(quick: bool = False) -> str:
    count = 0
    for n, r, h, v in _tail_cells(range(4), range(2, 5), 3 if quick else 6):
        s, c = standard_chain(n, r)
        S, C = tail_blow_ups(s, c, h, v)
        if verify_chain(S, C) is not ChainKind.CHAIN:
            raise AssertionError("n=%d r=%d h=%d v=%d is not a chain" % (n, r, h, v))
        ledger = dict(zip(C.labels, adjunction_ledger(S, C)))
        order = C.geometric_order()
        for position, label in enumerate(order):
            expected = -1 if position in (0, len(order) - 1) else 0
            if ledger[label] != expected:
                raise AssertionError(
                    "n=%d r=%d h=%d v=%d: %s.(K+C) = %s" % (n, r, h, v, label, ledger[label])
                )
        count += 1
    return "%d chains: ends -1, interior 0" % count


def check_tail_formula(quick: bool = False) -> str:
    top = 2 if quick else 4
    count = 0
    for n in range(4):
        s, c = standard_chain(n, 2)
        for h, v in itertools.product(range(top + 1), repeat=2):
            if not verify_pullback_formula(s, c, h, v):
                raise AssertionError("n=%d h=%d v=%d" % (n, h, v))
            count += 1
        if not verify_pullback_formula(s, c, 2, 2, "RLRL"):
            raise AssertionError("n=%d interleaved order" % n)
    return "%d pullback identities" % count


def check_matrix(quick: bool = False) -> str:
    count = 0
    for n, r, h, v in _tail_cells(range(2 if quick else 4), range(2, 5), 3 if quick else 5, 1):
        s, c = standard_chain(n, r)
        if not cross_derivation(s, c, h, v):
            raise AssertionError("n=%d r=%d h=%d v=%d" % (n, r, h, v))
        count += 1
    # eliminating delta_1 from the h=2 rows leaves delta_2 + (2c^2 - 1) beta
    for cr_sq in range(-3, 2):
        rows = [LinearForm.of(0, [cr_sq - 1, 1, 0]), LinearForm.of(0, [1, -2, 1])]
        projected = fourier_motzkin_eliminate(rows, 1)
        if projected != [LinearForm.of(0, [2 * cr_sq - 1, 0, 1])]:
            raise AssertionError("elimination for c_r^2=%d gave %r" % (cr_sq, projected))
    return "%d block matrices match" % count


def check_tail_lp(quick: bool = False) -> str:
    squares = range(-1, 2) if quick else range(-3, 2)
    count = 0
    for r, x in itertools.product(range(1, 5), range(1, 4 if quick else 7)):
        for h in range(x + 1):
            for c1_sq, cr_sq in itertools.product(squares, repeat=2):
                feasible, certificate, _ = verify_tail_lp(r, h, x - h, c1_sq, cr_sq)
                if not feasible:
                    raise AssertionError(
                        "r=%d h=%d v=%d c1^2=%d cr^2=%d: %r"
                        % (r, h, x - h, c1_sq, cr_sq, certificate)
                    )
                count += 1
    return "%d matrices feasible with verified witness" % count


def check_critical(quick: bool = False) -> str:
    count = 0
    for n in range(2 if quick else 4):
        s, c = standard_chain(n, 2)
        x = n + 2
        for h in range(x + 1):
            S, C = tail_blow_ups(s, c, h, x - h)
            q = build_system(S, C).quadratic
            layout = C.layout
            ends = {layout.eta(layout.h), layout.nu(layout.v)}
            if q.constant != 0 or classify_quadratic(q, "tail") is not QuadraticVerdict.CRITICAL:
                raise AssertionError("n=%d h=%d: %s" % (n, h, q))
            for i in range(layout.dim):
                value = q.linear_coefficient(i)
                if (i in ends and value <= 0) or (i not in ends and value != 0):
                    raise AssertionError(
                        "n=%d h=%d: linear coefficient %d is %s" % (n, h, i, value)
                    )
            count += 1
    return "%d squares vanish at 0 with positive end slopes" % count


def random_matrix(rng: random.Random) -> List[List[int]]:
    k, m = rng.randint(1, 6), rng.randint(1, 12)
    return [[rng.randint(-5, 5) for _ in range(m)] for _ in range(k)]


def check_gordan_fm(quick: bool = False, seed: int = 0) -> str:
    rng = random.Random(seed)
    feasible = 0
    trials = 200 if quick else 1000
    for trial in range(trials):
        system = HomogeneousSystem(random_matrix(rng))
        certificate = gordan_feasible(system)
        if not certificate.verify(system):
            raise AssertionError("trial %d: certificate does not verify" % trial)
        if certificate.is_feasible != fm_feasible(system.forms()):
            raise AssertionError("trial %d: solvers disagree on %r" % (trial, system.matrix))
        feasible += certificate.is_feasible
    return "%d systems, %d feasible" % (trials, feasible)


class GridScan:
    """Exact scan of the open grid {i * box / steps} in (0, box)^k with integer arithmetic."""

    def __init__(self, sys: ConstraintSystem, steps: int) -> None:
        self.sys = sys
        self.steps = steps
        self.box = sys.box if sys.box is not None else Fraction(1)

    def _integer_rows(self) -> List[Tuple[int, List[int]]]:
        """steps * D * form(i * box / steps) = c' + sum(a'_j i_j) with integers c', a'."""
        rows = []
        for row in self.sys.all_rows():
            constant = row.form.constant * self.steps
            coefficients = [value * self.box for value in row.form.dense()]
            scale = math.lcm(constant.denominator, *(value.denominator for value in coefficients))
            rows.append((int(constant * scale), [int(value * scale) for value in coefficients]))
        return rows

    def first_hit(self) -> Optional[Tuple[Fraction, ...]]:
        rows = self._integer_rows()
        for index in itertools.product(range(1, self.steps), repeat=self.sys.dim):
            if all(c + sum(a * i for a, i in zip(a_row, index)) > 0 for c, a_row in rows):
                point = tuple(self.box * i / self.steps for i in index)
                if self.sys.holds(point):
                    return point
        return None


def grid_corpus() -> List[Tuple[str, ConstraintSystem]]:
    corpus = [("F_%d" % n, hirzebruch_system(n).replace(box=1)) for n in (1, 2, 3)]
    corpus.append(("Bl_p P2", blown_up_plane_system()))
    for n in (0, 1):
        s, c = standard_chain(n, 2)
        corpus.append(("F_%d Z+F" % n, build_system(s, c)))
        S, C = tail_blow_ups(s, c, 1, 0)
        corpus.append(("F_%d Z+F h=1" % n, build_system(S, C)))
    rng = random.Random(7)
    for i in range(6):
        rows = [
            LinearForm.of(rng.randint(-2, 2), [rng.randint(-3, 3) for _ in range(2)])
            for _ in range(3)
        ]
        corpus.append(("random-%d" % i, ConstraintSystem.of(rows)))
    return corpus


def _ray_hits(sys: ConstraintSystem, ray: Sequence[Fraction], depth: int = 16) -> bool:
    top = max(ray)
    box = sys.box if sys.box is not None else Fraction(1)
    for j in range(depth + 1):
        t = box / (100 * 2 ** j * top)
        if sys.holds(tuple(t * value for value in ray)):
            return True
    return False


def check_grid(quick: bool = False, fine: int = 100, coarse: int = 20) -> str:
    scanned = 0
    for name, sys in grid_corpus():
        if sys.dim > 3:
            continue
        steps = fine if sys.dim <= 2 else coarse
        if quick:
            steps = min(steps, 20 if sys.dim <= 2 else 8)
        verdict = origin_in_closure(sys)
        if verdict.contains and not _ray_hits(sys, verdict.ray):
            raise AssertionError("%s: certificate ray never enters the body" % name)
        hit = GridScan(sys, steps).first_hit()
        witness, _, _ = strict_point(sys)
        if hit is not None and witness is None:
            raise AssertionError(
                "%s: grid point %s but no strict witness" % (name, format_vector(hit))
            )
        scanned += 1
    return "%d systems agree with the grid" % scanned


def check_convexity(quick: bool = False) -> str:
    bodies = [hirzebruch_system(n) for n in range(1, 4 if quick else 11)]
    bodies.append(blown_up_plane_system())
    for n in range(2 if quick else 4):
        s, c = standard_chain(n, 2)
        for h, v in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]:
            bodies.append(build_system(*tail_blow_ups(s, c, h, v)))
    trials = 100 if quick else 500
    for index, sys in enumerate(bodies):
        result = convexity_check(sys, trials)
        if not result:
            a, b = result.counterexample
            raise AssertionError(
                "body %d: midpoint of %s and %s" % (index, format_vector(a), format_vector(b))
            )
    return "%d bodies, %d midpoint trials each" % (len(bodies), trials)


def check_monotonicity(quick: bool = False) -> str:
    verdicts = {}
    for n in range(2):
        s, c = standard_chain(n, 2)
        for _, _, h, v in _tail_cells([n], [2], n + (2 if quick else 3)):
            verdicts[n, h, v] = classify_tail(TailSequenceSpec(s, c, h, v)).verdict
    for (n, h, v), verdict in verdicts.items():
        if verdict is not TailVerdict.NOT_ALF_BUDGET:
            continue
        for step in ((n, h + 1, v), (n, h, v + 1)):
            if verdicts.get(step, TailVerdict.NOT_ALF_BUDGET) is not TailVerdict.NOT_ALF_BUDGET:
                raise AssertionError("n=%d h=%d v=%d: budget verdict not monotone" % (n, h, v))
    return "%d cells" % len(verdicts)


def check_interpolation(quick: bool = False) -> str:
    checked = 0
    for n in range(2):
        s, c = standard_chain(n, 2)
        if not origin_in_closure(build_system(s, c)).contains:
            continue
        for _, _, h, v in _tail_cells([n], [2], min(n + 2, 2 if quick else 3), 1):
            word = "R" * h + "L" * v
            if not origin_in_closure(build_system(*tail_blow_ups(s, c, h, v, word))).contains:
                continue
            for length in range(1, len(word)):
                prefix = word[:length]
                S, C = tail_blow_ups(s, c, prefix.count("R"), prefix.count("L"), prefix)
                if not origin_in_closure(build_system(S, C)).contains:
                    raise AssertionError("n=%d %s: prefix %s fails" % (n, word, prefix))
                checked += 1
    return "%d prefixes" % checked


CHECKS: "OrderedDict[str, Tuple[str, Callable[[bool], str]]]" = OrderedDict(
    [
        ("hirzebruch", ("(F_n, -K, Z) has angles exactly (0, 2/n)", check_hirzebruch)),
        ("blown-up-plane", ("(Bl_p P2, pi^*H, E) has angles exactly (0, 1)", check_blown_up_plane)),
        ("budget", ("(K_S + C)^2 drops by one per tail blow-up", check_budget)),
        ("adjunction", ("c_i.(K + C) is 0 inside the chain and -1 at the ends", check_adjunction)),
        ("tail-formula", ("-K_beta after tail blow-ups is the pullback", check_tail_formula)),
        ("matrix", ("lattice rows match the block tail matrix", check_matrix)),
        ("tail-lp", ("the origin is always in the closure of the tail LP", check_tail_lp)),
        ("critical", ("at x = budget the square has no negative linear terms", check_critical)),
        ("gordan-fm", ("Gordan and Fourier-Motzkin agree, certificates verify", check_gordan_fm)),
        ("grid", ("origin verdicts agree with an exact grid scan", check_grid)),
        ("convexity", ("bodies of ample angles are convex", check_convexity)),
        ("monotonicity", ("budget failures persist under more tail blow-ups", check_monotonicity)),
        ("interpolation", ("feasible tail sequences have feasible prefixes", check_interpolation)),
    ]
)


def run_check(name: str, quick: bool = False) -> CheckResult:
    if name not in CHECKS:
        raise KeyError("Unknown check %r (known: %s)" % (name, ", ".join(CHECKS)))
    anchor, function = CHECKS[name]
    try:
        detail = function(quick)
    except AssertionError as e:
        log.error("check %s failed: %s", name, e)
        return CheckResult(name, anchor, False, str(e))
    log.info("check %s passed: %s", name, detail)
    return CheckResult(name, anchor, True, detail)


def run_checks(only: Sequence[str] = (), quick: bool = False) -> List[CheckResult]:
    return [run_check(name, quick) for name in (only or CHECKS)]
