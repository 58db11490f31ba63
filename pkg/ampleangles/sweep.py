"""Grid sweeps of tail blow-up sequences over (n, r, h, v)."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
import logging

from typing import Any, Dict, Iterable, List, Optional, Sequence

from .common import format_rational
from .tailblowup import TailSequenceSpec, budget, classify_tail, standard_chain

log = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class SweepCell:
    n: int
    r: int
    h: int
    v: int

    @property
    def x(self) -> int:
        return self.h + self.v


@dataclass(frozen=True)
class CellResult:
    n: int
    r: int
    h: int
    v: int
    x: int
    base_budget: str
    budget: str
    verdict: str
    quadratic: str
    tilde_lp: bool
    block_lp: Optional[bool]

    COLUMNS = (
        "n",
        "r",
        "h",
        "v",
        "x",
        "base_budget",
        "budget",
        "verdict",
        "quadratic",
        "tilde_lp",
        "block_lp",
    )

    def row(self) -> Dict[str, Any]:
        return asdict(self)


def iter_cells(n_values: Iterable[int], r_values: Iterable[int], max_x: int) -> List[SweepCell]:
    cells = []
    for n in n_values:
        for r in r_values:
            for x in range(max_x + 1):
                for h in range(x, -1, -1):
                    cells.append(SweepCell(n, r, h, x - h))
    return sorted(cells)


def run_cell(cell: SweepCell) -> CellResult:
    s, c = standard_chain(cell.n, cell.r)
    report = classify_tail(TailSequenceSpec(s, c, cell.h, cell.v))
    return CellResult(
        n=cell.n,
        r=cell.r,
        h=cell.h,
        v=cell.v,
        x=cell.x,
        base_budget=format_rational(report.budget),
        budget=format_rational(budget(report.surface, report.chain)),
        verdict=report.verdict.value,
        quadratic="" if report.quadratic is None else report.quadratic.value,
        tilde_lp=bool(report.tilde_origin.contains),
        block_lp=None if report.block is None else report.block["feasible"],
    )


def run_sweep(
    cells: Sequence[SweepCell], jobs: int = 1, listeners: Sequence = ()
) -> List[CellResult]:
    """Evaluate every cell; results come back in cell order whatever the pool does."""
    cells = sorted(cells)
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_cell, cells, chunksize=max(1, len(cells) // (4 * jobs))))
    else:
        results = [run_cell(cell) for cell in cells]
    for result in results:
        log.debug(
            "cell n=%d r=%d h=%d v=%d: %s", result.n, result.r, result.h, result.v, result.verdict
        )
        for listener in listeners:
            listener.publish_cell(result)
    for listener in listeners:
        listener.finish()
    return results
