from abc import ABCMeta, abstractmethod
from collections import Counter
import logging

from typing import Any, Dict, List

from ..reports import write_csv
from ..sweep import CellResult

log = logging.getLogger(__name__)


class SweepListener(metaclass=ABCMeta):
    @abstractmethod
    def publish_cell(self, result: CellResult) -> None:
        pass

    def finish(self) -> None:
        pass


class CsvListener(SweepListener):
    def __init__(self) -> None:
        self.rows: List[Dict[str, Any]] = []

    def publish_cell(self, result: CellResult) -> None:
        self.rows.append(result.row())

    def to_csv(self) -> str:
        return write_csv(CellResult.COLUMNS, self.rows)


class SummaryListener(SweepListener):
    """Counts verdicts per (n, r) and logs the tallies when the sweep ends."""

    def __init__(self) -> None:
        self.verdicts = Counter()
        self.per_chain: Dict[tuple, Counter] = {}
        self.mismatches = 0

    def publish_cell(self, result: CellResult) -> None:
        self.verdicts[result.verdict] += 1
        self.per_chain.setdefault((result.n, result.r), Counter())[result.verdict] += 1
        if result.block_lp is not None and result.block_lp != result.tilde_lp:
            self.mismatches += 1
            log.warning(
                "closed-form matrix disagrees with derived LP at n=%d r=%d h=%d v=%d",
                result.n,
                result.r,
                result.h,
                result.v,
            )

    def finish(self) -> None:
        log.info(
            "sweep verdicts: %s (%d matrix mismatches)", _tally(self.verdicts), self.mismatches
        )
        for (n, r), verdicts in sorted(self.per_chain.items()):
            log.info("  n=%d r=%d: %s", n, r, _tally(verdicts))


def _tally(counter: Counter) -> str:
    return " ".join("%s=%d" % item for item in sorted(counter.items()))
