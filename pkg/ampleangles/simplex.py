"""Exact phase-one simplex over the rationals.

Solves ``M y = b, y >= 0`` by minimizing the sum of artificial variables with Bland's rule.
Artificial columns stay in the tableau so the final duals can be read off their reduced costs.
"""

from fractions import Fraction
import logging

from typing import List, Optional, Sequence, Tuple

log = logging.getLogger(__name__)


class PhaseOneResult:
    __slots__ = ("objective", "solution", "duals", "pivots")

    def __init__(
        self,
        objective: Fraction,
        solution: Tuple[Fraction, ...],
        duals: Tuple[Fraction, ...],
        pivots: int,
    ) -> None:
        self.objective = objective
        self.solution = solution
        self.duals = duals
        self.pivots = pivots

    @property
    def feasible(self) -> bool:
        return self.objective == 0


class Tableau:
    class Error(Exception):
        pass

    class Cycling(Error):
        pass

    MAX_PIVOTS = 100000

    def __init__(self, matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> None:
        self.rows = len(matrix)
        self.columns = len(matrix[0]) if matrix else 0
        if len(rhs) != self.rows:
            raise ValueError("Right-hand side of length %d for %d rows" % (len(rhs), self.rows))
        if any(len(row) != self.columns for row in matrix):
            raise ValueError("Ragged constraint matrix")
        self.table: List[List[Fraction]] = []
        self.rhs: List[Fraction] = []
        for i, row in enumerate(matrix):
            value = Fraction(rhs[i])
            flip = -1 if value < 0 else 1
            artificial = [Fraction(int(i == k)) for k in range(self.rows)]
            self.table.append([flip * Fraction(entry) for entry in row] + artificial)
            self.rhs.append(flip * value)
        self.flips = [(-1 if Fraction(value) < 0 else 1) for value in rhs]
        width = self.columns + self.rows
        self.costs = [Fraction(0)] * width
        for j in range(self.columns):
            self.costs[j] = -sum((self.table[i][j] for i in range(self.rows)), Fraction(0))
        self.objective = sum(self.rhs, Fraction(0))
        self.basis = [self.columns + i for i in range(self.rows)]

    def _entering(self) -> Optional[int]:
        for j, cost in enumerate(self.costs):
            if cost < 0:
                return j
        return None

    def _leaving(self, column: int) -> Optional[int]:
        best, best_ratio = None, None
        for i in range(self.rows):
            entry = self.table[i][column]
            if entry <= 0:
                continue
            ratio = self.rhs[i] / entry
            if (
                best is None
                or ratio < best_ratio
                or (ratio == best_ratio and self.basis[i] < self.basis[best])
            ):
                best, best_ratio = i, ratio
        return best

    def _pivot(self, row: int, column: int) -> None:
        pivot = self.table[row][column]
        self.table[row] = [entry / pivot for entry in self.table[row]]
        self.rhs[row] /= pivot
        pivot_row = self.table[row]
        for i in range(self.rows):
            if i == row:
                continue
            factor = self.table[i][column]
            if factor:
                self.table[i] = [a - factor * b for a, b in zip(self.table[i], pivot_row)]
                self.rhs[i] -= factor * self.rhs[row]
        factor = self.costs[column]
        self.costs = [a - factor * b for a, b in zip(self.costs, pivot_row)]
        self.objective += factor * self.rhs[row]
        self.basis[row] = column

    def solve(self) -> PhaseOneResult:
        pivots = 0
        while True:
            column = self._entering()
            if column is None:
                break
            row = self._leaving(column)
            if row is None:
                # the phase-one objective is bounded below by zero
                raise self.Error("Unbounded phase-one objective")
            self._pivot(row, column)
            pivots += 1
            if pivots > self.MAX_PIVOTS:
                raise self.Cycling("No convergence after %d pivots" % pivots)
        solution = [Fraction(0)] * self.columns
        for i, variable in enumerate(self.basis):
            if variable < self.columns:
                solution[variable] = self.rhs[i]
        duals = tuple(
            self.flips[i] * (1 - self.costs[self.columns + i]) for i in range(self.rows)
        )
        log.debug("phase one: %d pivots, objective %s", pivots, self.objective)
        return PhaseOneResult(self.objective, tuple(solution), duals, pivots)


def phase_one(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> PhaseOneResult:
    return Tableau(matrix, rhs).solve()
