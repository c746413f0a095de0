"""
Simplex Module
Dense-tableau two-phase primal simplex with Bland's anti-cycling rule.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .errors import DimensionError

logger = logging.getLogger(__name__)

DEFAULT_LP_TOLERANCE = 1e-9


class LpStatus(str, Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'
    ITERATION_LIMIT = 'iteration-limit'


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """
    min (or max) objective @ x
    s.t. matrix[i] @ x (<=, >=, =) rhs[i],  x >= lower  (lower = -inf means free).
    """

    objective: np.ndarray
    matrix: np.ndarray
    senses: Tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    maximize: bool = False
    names: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        objective = np.asarray(self.objective, dtype=float).reshape(-1)
        k = objective.size
        matrix = np.asarray(self.matrix, dtype=float).reshape(-1, k) if k else np.zeros((0, 0))
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        if matrix.shape[0] != rhs.size or len(self.senses) != rhs.size:
            raise DimensionError(
                f"{matrix.shape[0]} rows, {rhs.size} right-hand sides and {len(self.senses)} senses differ"
            )
        if lower.size != k:
            raise DimensionError(f"Expected {k} lower bounds, got {lower.size}")
        if np.any(np.isnan(lower)) or np.any(lower == np.inf):
            raise ValueError("Lower bounds must be finite or -inf")
        if any(s not in ('<=', '>=', '=') for s in self.senses):
            raise ValueError(f"Unknown constraint sense in {set(self.senses)}")
        object.__setattr__(self, 'objective', objective)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'rhs', rhs)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'senses', tuple(self.senses))
        if not self.names:
            object.__setattr__(self, 'names', tuple(f"x{j}" for j in range(k)))

    @property
    def n_vars(self) -> int:
        return int(self.objective.size)

    @property
    def n_rows(self) -> int:
        return int(self.rhs.size)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    basis: Tuple[str, ...] = ()
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


class SimplexSolver:
    """Two-phase primal simplex on a dense tableau."""

    def __init__(self, tol: float = DEFAULT_LP_TOLERANCE, max_iterations: int = None):
        """
        Initialize solver.

        Args:
            tol: Pivot, optimality and feasibility tolerance
            max_iterations: Pivot cap per phase (default 50 * (rows + cols))
        """
        self.tol = tol
        self.max_iterations = max_iterations

    @staticmethod
    def _pivot(T: np.ndarray, row: int, col: int):
        T[row, :] /= T[row, col]
        column = T[:, col].copy()
        column[row] = 0.0
        T -= np.outer(column, T[row, :])

    def _iterate(self, T: np.ndarray, basis: List[int], limit: int) -> Tuple[LpStatus, int]:
        m = T.shape[0] - 1
        for iteration in range(limit):
            entering = np.flatnonzero(T[-1, :-1] < -self.tol)
            if entering.size == 0:
                return LpStatus.OPTIMAL, iteration
            # Bland: lowest-index improving column
            col = int(entering[0])
            column = T[:m, col]
            rows = np.flatnonzero(column > self.tol)
            if rows.size == 0:
                return LpStatus.UNBOUNDED, iteration
            ratios = T[rows, -1] / column[rows]
            ties = rows[ratios <= ratios.min() + self.tol]
            row = int(min(ties, key=lambda r: basis[r]))
            self._pivot(T, row, col)
            basis[row] = col
        return LpStatus.ITERATION_LIMIT, limit

    def solve(self, lp: LinearProgram) -> LpSolution:
        """
        Solve a linear program.

        Args:
            lp: LinearProgram to solve

        Returns:
            LpSolution; non-optimal outcomes are reported through the status
        """
        m, k = lp.matrix.shape[0], lp.n_vars
        sign = -1.0 if lp.maximize else 1.0
        cost = sign * lp.objective
        finite = np.isfinite(lp.lower)
        free = np.flatnonzero(~finite)

        # Shift finite bounds to zero and split free variables
        A = np.hstack([lp.matrix, -lp.matrix[:, free]])
        c = np.concatenate([cost, -cost[free]])
        b = lp.rhs - lp.matrix[:, finite] @ lp.lower[finite]
        labels = list(lp.names) + [f"{lp.names[j]}-" for j in free]
        senses = list(lp.senses)
        for i in np.flatnonzero(b < 0):
            A[i] *= -1.0
            b[i] *= -1.0
            senses[i] = {'<=': '>=', '>=': '<=', '=': '='}[senses[i]]

        n_struct = A.shape[1]
        le_rows = [i for i, s in enumerate(senses) if s == '<=']
        ge_rows = [i for i, s in enumerate(senses) if s == '>=']
        eq_rows = [i for i, s in enumerate(senses) if s == '=']
        art_start = n_struct + len(le_rows) + len(ge_rows)
        n_cols = art_start + len(ge_rows) + len(eq_rows)

        T = np.zeros((m + 1, n_cols + 1))
        T[:m, :n_struct] = A
        T[:m, -1] = b
        basis = [-1] * m
        col = n_struct
        for i in le_rows:
            T[i, col] = 1.0
            basis[i] = col
            labels.append(f"s{i}")
            col += 1
        for i in ge_rows:
            T[i, col] = -1.0
            labels.append(f"s{i}")
            col += 1
        for i in ge_rows + eq_rows:
            T[i, col] = 1.0
            basis[i] = col
            labels.append(f"a{i}")
            col += 1

        limit = self.max_iterations or 50 * (m + n_cols)
        iterations = 0

        if n_cols > art_start:
            T[-1, art_start:n_cols] = 1.0
            for i in ge_rows + eq_rows:
                T[-1, :] -= T[i, :]
            status, used = self._iterate(T, basis, limit)
            iterations += used
            if status != LpStatus.OPTIMAL:
                logger.debug(f"Phase I stopped with status {status.value}")
                return LpSolution(LpStatus.ITERATION_LIMIT, iterations=iterations)
            scale = max(1.0, float(np.max(np.abs(b)))) if m else 1.0
            if -T[-1, -1] > self.tol * scale:
                return LpSolution(LpStatus.INFEASIBLE, iterations=iterations)

            redundant = []
            for r in range(m):
                if basis[r] < art_start:
                    continue
                candidates = np.flatnonzero(np.abs(T[r, :art_start]) > self.tol)
                if candidates.size:
                    self._pivot(T, r, int(candidates[0]))
                    basis[r] = int(candidates[0])
                else:
                    redundant.append(r)
            if redundant:
                logger.debug(f"Dropping {len(redundant)} redundant rows")
                T = np.delete(T, redundant, axis=0)
                basis = [j for r, j in enumerate(basis) if r not in set(redundant)]
            T = np.delete(T, np.arange(art_start, n_cols), axis=1)
            labels = labels[:art_start]

        T[-1, :] = 0.0
        T[-1, :n_struct] = c
        for r, j in enumerate(basis):
            if T[-1, j] != 0.0:
                T[-1, :] -= T[-1, j] * T[r, :]

        status, used = self._iterate(T, basis, limit)
        iterations += used
        if status != LpStatus.OPTIMAL:
            return LpSolution(status, iterations=iterations)

        values = np.zeros(T.shape[1] - 1)
        for r, j in enumerate(basis):
            values[j] = T[r, -1]
        values[(values < 0) & (values > -self.tol)] = 0.0

        x = values[:k].copy()
        x[free] -= values[k:n_struct]
        x[finite] += lp.lower[finite]
        return LpSolution(
            status=LpStatus.OPTIMAL,
            x=x,
            objective=float(lp.objective @ x),
            basis=tuple(labels[j] for j in basis),
            iterations=iterations,
        )


def solve_lp(lp: LinearProgram, tol: float = DEFAULT_LP_TOLERANCE, max_iterations: int = None) -> LpSolution:
    """Solve `lp` with a fresh SimplexSolver."""
    return SimplexSolver(tol=tol, max_iterations=max_iterations).solve(lp)
