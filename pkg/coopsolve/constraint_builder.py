"""
Constraint Builder Module
Helper class for assembling linear programs row by row.
"""

from typing import Dict, List, Sequence, Union

import numpy as np

from .errors import DimensionError
from .simplex import LinearProgram

Coefficients = Union[Dict[int, float], Sequence[float], np.ndarray]


class ConstraintBuilder:
    """Fluent builder for LinearProgram instances."""

    def __init__(self, n_vars: int, names: List[str] = None):
        """
        Initialize builder.

        Args:
            n_vars: Number of decision variables
            names: Optional variable names used in basis descriptions
        """
        self.n_vars = n_vars
        self.names = list(names) if names else [f"x{j}" for j in range(n_vars)]
        if len(self.names) != n_vars:
            raise DimensionError(f"Expected {n_vars} variable names, got {len(self.names)}")
        self.blocks = []
        self.senses = []
        self.rhs = []
        self.lower = np.zeros(n_vars)
        self.objective = np.zeros(n_vars)
        self.maximize_objective = False

    def _row(self, coefficients: Coefficients) -> np.ndarray:
        if isinstance(coefficients, dict):
            row = np.zeros(self.n_vars)
            for j, value in coefficients.items():
                row[j] = value
            return row
        row = np.asarray(coefficients, dtype=float)
        if row.shape != (self.n_vars,):
            raise DimensionError(f"Expected {self.n_vars} coefficients, got {row.shape}")
        return row

    def add(self, coefficients: Coefficients, sense: str, rhs: float) -> 'ConstraintBuilder':
        """Add a single constraint row."""
        if sense not in ('<=', '>=', '='):
            raise ValueError(f"Unknown constraint sense: {sense}")
        self.blocks.append(self._row(coefficients)[None, :])
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        return self

    def add_rows(self, matrix: np.ndarray, sense: str, rhs: Union[float, np.ndarray]) -> 'ConstraintBuilder':
        """Add many constraints sharing one sense."""
        if sense not in ('<=', '>=', '='):
            raise ValueError(f"Unknown constraint sense: {sense}")
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.shape[1] != self.n_vars:
            raise DimensionError(f"Expected {self.n_vars} columns, got {matrix.shape[1]}")
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), (matrix.shape[0],))
        self.blocks.append(matrix)
        self.senses.extend([sense] * matrix.shape[0])
        self.rhs.extend(rhs.tolist())
        return self

    def at_least(self, coefficients: Coefficients, rhs: float) -> 'ConstraintBuilder':
        """Add greater-than-or-equal constraint."""
        return self.add(coefficients, '>=', rhs)

    def at_most(self, coefficients: Coefficients, rhs: float) -> 'ConstraintBuilder':
        """Add less-than-or-equal constraint."""
        return self.add(coefficients, '<=', rhs)

    def equals(self, coefficients: Coefficients, rhs: float) -> 'ConstraintBuilder':
        """Add equality constraint."""
        return self.add(coefficients, '=', rhs)

    def lower_bound(self, var: int, value: float) -> 'ConstraintBuilder':
        self.lower[var] = value
        return self

    def free(self, var: int) -> 'ConstraintBuilder':
        """Remove the lower bound of a variable."""
        self.lower[var] = -np.inf
        return self

    def minimize(self, coefficients: Coefficients) -> 'ConstraintBuilder':
        self.objective = self._row(coefficients)
        self.maximize_objective = False
        return self

    def maximize(self, coefficients: Coefficients) -> 'ConstraintBuilder':
        self.objective = self._row(coefficients)
        self.maximize_objective = True
        return self

    def build(self) -> LinearProgram:
        """Build the final linear program."""
        if self.blocks:
            matrix = np.vstack(self.blocks)
        else:
            matrix = np.zeros((0, self.n_vars))
        return LinearProgram(
            objective=self.objective.copy(),
            matrix=matrix,
            senses=tuple(self.senses),
            rhs=np.array(self.rhs, dtype=float),
            lower=self.lower.copy(),
            maximize=self.maximize_objective,
            names=tuple(self.names),
        )
