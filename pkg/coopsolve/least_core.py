"""
Least-Core Module
Least-core linear programs, maximal excess and epsilon-core feasibility checks.

The LP is posed as  max delta  s.t.  delta - sum_{i in C} p_i <= 0  for every
listed coalition C,  sum_i p_i = 1,  p >= 0,  delta >= 0,  with epsilon = 1 - delta.
This is the usual  min epsilon  s.t.  sum_{i in C} p_i >= 1 - epsilon  program
with every coalition row in <= form, so the simplex starts from an all-slack basis.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from .constraint_builder import ConstraintBuilder
from .errors import DimensionError, EnumerationLimitError, LpSolveError
from .exact import coalition_sizes, coalition_sums, minimal_table, winning_table
from .games import (
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_TOLERANCE,
    Coalition,
    SolutionVector,
    WeightedVotingGame,
    ensure_solvable,
)
from .simplex import LinearProgram, LpSolution, solve_lp

logger = logging.getLogger(__name__)

DEFAULT_NAIVE_CAP = 14
DEFAULT_ROW_CAP = 20000
MAX_GENERATION_ROUNDS = 1000


class Formulation(str, Enum):
    NAIVE = 'naive'
    MINIMAL = 'minimal'
    INCREMENTAL = 'incremental'


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    """Outcome of an epsilon-core membership check."""

    feasible: bool
    epsilon: float
    max_excess: float
    violation_masks: np.ndarray
    violation_excesses: np.ndarray

    def __bool__(self) -> bool:
        return self.feasible

    @property
    def violations(self) -> List[Tuple[Coalition, float]]:
        return [(Coalition(int(m)), float(e)) for m, e in zip(self.violation_masks, self.violation_excesses)]


def _masks_to_memberships(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)


def build_least_core_lp(memberships: np.ndarray) -> LinearProgram:
    """
    Build the least-core LP over the given coalitions.

    Args:
        memberships: Boolean (k, n) matrix, one row per constrained coalition

    Returns:
        LinearProgram over variables (p_0..p_{n-1}, delta)
    """
    k, n = memberships.shape
    builder = ConstraintBuilder(n + 1, names=[f"p{i}" for i in range(n)] + ['delta'])
    rows = np.hstack([-memberships.astype(float), np.ones((k, 1))])
    builder.add_rows(rows, '<=', 0.0)
    builder.equals(np.append(np.ones(n), 0.0), 1.0)
    builder.maximize({n: 1.0})
    return builder.build()


def _solve_rows(game: WeightedVotingGame, masks: np.ndarray) -> Tuple[np.ndarray, float, LpSolution]:
    solution = solve_lp(build_least_core_lp(_masks_to_memberships(masks, game.n)))
    if not solution.optimal:
        raise LpSolveError(
            f"Least-core LP over {masks.size} coalitions of {game} ended with status "
            f"'{solution.status.value}' after {solution.iterations} pivots",
            status=solution.status.value,
        )
    payoffs = solution.x[:game.n]
    epsilon = 1.0 - solution.x[game.n]
    if -DEFAULT_TOLERANCE < epsilon < 0.0:
        epsilon = 0.0
    return payoffs, epsilon, solution


def _solve_incremental(game: WeightedVotingGame, minimal_masks: np.ndarray,
                       tol: float) -> Tuple[np.ndarray, float, LpSolution, int]:
    sizes = coalition_sizes(game.n)[minimal_masks]
    order = np.lexsort((minimal_masks, sizes))
    active = minimal_masks[order[:max(4 * game.n, 1)]]
    batch = max(game.n, 1)

    for round_index in range(1, MAX_GENERATION_ROUNDS + 1):
        payoffs, epsilon, solution = _solve_rows(game, np.sort(active))
        excess = 1.0 - coalition_sums(payoffs)[minimal_masks]
        candidates = np.flatnonzero(excess > epsilon + tol)
        candidates = candidates[~np.isin(minimal_masks[candidates], active)]
        if candidates.size == 0:
            logger.debug(f"Constraint generation converged after {round_index} rounds with {active.size} rows")
            return payoffs, epsilon, solution, active.size
        worst = candidates[np.lexsort((minimal_masks[candidates], -excess[candidates]))][:batch]
        active = np.concatenate([active, minimal_masks[worst]])
    raise LpSolveError(f"Constraint generation did not converge in {MAX_GENERATION_ROUNDS} rounds",
                       status='iteration-limit')


def canonical_payoffs(game: WeightedVotingGame, vertex: np.ndarray, epsilon: float,
                      minimal_masks: np.ndarray) -> np.ndarray:
    """
    Minimum-variance payoff vector inside the least core.

    Args:
        game: The game
        vertex: A least-core payoff used as the starting point
        epsilon: Least-core value
        minimal_masks: Minimal winning coalitions (sufficient constraints for p >= 0)

    Returns:
        Canonical payoffs, or the vertex if the projection fails
    """
    n = game.n
    A = _masks_to_memberships(minimal_masks, n).astype(float)
    bound = 1.0 - epsilon - 1e-10
    target = 1.0 / n
    constraints = [
        {'type': 'eq', 'fun': lambda p: np.array([p.sum() - 1.0]), 'jac': lambda p: np.ones((1, n))},
        {'type': 'ineq', 'fun': lambda p: A @ p - bound, 'jac': lambda p: A},
    ]
    result = minimize(
        lambda p: float(np.sum((p - target) ** 2)),
        np.asarray(vertex, dtype=float),
        jac=lambda p: 2.0 * (p - target),
        bounds=[(0.0, 1.0)] * n,
        constraints=constraints,
        method='SLSQP',
        options={'ftol': 1e-14, 'maxiter': 1000},
    )
    if not result.success:
        logger.warning(f"Canonical projection failed ({result.message}); keeping the simplex vertex")
        return np.asarray(vertex, dtype=float)

    payoffs = np.clip(result.x, 0.0, None)
    payoffs = payoffs / payoffs.sum()
    if float(np.max(1.0 - A @ payoffs)) > epsilon + 1e-8:
        logger.warning("Canonical projection left the least core; keeping the simplex vertex")
        return np.asarray(vertex, dtype=float)
    return payoffs


def least_core(game: WeightedVotingGame,
               formulation: Union[Formulation, str] = Formulation.MINIMAL,
               canonical: bool = False,
               cap: int = DEFAULT_ENUMERATION_CAP,
               naive_cap: int = DEFAULT_NAIVE_CAP,
               row_cap: int = DEFAULT_ROW_CAP,
               tol: float = DEFAULT_TOLERANCE) -> SolutionVector:
    """
    Least-core payoff vector and least-core value.

    Args:
        game: Game with v(N)=1
        formulation: naive (all winning coalitions), minimal (minimal winning
            coalitions) or incremental (constraint generation)
        canonical: Replace the simplex vertex by the minimum-variance least-core payoff
        cap: Enumeration cap on n
        naive_cap: Cap on n for the naive formulation
        row_cap: Largest minimal formulation solved directly; larger ones switch to incremental
        tol: Violation tolerance for constraint generation

    Returns:
        SolutionVector with payoffs and lcv
    """
    formulation = Formulation(formulation)
    ensure_solvable(game, cap)
    table = winning_table(game, cap)
    minimal_masks = np.flatnonzero(minimal_table(table, game.n)).astype(np.int64)
    used = formulation

    if formulation == Formulation.NAIVE:
        if game.n > naive_cap:
            raise EnumerationLimitError(f"Naive least-core formulation is capped at n <= {naive_cap}, got n={game.n}")
        masks = np.flatnonzero(table).astype(np.int64)
        payoffs, epsilon, solution = _solve_rows(game, masks)
        rows = masks.size
    elif formulation == Formulation.MINIMAL and minimal_masks.size <= row_cap:
        payoffs, epsilon, solution = _solve_rows(game, minimal_masks)
        rows = minimal_masks.size
    else:
        if formulation == Formulation.MINIMAL:
            logger.info(f"{minimal_masks.size} minimal winning coalitions exceed the row cap of "
                        f"{row_cap}; using constraint generation")
            used = Formulation.INCREMENTAL
        payoffs, epsilon, solution, rows = _solve_incremental(game, minimal_masks, tol)

    if canonical:
        payoffs = canonical_payoffs(game, payoffs, epsilon, minimal_masks)

    return SolutionVector(payoffs, lcv=epsilon, meta={
        'concept': 'leastcore',
        'method': 'lp',
        'formulation': used.value,
        'canonical': canonical,
        'rows': int(rows),
        'pivots': solution.iterations,
    })


def _checked_payoff(game: WeightedVotingGame, payoff) -> np.ndarray:
    payoff = payoff.payoffs if isinstance(payoff, SolutionVector) else np.asarray(payoff, dtype=float)
    if payoff.size != game.n:
        raise DimensionError(f"Payoff length {payoff.size} does not match {game.n} players")
    return payoff


def max_excess(game: WeightedVotingGame, payoff, cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """
    Largest excess 1 - sum_{i in C} p_i over winning coalitions.

    Args:
        game: Game with v(N)=1
        payoff: Payoff vector or SolutionVector
        cap: Enumeration cap on n

    Returns:
        The maximal excess
    """
    payoff = _checked_payoff(game, payoff)
    ensure_solvable(game, cap)
    table = winning_table(game, cap)
    return float(np.max(1.0 - coalition_sums(payoff)[table]))


def check_feasibility(game: WeightedVotingGame, payoff, epsilon: float,
                      tol: float = DEFAULT_TOLERANCE,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> FeasibilityReport:
    """
    Check that every winning coalition receives at least 1 - epsilon.

    Args:
        game: Game with v(N)=1
        payoff: Payoff vector or SolutionVector
        epsilon: Allowed excess
        tol: Absolute tolerance
        cap: Enumeration cap on n

    Returns:
        FeasibilityReport listing violated coalitions and their excesses
    """
    payoff = _checked_payoff(game, payoff)
    ensure_solvable(game, cap)
    masks = np.flatnonzero(winning_table(game, cap)).astype(np.int64)
    excess = 1.0 - coalition_sums(payoff)[masks]
    violated = excess > epsilon + tol
    return FeasibilityReport(
        feasible=not bool(np.any(violated)),
        epsilon=float(epsilon),
        max_excess=float(np.max(excess)),
        violation_masks=masks[violated],
        violation_excesses=excess[violated],
    )
