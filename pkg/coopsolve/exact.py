"""
Exact Solvers Module
Enumeration-based solvers: winning and minimal winning coalitions,
exact Shapley values and Banzhaf indices.

All tables are indexed by coalition bitmask (bit i set = player i present).
Per-player scans view a table of length 2^n as (-1, 2, 2^i) so that
[:, 0, :] holds coalitions without player i and [:, 1, :] the same
coalitions with player i added.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Iterator, List, Union

import numpy as np

from .errors import DegenerateGameError, EnumerationLimitError
from .games import (
    DEFAULT_ENUMERATION_CAP,
    CharacteristicFn,
    Coalition,
    SolutionVector,
    WeightedVotingGame,
    ensure_solvable,
)

logger = logging.getLogger(__name__)


class CoalitionKind(str, Enum):
    ALL_WINNING = 'all-winning'
    MINIMAL_WINNING = 'minimal-winning'


@dataclass(frozen=True, eq=False)
class CoalitionSet:
    """Coalitions of an n-player game, stored as ascending bitmasks."""

    masks: np.ndarray
    kind: CoalitionKind
    n: int

    def __len__(self) -> int:
        return int(self.masks.size)

    def __iter__(self) -> Iterator[Coalition]:
        return (Coalition(int(m)) for m in self.masks)

    def __contains__(self, coalition: Coalition) -> bool:
        idx = np.searchsorted(self.masks, coalition.mask)
        return bool(idx < self.masks.size and self.masks[idx] == coalition.mask)

    @property
    def coalitions(self) -> List[Coalition]:
        return list(self)

    def member_sets(self) -> List[frozenset]:
        return [frozenset(c.members()) for c in self]

    def membership_matrix(self) -> np.ndarray:
        """Boolean (k, n) matrix, one row per coalition."""
        bits = np.arange(self.n, dtype=np.int64)
        return ((self.masks[:, None] >> bits[None, :]) & 1).astype(bool)


def check_cap(n: int, cap: int = DEFAULT_ENUMERATION_CAP):
    if n > cap:
        raise EnumerationLimitError(f"{n} players exceeds the enumeration cap of {cap}")


def coalition_sums(values: np.ndarray) -> np.ndarray:
    """Sum of `values` over the members of every coalition, by bitmask."""
    values = np.asarray(values, dtype=float)
    sums = np.zeros(1 << values.size)
    for i, value in enumerate(values):
        half = 1 << i
        sums[half:2 * half] = sums[:half] + value
    return sums


def coalition_sizes(n: int) -> np.ndarray:
    sizes = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        half = 1 << i
        sizes[half:2 * half] = sizes[:half] + 1
    return sizes


def all_memberships(n: int) -> np.ndarray:
    """Boolean (2^n, n) matrix enumerating every coalition in mask order."""
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)


def winning_table(game: WeightedVotingGame, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Boolean table of v(C) over all 2^n coalitions."""
    check_cap(game.n, cap)
    table = game.wins(coalition_sums(game.weights))
    table[0] = False
    return table


def minimal_table(table: np.ndarray, n: int) -> np.ndarray:
    """Winning coalitions whose every member is pivotal."""
    minimal = table.copy()
    for i in range(n):
        half = 1 << i
        view = table.reshape(-1, 2, half)
        minimal.reshape(-1, 2, half)[:, 1, :] &= ~view[:, 0, :]
    return minimal


def winning_coalitions(game: WeightedVotingGame, cap: int = DEFAULT_ENUMERATION_CAP) -> CoalitionSet:
    """
    All nonempty winning coalitions.

    Args:
        game: Game with v(N)=1
        cap: Enumeration cap on n

    Returns:
        CoalitionSet of kind all-winning
    """
    ensure_solvable(game, cap)
    masks = np.flatnonzero(winning_table(game, cap)).astype(np.int64)
    return CoalitionSet(masks, CoalitionKind.ALL_WINNING, game.n)


def minimal_winning_coalitions(game: WeightedVotingGame, cap: int = DEFAULT_ENUMERATION_CAP) -> CoalitionSet:
    """
    Winning coalitions in which removing any single member makes the coalition lose.

    Args:
        game: Game with v(N)=1
        cap: Enumeration cap on n

    Returns:
        CoalitionSet of kind minimal-winning
    """
    ensure_solvable(game, cap)
    table = winning_table(game, cap)
    masks = np.flatnonzero(minimal_table(table, game.n)).astype(np.int64)
    logger.debug(f"{masks.size} minimal winning coalitions for n={game.n}")
    return CoalitionSet(masks, CoalitionKind.MINIMAL_WINNING, game.n)


def shapley_weights(n: int) -> np.ndarray:
    """|C|!(n-|C|-1)!/n! for |C| = 0..n-1, computed exactly then rounded once."""
    return np.array([float(Fraction(1, n * comb(n - 1, k))) for k in range(n)])


def shapley_from_table(values: np.ndarray, n: int) -> np.ndarray:
    """Shapley values from a value table indexed by coalition mask."""
    weights = shapley_weights(n)[coalition_sizes(n)]
    phi = np.zeros(n)
    for i in range(n):
        half = 1 << i
        v = values.reshape(-1, 2, half)
        w = weights.reshape(-1, 2, half)[:, 0, :]
        phi[i] = float(np.sum(w * (v[:, 1, :] - v[:, 0, :])))
    return phi


def pivot_counts(table: np.ndarray, n: int) -> np.ndarray:
    """Number of coalitions C not containing i with v(C u {i}) - v(C) = 1, per player."""
    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        half = 1 << i
        view = table.reshape(-1, 2, half)
        counts[i] = int(np.count_nonzero(view[:, 1, :] & ~view[:, 0, :]))
    return counts


def shapley_exact(game: Union[WeightedVotingGame, CharacteristicFn],
                  cap: int = DEFAULT_ENUMERATION_CAP) -> SolutionVector:
    """
    Exact Shapley values by the subset-weighted formula over all 2^n coalitions.

    Args:
        game: Weighted voting game (v(N)=1 required) or any characteristic function
        cap: Enumeration cap on n

    Returns:
        SolutionVector of Shapley values
    """
    if isinstance(game, WeightedVotingGame):
        ensure_solvable(game, cap)
        n = game.n
        values = winning_table(game, cap).astype(float)
    else:
        n = game.n_players
        check_cap(n, cap)
        values = np.asarray(game.values(all_memberships(n)), dtype=float)
    phi = shapley_from_table(values, n)
    return SolutionVector(phi, meta={'concept': 'shapley', 'method': 'exact'})


def banzhaf_exact(game: WeightedVotingGame, normalized: bool = True,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> SolutionVector:
    """
    Exact Banzhaf indices.

    Args:
        game: Game with v(N)=1
        normalized: Divide the raw indices by their sum
        cap: Enumeration cap on n

    Returns:
        SolutionVector of raw or normalized Banzhaf indices
    """
    ensure_solvable(game, cap)
    counts = pivot_counts(winning_table(game, cap), game.n)
    total = int(counts.sum())
    if total == 0:
        raise DegenerateGameError(f"No player is ever pivotal in {game}")
    if normalized:
        beta = counts / total
    else:
        beta = counts / float(1 << (game.n - 1))
    return SolutionVector(beta, meta={'concept': 'banzhaf', 'method': 'exact', 'normalized': normalized})
