"""
Games Module
Core domain types and characteristic-function evaluation for weighted voting
games and generic cooperative games.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Protocol, Tuple, Union

import numpy as np

from .errors import DimensionError, EnumerationLimitError, InvalidGameError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
EVAL_TOLERANCE = 1e-6
DEFAULT_ENUMERATION_CAP = 24
MAX_BITSET_PLAYERS = 64

# Relative slack when comparing a weight sum against the quota
QUOTA_RTOL = 1e-12


class CharacteristicFn(Protocol):
    """Anything that can value a batch of coalitions."""

    n_players: int

    def values(self, members: np.ndarray) -> np.ndarray:
        """Value each row of a boolean (k, n) membership matrix."""
        ...


@dataclass(frozen=True)
class Coalition:
    """A coalition stored as a bitset over players 0..n-1."""

    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >= (1 << MAX_BITSET_PLAYERS):
            raise DimensionError(f"Coalition mask out of range: {self.mask}")

    @classmethod
    def from_members(cls, members: Iterable[int]) -> 'Coalition':
        mask = 0
        for i in members:
            if i < 0 or i >= MAX_BITSET_PLAYERS:
                raise DimensionError(f"Player index out of range: {i}")
            mask |= 1 << int(i)
        return cls(mask)

    def members(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.mask.bit_length()) if self.mask >> i & 1)

    def as_bool(self, n: int) -> np.ndarray:
        """Boolean membership vector of length n."""
        if self.mask >> n:
            raise DimensionError(f"Coalition {self.members()} has members outside 0..{n - 1}")
        return np.array([bool(self.mask >> i & 1) for i in range(n)])

    def __contains__(self, player: int) -> bool:
        return bool(self.mask >> player & 1)

    def __len__(self) -> int:
        return bin(self.mask).count('1')

    def __repr__(self) -> str:
        return f"Coalition({set(self.members()) or '{}'})"


def grand_coalition(n: int) -> Coalition:
    return Coalition((1 << n) - 1)


@dataclass(frozen=True, eq=False)
class WeightedVotingGame:
    """
    Weighted voting game (w, q): a coalition wins iff its weight sum reaches q.

    Weights are stored as a read-only float array. Instances are immutable.
    """

    weights: np.ndarray
    quota: float

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float).reshape(-1)
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'quota', float(self.quota))

        if weights.size < 1:
            raise InvalidGameError("A game needs at least one player")
        if weights.size > MAX_BITSET_PLAYERS:
            raise InvalidGameError(f"At most {MAX_BITSET_PLAYERS} players are supported, got {weights.size}")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InvalidGameError(f"Weights must be finite and non-negative: {weights.tolist()}")
        if not np.isfinite(self.quota) or self.quota <= 0:
            raise InvalidGameError(f"Quota must be positive, got {self.quota}")

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def n_players(self) -> int:
        return self.n

    @cached_property
    def threshold(self) -> float:
        """Quota minus the comparison slack."""
        return self.quota - QUOTA_RTOL * self.quota

    @property
    def total_weight(self) -> float:
        return float(sum(float(w) for w in self.weights))

    @property
    def grand_coalition_wins(self) -> bool:
        return self.total_weight >= self.threshold

    def wins(self, weight_sum: Union[float, np.ndarray]) -> Union[bool, np.ndarray]:
        return weight_sum >= self.threshold

    def values(self, members: np.ndarray) -> np.ndarray:
        members = np.atleast_2d(np.asarray(members, dtype=bool))
        if members.shape[1] != self.n:
            raise DimensionError(f"Expected {self.n} columns, got {members.shape[1]}")
        sums = members.astype(float) @ self.weights
        return self.wins(sums).astype(float)

    def normalized(self) -> 'WeightedVotingGame':
        """Equivalent game with weights w/q and quota 1."""
        return WeightedVotingGame(normalize_weights(self), 1.0)

    def scaled(self, factor: float) -> 'WeightedVotingGame':
        if factor <= 0:
            raise InvalidGameError(f"Scale factor must be positive, got {factor}")
        return WeightedVotingGame(self.weights * factor, self.quota * factor)

    def with_weight(self, player: int, weight: float) -> 'WeightedVotingGame':
        weights = self.weights.copy()
        weights[player] = weight
        return WeightedVotingGame(weights, self.quota)

    def with_quota(self, quota: float) -> 'WeightedVotingGame':
        return WeightedVotingGame(self.weights, quota)

    def to_dict(self) -> Dict:
        return {'weights': self.weights.tolist(), 'quota': self.quota}

    @classmethod
    def from_dict(cls, data: Dict) -> 'WeightedVotingGame':
        try:
            return cls(data['weights'], data['quota'])
        except KeyError as e:
            raise InvalidGameError(f"Game literal is missing field {e}") from e

    def __repr__(self) -> str:
        return f"WeightedVotingGame(weights={self.weights.tolist()}, quota={self.quota})"


@dataclass(frozen=True, eq=False)
class SolutionVector:
    """
    A payoff allocation, optionally with a least-core value and
    per-player standard errors (Monte-Carlo estimates).
    """

    payoffs: np.ndarray
    lcv: Optional[float] = None
    std_errors: Optional[np.ndarray] = None
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        payoffs = np.array(self.payoffs, dtype=float).reshape(-1)
        payoffs.setflags(write=False)
        object.__setattr__(self, 'payoffs', payoffs)
        if self.lcv is not None:
            object.__setattr__(self, 'lcv', float(self.lcv))
        if self.std_errors is not None:
            errors = np.array(self.std_errors, dtype=float).reshape(-1)
            if errors.size != payoffs.size:
                raise DimensionError("std_errors and payoffs differ in length")
            errors.setflags(write=False)
            object.__setattr__(self, 'std_errors', errors)

    @property
    def n(self) -> int:
        return int(self.payoffs.size)

    def as_row(self) -> np.ndarray:
        """Payoffs with the least-core value appended when present."""
        if self.lcv is None:
            return self.payoffs.copy()
        return np.append(self.payoffs, self.lcv)

    def to_dict(self) -> Dict:
        record = {'payoffs': self.payoffs.tolist()}
        if self.lcv is not None:
            record['lcv'] = self.lcv
        if self.std_errors is not None:
            record['std_errors'] = self.std_errors.tolist()
        if self.meta:
            record['meta'] = dict(self.meta)
        return record


def char_value(game: WeightedVotingGame, coalition: Coalition) -> float:
    """
    Value of a coalition in a weighted voting game.

    Args:
        game: The game
        coalition: Coalition over players 0..n-1

    Returns:
        1.0 if the member weights reach the quota, else 0.0
    """
    members = coalition.members()
    if members and members[-1] >= game.n:
        raise DimensionError(f"Coalition {members} has members outside 0..{game.n - 1}")
    if not members:
        return 0.0
    total = 0.0
    for i in members:
        total += float(game.weights[i])
    return 1.0 if game.wins(total) else 0.0


def normalize_weights(game: WeightedVotingGame) -> np.ndarray:
    """Weights divided by the quota; x_i > 1 iff player i wins alone."""
    if game.quota <= 0:
        raise InvalidGameError(f"Quota must be positive, got {game.quota}")
    return game.weights / game.quota


def grand_value(game: WeightedVotingGame) -> float:
    return char_value(game, grand_coalition(game.n))


def ensure_solvable(game: WeightedVotingGame, cap: Optional[int] = None) -> WeightedVotingGame:
    """
    Reject games unsuitable for solution-concept computations.

    Args:
        game: Game to check
        cap: Optional enumeration cap on the number of players

    Returns:
        The same game
    """
    if not game.grand_coalition_wins:
        raise InvalidGameError(
            f"Grand coalition loses: total weight {game.total_weight} < quota {game.quota}"
        )
    if cap is not None and game.n > cap:
        raise EnumerationLimitError(f"{game.n} players exceeds the enumeration cap of {cap}")
    return game


def is_imputation(solution: Union[SolutionVector, np.ndarray], game: WeightedVotingGame,
                  tol: float = DEFAULT_TOLERANCE) -> bool:
    """
    Check non-negativity and efficiency of a payoff vector.

    Args:
        solution: SolutionVector or raw payoff vector
        game: The game the payoffs belong to
        tol: Absolute tolerance

    Returns:
        True if every payoff >= -tol and the payoffs sum to v(N) within tol
    """
    payoffs = solution.payoffs if isinstance(solution, SolutionVector) else np.asarray(solution, dtype=float)
    if payoffs.size != game.n:
        raise DimensionError(f"Payoff length {payoffs.size} does not match {game.n} players")
    if np.any(payoffs < -tol):
        return False
    return abs(float(payoffs.sum()) - grand_value(game)) <= tol


def parse_weights(text: str) -> List[float]:
    """Parse a comma-separated weight list such as '49,49,2'."""
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError as e:
        raise InvalidGameError(f"Could not parse weights '{text}': {e}") from e
