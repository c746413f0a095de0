"""
Sweeps Module
Quota and weight perturbation sweeps with structural transition detection.

A transition is a grid index whose winning-coalition table differs from the
previous grid point's table. Ground truth is constant between transitions.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .api import Concept, SolverAPI
from .evaluation import Predictor, as_predictor, mae
from .exact import winning_table
from .games import WeightedVotingGame
from .neural import PayoffModel

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class SweepResult:
    parameter: str
    concept: str
    grid: np.ndarray
    truth: np.ndarray
    transitions: np.ndarray
    truth_lcv: Optional[np.ndarray] = None
    canonical_truth: Optional[np.ndarray] = None
    predictions: Optional[np.ndarray] = None
    predicted_lcv: Optional[np.ndarray] = None
    errors: Optional[np.ndarray] = None
    canonical_errors: Optional[np.ndarray] = None
    lcv_errors: Optional[np.ndarray] = None
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("Sweep grid must be strictly increasing")
        if self.truth.shape[0] != self.grid.size:
            raise ValueError("Truth rows do not align with the grid")

    def segments(self) -> List[Tuple[int, int]]:
        """Half-open [start, stop) index ranges with a constant winning set."""
        bounds = [0, *self.transitions.tolist(), self.grid.size]
        return [(bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)]

    def to_frame(self) -> pd.DataFrame:
        """One row per grid point, ready for plotting tools."""
        n = self.truth.shape[1]
        frame = pd.DataFrame({self.parameter: self.grid})
        for i in range(n):
            frame[f"truth_{i + 1}"] = self.truth[:, i]
        if self.truth_lcv is not None:
            frame['truth_lcv'] = self.truth_lcv
        if self.canonical_truth is not None:
            for i in range(n):
                frame[f"canonical_{i + 1}"] = self.canonical_truth[:, i]
        if self.predictions is not None:
            for i in range(n):
                frame[f"pred_{i + 1}"] = self.predictions[:, i]
            for i in range(n):
                frame[f"abs_err_{i + 1}"] = np.abs(self.predictions[:, i] - self.truth[:, i])
            frame['mae'] = self.errors
        if self.predicted_lcv is not None:
            frame['pred_lcv'] = self.predicted_lcv
            frame['lcv_abs_err'] = self.lcv_errors
        if self.canonical_errors is not None:
            frame['canonical_mae'] = self.canonical_errors
        flags = np.zeros(self.grid.size, dtype=bool)
        flags[self.transitions] = True
        frame['transition'] = flags
        return frame


def quota_grid(weights: Sequence[float], step: float = 0.1) -> np.ndarray:
    """min(w), min(w)+step, ..., up to sum(w)."""
    if step <= 0:
        raise ValueError(f"Sweep step must be positive, got {step}")
    weights = np.asarray(weights, dtype=float)
    low = float(weights[weights > 0].min()) if np.any(weights > 0) else 0.0
    total = float(sum(float(w) for w in weights))
    count = int(np.floor((total - low) / step + 1e-9))
    grid = np.round(low + step * np.arange(count + 1), 10)
    return np.minimum(grid, total)


def weight_grid(game: WeightedVotingGame, player: int, step: float = 1.0,
                until: float = None) -> np.ndarray:
    """From the player's weight upward; by default stops at the first value above the quota."""
    if step <= 0:
        raise ValueError(f"Sweep step must be positive, got {step}")
    start = float(game.weights[player])
    values = [start]
    while True:
        current = round(values[-1] + step, 10)
        if until is not None:
            if current > until:
                break
        elif values[-1] > game.quota:
            break
        values.append(current)
    return np.array(values)


def _run_sweep(games: List[WeightedVotingGame], grid: np.ndarray, parameter: str,
               concept: Union[Concept, str], predictor: Optional[Predictor],
               api: SolverAPI, compare_canonical: bool) -> SweepResult:
    concept = Concept(concept)
    truths, canonical, transitions = [], [], []
    previous = None
    for index, game in enumerate(games):
        table = winning_table(game, api.cap)
        if previous is not None and not np.array_equal(table, previous):
            transitions.append(index)
        previous = table
        truths.append(api.ground_truth(game, concept))
        if compare_canonical and concept is Concept.LEASTCORE:
            canonical.append(api.ground_truth(game, concept, canonical=True))

    result = SweepResult(
        parameter=parameter,
        concept=concept.value,
        grid=grid,
        truth=np.vstack([t.payoffs for t in truths]),
        transitions=np.array(transitions, dtype=int),
        meta={'players': games[0].n},
    )
    if concept is Concept.LEASTCORE:
        result.truth_lcv = np.array([t.lcv for t in truths])
    if canonical:
        result.canonical_truth = np.vstack([c.payoffs for c in canonical])

    if predictor is not None:
        predictor = as_predictor(predictor)
        predictions = [predictor.predict(game) for game in games]
        result.predictions = np.vstack([p.payoffs for p in predictions])
        result.errors = np.array([mae(t, p) for t, p in zip(result.truth, result.predictions)])
        if concept is Concept.LEASTCORE:
            result.predicted_lcv = np.array([p.lcv for p in predictions])
            result.lcv_errors = np.abs(result.predicted_lcv - result.truth_lcv)
            if canonical:
                result.canonical_errors = np.array(
                    [mae(c, p) for c, p in zip(result.canonical_truth, result.predictions)]
                )
        result.meta['model'] = predictor.name
    logger.info(f"{parameter.capitalize()} sweep over {grid.size} points found {len(transitions)} transitions")
    return result


def quota_sweep(weights: Sequence[float], concept: Union[Concept, str], step: float = 0.1,
                predictor: Union[PayoffModel, Predictor] = None, api: SolverAPI = None,
                compare_canonical: bool = False) -> SweepResult:
    """
    Solve the game at every quota from min(w) to sum(w) in increments of `step`.

    Args:
        weights: Fixed weights
        concept: Solution concept
        step: Quota increment
        predictor: Optional model whose predictions are compared at each point
        api: Solver API for the ground truth
        compare_canonical: Least core only, also compare against canonical targets

    Returns:
        SweepResult over the quota grid
    """
    api = api or SolverAPI()
    grid = quota_grid(weights, step)
    games = [WeightedVotingGame(weights, q) for q in grid]
    return _run_sweep(games, grid, 'quota', concept, predictor, api, compare_canonical)


def weight_sweep(game: WeightedVotingGame, player: int, concept: Union[Concept, str] = Concept.SHAPLEY,
                 step: float = 1.0, until: float = None,
                 predictor: Union[PayoffModel, Predictor] = None, api: SolverAPI = None,
                 compare_canonical: bool = False) -> SweepResult:
    """
    Raise one player's weight in increments of `step`.

    Args:
        game: Base game
        player: Index of the player whose weight is raised
        concept: Solution concept
        step: Weight increment
        until: Last weight to include (default: continue until the weight exceeds the quota)
        predictor: Optional model whose predictions are compared at each point
        api: Solver API for the ground truth
        compare_canonical: Least core only, also compare against canonical targets

    Returns:
        SweepResult over the weight grid
    """
    api = api or SolverAPI()
    grid = weight_grid(game, player, step, until)
    games = [game.with_weight(player, w) for w in grid]
    result = _run_sweep(games, grid, 'weight', concept, predictor, api, compare_canonical)
    result.meta['player'] = player
    return result
