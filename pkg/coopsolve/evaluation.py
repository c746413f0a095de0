"""
Evaluation Module
Mean absolute error metrics and model evaluation on the test distributions.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from .api import Concept, SolverAPI
from .datagen import sample_games, test_distribution
from .errors import DimensionError
from .games import EVAL_TOLERANCE, SolutionVector, WeightedVotingGame, is_imputation
from .least_core import check_feasibility, max_excess
from .neural import PayoffModel, predict_many

logger = logging.getLogger(__name__)


class Predictor(Protocol):
    name: str

    def predict(self, game: WeightedVotingGame) -> SolutionVector:
        ...


class ExactOracle:
    """Ground truth posing as a model."""

    def __init__(self, concept: Union[Concept, str], api: SolverAPI = None, canonical: bool = False):
        self.concept = Concept(concept)
        self.api = api or SolverAPI()
        self.canonical = canonical
        self.name = f"oracle-{self.concept.value}"

    def predict(self, game: WeightedVotingGame) -> SolutionVector:
        return self.api.ground_truth(game, self.concept, canonical=self.canonical)


class ModelPredictor:
    """Adapter from PayoffModel to the Predictor protocol."""

    def __init__(self, model: PayoffModel, name: str = None):
        self.model = model
        self.name = name or model.metadata.get('name', f"{model.layout}-{model.metadata.get('concept')}")

    def predict(self, game: WeightedVotingGame) -> SolutionVector:
        return predict_many(self.model, [game])[0]

    def predict_many(self, games: Sequence[WeightedVotingGame]) -> List[SolutionVector]:
        return predict_many(self.model, games)


def as_predictor(model: Union[PayoffModel, Predictor]) -> Predictor:
    return ModelPredictor(model) if isinstance(model, PayoffModel) else model


def predict_all(predictor: Predictor, games: Sequence[WeightedVotingGame]) -> List[SolutionVector]:
    if hasattr(predictor, 'predict_many'):
        return predictor.predict_many(games)
    return [predictor.predict(game) for game in games]


def mae(p, p_hat) -> float:
    """
    Mean absolute per-player deviation.

    Args:
        p: True payoffs
        p_hat: Predicted payoffs

    Returns:
        mean_i |p_i - p_hat_i|
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    p_hat = np.asarray(p_hat, dtype=float).reshape(-1)
    if p.size != p_hat.size:
        raise DimensionError(f"Cannot compare {p.size} payoffs with {p_hat.size}")
    return float(np.mean(np.abs(p - p_hat)))


@dataclass
class EvalReport:
    concept: str
    distribution: str
    n: int
    model: str
    per_game_mae: np.ndarray
    feasibility_rate: float
    epsilon_mae: Optional[float] = None
    mean_max_excess: Optional[float] = None
    canonical_mae: Optional[float] = None
    seed: int = 0
    config: Dict = field(default_factory=dict)

    @property
    def mean_mae(self) -> float:
        return float(np.mean(self.per_game_mae)) if self.per_game_mae.size else float('nan')

    @property
    def games(self) -> int:
        return int(self.per_game_mae.size)

    def to_dict(self) -> Dict:
        return {
            'concept': self.concept,
            'distribution': self.distribution,
            'n': self.n,
            'model': self.model,
            'games': self.games,
            'seed': self.seed,
            'mean_mae': self.mean_mae,
            'per_game_mae': self.per_game_mae.tolist(),
            'feasibility_rate': self.feasibility_rate,
            'epsilon_mae': self.epsilon_mae,
            'mean_max_excess': self.mean_max_excess,
            'canonical_mae': self.canonical_mae,
            'config': self.config,
        }


def _feasible(game: WeightedVotingGame, concept: Concept, prediction: SolutionVector) -> bool:
    if concept is Concept.LEASTCORE:
        return bool(check_feasibility(game, prediction.payoffs, prediction.lcv, tol=EVAL_TOLERANCE))
    return is_imputation(prediction, game, tol=EVAL_TOLERANCE)


def evaluate_model(model: Union[PayoffModel, Predictor], concept: Union[Concept, str],
                   test_dist: str, n: int, games_per_n: int = 1000, seed: int = 0,
                   api: SolverAPI = None, compare_canonical: bool = False,
                   n_jobs: int = 1) -> EvalReport:
    """
    Evaluate a model against ground truth on freshly sampled test games.

    Args:
        model: PayoffModel or any predictor
        concept: Solution concept the model predicts
        test_dist: Test distribution name
        n: Number of players
        games_per_n: Test games to sample
        seed: Seed for the test games
        api: Solver API computing the ground truth
        compare_canonical: Least core only, also report MAE against canonical targets
        n_jobs: Parallel workers for the ground truth

    Returns:
        EvalReport
    """
    concept = Concept(concept)
    api = api or SolverAPI()
    predictor = as_predictor(model)
    games = sample_games(n, games_per_n, test_distribution(test_dist, n), seed)
    logger.info(f"Evaluating {predictor.name} on {games_per_n} {test_dist} games with n={n}")

    def truth(game, canonical=False):
        return api.ground_truth(game, concept, canonical=canonical)

    if n_jobs == 1:
        truths = [truth(g) for g in games]
    else:
        truths = Parallel(n_jobs=n_jobs)(delayed(truth)(g) for g in games)
    predictions = predict_all(predictor, games)

    per_game = np.array([mae(t.payoffs, p.payoffs) for t, p in zip(truths, predictions)])
    feasible = [_feasible(g, concept, p) for g, p in zip(games, predictions)]
    report = EvalReport(
        concept=concept.value,
        distribution=test_dist,
        n=n,
        model=predictor.name,
        per_game_mae=per_game,
        feasibility_rate=float(np.mean(feasible)) if feasible else float('nan'),
        seed=seed,
        config={'games_per_n': games_per_n, 'enumeration_cap': api.cap, 'mc_threshold': api.mc_threshold},
    )
    if concept is Concept.LEASTCORE:
        report.epsilon_mae = float(np.mean([abs(t.lcv - p.lcv) for t, p in zip(truths, predictions)]))
        report.mean_max_excess = float(np.mean([max_excess(g, p.payoffs, api.cap) for g, p in zip(games, predictions)]))
        if compare_canonical:
            canonical = [truth(g, canonical=True) for g in games]
            report.canonical_mae = float(np.mean([mae(c.payoffs, p.payoffs) for c, p in zip(canonical, predictions)]))
    logger.info(f"Mean MAE {report.mean_mae:.6f}, feasibility rate {report.feasibility_rate:.3f}")
    return report
