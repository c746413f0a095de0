"""
Baselines Module
Reference allocators: the weight-proportional heuristic and multinomial
logistic regression (a softmax layer with no hidden units).
"""

import logging

import numpy as np

from .errors import DegenerateGameError, DimensionError
from .games import SolutionVector, WeightedVotingGame
from .neural import MlpArchitecture, PayoffModel, TrainConfig, train

logger = logging.getLogger(__name__)


def weight_proportional(game: WeightedVotingGame) -> SolutionVector:
    """
    Allocate payoffs in proportion to the raw weights, ignoring the quota.

    Args:
        game: The game

    Returns:
        SolutionVector with p_j = w_j / sum(w)
    """
    total = float(np.sum(game.weights))
    if total <= 0.0:
        raise DegenerateGameError(f"All weights are zero in {game}")
    return SolutionVector(game.weights / total, meta={'concept': 'heuristic', 'method': 'weight-proportional'})


class WeightProportional:
    """Predictor wrapper around weight_proportional."""

    name = 'weight-proportional'

    def predict(self, game: WeightedVotingGame) -> SolutionVector:
        return weight_proportional(game)


class LinearPayoffModel(PayoffModel):
    """Single softmax layer: n inputs, n outputs."""

    @property
    def weight_matrix(self) -> np.ndarray:
        return self.weights[0]

    @property
    def bias(self) -> np.ndarray:
        return self.biases[0]

    @classmethod
    def from_model(cls, model: PayoffModel) -> 'LinearPayoffModel':
        if model.architecture.hidden:
            raise DimensionError("A linear payoff model has no hidden layers")
        return cls(model.architecture, model.weights, model.biases, model.metadata)


def train_multinomial(dataset, cfg: TrainConfig = None) -> LinearPayoffModel:
    """
    Fit a multinomial logistic regression with the same optimizer, split and
    early stopping as the neural models.

    Args:
        dataset: Fixed-size GameDataset of index labels
        cfg: Training configuration

    Returns:
        LinearPayoffModel
    """
    if dataset.metadata.layout != 'fixed':
        raise DimensionError("The multinomial baseline needs a fixed-size dataset")
    arch = MlpArchitecture(
        input_dim=dataset.n_features,
        payoff_dim=dataset.n_features,
        hidden=(),
        dropout=0.0,
        epsilon_head=dataset.metadata.has_epsilon,
    )
    cfg = cfg or TrainConfig.fixed()
    model, curve = train(dataset, arch, cfg)
    model.metadata['baseline'] = 'multinomial'
    logger.info(f"Multinomial baseline: {curve.epochs_run} epochs, best validation loss {curve.best_loss:.6g}")
    return LinearPayoffModel.from_model(model)
