"""
Test Baselines
Unit tests for the weight-proportional heuristic and the multinomial model.
"""

import numpy as np
import pytest

from coopsolve.baselines import LinearPayoffModel, WeightProportional, train_multinomial, weight_proportional
from coopsolve.datagen import make_fixed_dataset, make_variable_dataset
from coopsolve.errors import DimensionError
from coopsolve.games import WeightedVotingGame
from coopsolve.neural import TrainConfig


class TestWeightProportional:
    """Test the quota-blind heuristic."""

    def test_shares(self):
        """Test payoffs follow the weights."""
        solution = weight_proportional(WeightedVotingGame([2, 1, 1], 3))
        np.testing.assert_allclose(solution.payoffs, [0.5, 0.25, 0.25])
        assert solution.meta['method'] == 'weight-proportional'

    def test_parliament_misses_power(self):
        """Test the heuristic underrates the small party."""
        solution = WeightProportional().predict(WeightedVotingGame([49, 49, 2], 50))
        assert solution.payoffs[2] == pytest.approx(0.02)


class TestMultinomial:
    """Test the softmax regression baseline."""

    def test_train(self):
        """Test the baseline has no hidden layer and predicts a distribution."""
        ds = make_fixed_dataset(3, 40, 'banzhaf', seed=0)
        cfg = TrainConfig(max_epochs=20, baseline_epochs=5, patience=5, learning_rate=1e-2, batch_size=8)
        model = train_multinomial(ds, cfg)
        assert isinstance(model, LinearPayoffModel)
        assert model.weight_matrix.shape == (3, 3)
        assert model.bias.shape == (3,)
        assert model.metadata['baseline'] == 'multinomial'
        np.testing.assert_allclose(model.predict(ds.features).sum(axis=1), 1.0)

    def test_variable_dataset_refused(self):
        """Test the baseline only fits fixed layouts."""
        ds = make_variable_dataset([2, 3], 3, 3, 'shapley', seed=0)
        with pytest.raises(DimensionError):
            train_multinomial(ds)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
