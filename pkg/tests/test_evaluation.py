"""
Test Evaluation
Unit tests for MAE, feasibility rates and model evaluation reports.
"""

import numpy as np
import pytest

from coopsolve.baselines import WeightProportional, train_multinomial
from coopsolve.datagen import make_fixed_dataset
from coopsolve.errors import DimensionError
from coopsolve.evaluation import ExactOracle, ModelPredictor, as_predictor, evaluate_model, mae
from coopsolve.neural import MlpArchitecture, PayoffModel, TrainConfig, train


class TestMae:
    """Test the per-game error."""

    def test_value(self):
        """Test the mean absolute deviation."""
        assert mae([0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.25)

    def test_length_mismatch(self):
        """Test vectors must align."""
        with pytest.raises(DimensionError):
            mae([0.5, 0.5], [1.0])


class TestEvaluateModel:
    """Test evaluation reports."""

    def test_oracle_is_perfect(self):
        """Test the exact solver scores zero error and full feasibility."""
        report = evaluate_model(ExactOracle('shapley'), 'shapley', 'in-sample', 4, games_per_n=10, seed=1)
        assert report.games == 10
        assert report.mean_mae == pytest.approx(0.0, abs=1e-12)
        assert report.feasibility_rate == 1.0
        assert report.model == 'oracle-shapley'

    def test_least_core_oracle(self):
        """Test least-core reports carry epsilon metrics."""
        report = evaluate_model(ExactOracle('leastcore'), 'leastcore', 'slight-ood', 4, games_per_n=5,
                                compare_canonical=True)
        assert report.epsilon_mae == pytest.approx(0.0, abs=1e-9)
        assert report.feasibility_rate == 1.0
        assert report.canonical_mae is not None
        assert report.to_dict()['mean_max_excess'] == pytest.approx(report.mean_max_excess)

    def test_heuristic_has_error(self):
        """Test the weight-proportional baseline is imperfect but feasible."""
        report = evaluate_model(WeightProportional(), 'shapley', 'out-of-sample', 4, games_per_n=20, seed=3)
        assert report.mean_mae > 0.0
        assert report.feasibility_rate == 1.0

    def test_model_predictor(self):
        """Test PayoffModel instances are wrapped automatically."""
        model = PayoffModel.initialize(MlpArchitecture(3, 3, hidden=(4,)), np.random.default_rng(0),
                                       metadata={'concept': 'banzhaf', 'layout': 'fixed'})
        predictor = as_predictor(model)
        assert isinstance(predictor, ModelPredictor)
        report = evaluate_model(model, 'banzhaf', 'in-sample', 3, games_per_n=5)
        assert report.per_game_mae.shape == (5,)
        assert report.model == 'fixed-banzhaf'

    def test_same_seed_same_games(self):
        """Test reports are reproducible."""
        a = evaluate_model(WeightProportional(), 'banzhaf', 'moderate-ood', 3, games_per_n=8, seed=9)
        b = evaluate_model(WeightProportional(), 'banzhaf', 'moderate-ood', 3, games_per_n=8, seed=9)
        np.testing.assert_array_equal(a.per_game_mae, b.per_game_mae)


class TestLearningAtDeskScale:
    """Test a trained four-player Shapley model against the baselines."""

    @pytest.mark.slow
    def test_model_beats_baselines(self):
        """Test one run on 5000 games reaches mean MAE 0.09 and beats both baselines."""
        dataset = make_fixed_dataset(4, 5000, 'shapley', seed=0)
        model, _ = train(dataset, cfg=TrainConfig.fixed(seed=0))
        multinomial = train_multinomial(dataset, TrainConfig.fixed(seed=0))

        reports = {
            name: evaluate_model(predictor, 'shapley', 'in-sample', 4, games_per_n=1000, seed=1)
            for name, predictor in [('model', model), ('weights', WeightProportional()),
                                    ('multinomial', multinomial)]
        }
        assert reports['model'].mean_mae <= 0.09
        assert reports['model'].mean_mae < reports['weights'].mean_mae
        assert reports['model'].mean_mae < reports['multinomial'].mean_mae
        assert reports['model'].feasibility_rate == 1.0


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
