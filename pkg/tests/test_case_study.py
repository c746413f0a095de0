"""
Test Case Study
Unit tests for the EU council games and the case-study report.
"""

import numpy as np
import pytest

from coopsolve.api import SolverAPI
from coopsolve.case_study import (
    EU_STATES,
    EU4_QUOTA,
    eu4_game,
    eu_case_study,
    eu_council_game,
    majority_quota,
)
from coopsolve.errors import MissingModelError
from coopsolve.monte_carlo import McConfig
from coopsolve.neural import MlpArchitecture, PayoffModel


def make_model(width, concept, layout, epsilon=False):
    arch = MlpArchitecture(width, width, hidden=(8,), epsilon_head=epsilon)
    return PayoffModel.initialize(arch, np.random.default_rng(0), metadata={'concept': concept, 'layout': layout})


class TestGames:
    """Test the council games."""

    def test_eu4(self):
        """Test the four-state game."""
        game = eu4_game()
        assert game.n == 4
        assert game.quota == EU4_QUOTA

    def test_council(self):
        """Test twenty states under a simple-majority quota."""
        game = eu_council_game()
        assert game.n == len(EU_STATES) == 20
        assert game.total_weight == 315.0
        assert game.quota == majority_quota(game.weights) == 158.5


class TestCaseStudy:
    """Test report assembly."""

    def test_needs_a_model(self):
        """Test an empty model set is refused."""
        with pytest.raises(MissingModelError):
            eu_case_study()

    def test_fixed_models(self):
        """Test fixed models are compared on the four-state game only."""
        report = eu_case_study(fixed_models={
            'shapley': make_model(4, 'shapley', 'fixed'),
            'leastcore': make_model(4, 'leastcore', 'fixed', epsilon=True),
        })
        frame = report.to_frame()
        assert set(frame['game']) == {'eu4-fixed'}
        assert len(frame) == 8
        assert report.mean_mae('eu4-fixed', 'shapley') is not None
        assert 'eu4-fixed/banzhaf' in report.missing
        assert 'eu20-variable/shapley' in report.missing
        lc = [s for s in report.summary if s['concept'] == 'leastcore'][0]
        assert 0.0 < lc['predicted_lcv'] < 1.0

    def test_narrow_variable_model_skips_council(self):
        """Test a variable model narrower than 20 players skips the council."""
        report = eu_case_study(variable_models={'banzhaf': make_model(6, 'banzhaf', 'variable')})
        assert report.mean_mae('eu4-variable', 'banzhaf') is not None
        assert 'eu20-variable/banzhaf' in report.missing

    @pytest.mark.slow
    def test_council_shapley_by_sampling(self):
        """Test the twenty-state council is labeled by sampling."""
        api = SolverAPI(mc_config=McConfig(permutations=200, resamples=2, seed=0))
        report = eu_case_study(variable_models={'shapley': make_model(20, 'shapley', 'variable')}, api=api)
        council = [s for s in report.summary if s['game'] == 'eu20-variable'][0]
        assert council['truth_method'] == 'mc'
        assert len(report.to_frame().query("game == 'eu20-variable'")) == 20


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
