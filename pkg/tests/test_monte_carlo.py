"""
Test Monte Carlo
Sampling estimators checked against exact values and for seed reproducibility.
"""

import numpy as np
import pytest

from coopsolve.datagen import sample_games
from coopsolve.evaluation import mae
from coopsolve.exact import banzhaf_exact, shapley_exact
from coopsolve.games import WeightedVotingGame
from coopsolve.monte_carlo import McConfig, banzhaf_mc, sample_permutations, shapley_mc


class AdditiveFn:
    def __init__(self, values):
        self.a = np.asarray(values, dtype=float)
        self.n_players = self.a.size

    def values(self, members: np.ndarray) -> np.ndarray:
        return members.astype(float) @ self.a


@pytest.fixture
def game():
    return WeightedVotingGame([5, 4, 3, 2, 1, 1], 9)


class TestMcConfig:
    """Test sampling budgets."""

    def test_invalid(self):
        """Test non-positive budgets."""
        with pytest.raises(ValueError):
            McConfig(permutations=0)
        with pytest.raises(ValueError):
            McConfig(resamples=0)

    def test_with_seed(self):
        """Test re-seeding keeps the budget."""
        cfg = McConfig(permutations=50, resamples=3, seed=1).with_seed(9)
        assert (cfg.permutations, cfg.resamples, cfg.seed) == (50, 3, 9)
        assert len(cfg.seed_sequences()) == 3

    def test_sample_permutations(self):
        """Test each row is a permutation."""
        perms = sample_permutations(np.random.default_rng(0), 20, 5)
        assert perms.shape == (20, 5)
        assert all(sorted(row) == list(range(5)) for row in perms)


class TestShapleyMc:
    """Test the permutation estimator."""

    def test_close_to_exact(self, game):
        """Test estimates fall within a few standard errors of the exact values."""
        cfg = McConfig(permutations=2000, resamples=5, seed=3)
        estimate = shapley_mc(game, cfg)
        exact = shapley_exact(game).payoffs
        assert np.all(np.abs(estimate.payoffs - exact) <= 5 * estimate.std_errors + 1e-3)
        assert estimate.meta['method'] == 'mc'

    def test_efficiency(self, game):
        """Test every permutation hands out exactly one unit."""
        estimate = shapley_mc(game, McConfig(permutations=37, resamples=3, seed=0))
        assert estimate.payoffs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_reproducible(self, game):
        """Test equal seeds give equal estimates, also with threads."""
        cfg = McConfig(permutations=200, resamples=4, seed=11)
        first = shapley_mc(game, cfg)
        second = shapley_mc(game, cfg, n_jobs=2)
        np.testing.assert_array_equal(first.payoffs, second.payoffs)
        other = shapley_mc(game, cfg.with_seed(12))
        assert not np.array_equal(first.payoffs, other.payoffs)

    def test_characteristic_function(self):
        """Test an additive function has zero-variance marginals."""
        estimate = shapley_mc(AdditiveFn([1.0, 2.0, -0.5]), McConfig(permutations=100, resamples=2))
        np.testing.assert_allclose(estimate.payoffs, [1.0, 2.0, -0.5], atol=1e-12)
        np.testing.assert_allclose(estimate.std_errors, 0.0, atol=1e-7)


class TestShapleyMcFidelity:
    """Test the estimator against exact values over many games."""

    def test_unbiased_over_seeds(self, game):
        """Test the average of many small-budget estimates approaches the exact value."""
        estimates = np.array([
            shapley_mc(game, McConfig(permutations=20, resamples=1, seed=seed)).payoffs
            for seed in range(400)
        ])
        exact = shapley_exact(game).payoffs
        spread = estimates.std(axis=0, ddof=1) / np.sqrt(len(estimates))
        assert np.all(np.abs(estimates.mean(axis=0) - exact) <= 4 * spread + 1e-12)

    @pytest.mark.slow
    @pytest.mark.parametrize('n', range(5, 11))
    def test_mean_mae_over_thousand_games(self, n):
        """Test 1000 permutations times 10 resamples keep the mean MAE at or below 0.0014."""
        games = sample_games(n, 1000, seed=n)
        errors = [
            mae(shapley_exact(g).payoffs, shapley_mc(g, McConfig(permutations=1000, resamples=10, seed=row)).payoffs)
            for row, g in enumerate(games)
        ]
        assert np.mean(errors) <= 0.0014


class TestBanzhafMc:
    """Test the subset estimator."""

    def test_close_to_exact(self, game):
        """Test raw estimates against exact raw indices."""
        estimate = banzhaf_mc(game, McConfig(permutations=4000, resamples=5, seed=5))
        exact = banzhaf_exact(game, normalized=False).payoffs
        np.testing.assert_allclose(estimate.payoffs, exact, atol=0.03)

    def test_normalized(self, game):
        """Test normalized estimates sum to one."""
        estimate = banzhaf_mc(game, McConfig(permutations=500, resamples=2), normalized=True)
        assert estimate.payoffs.sum() == pytest.approx(1.0)
        assert estimate.meta['normalized'] is True


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
