"""
Test Games
Unit tests for coalitions, weighted voting games and payoff vectors.
"""

import numpy as np
import pytest

from coopsolve.errors import DimensionError, EnumerationLimitError, InvalidGameError
from coopsolve.games import (
    Coalition,
    SolutionVector,
    WeightedVotingGame,
    char_value,
    ensure_solvable,
    grand_coalition,
    is_imputation,
    normalize_weights,
    parse_weights,
)


class TestCoalition:
    """Test the bitset coalition type."""

    def test_from_members(self):
        """Test building a coalition from player indices."""
        c = Coalition.from_members([0, 2])
        assert c.mask == 0b101
        assert c.members() == (0, 2)
        assert len(c) == 2
        assert 2 in c and 1 not in c

    def test_grand_coalition(self):
        """Test the grand coalition holds every player."""
        assert grand_coalition(4).members() == (0, 1, 2, 3)

    def test_empty(self):
        """Test the empty coalition."""
        assert len(Coalition(0)) == 0
        assert Coalition(0).members() == ()

    def test_out_of_range_member(self):
        """Test a member outside the game is rejected."""
        with pytest.raises(DimensionError):
            Coalition.from_members([64])
        with pytest.raises(DimensionError):
            Coalition.from_members([3]).as_bool(2)


class TestWeightedVotingGame:
    """Test WeightedVotingGame validation and evaluation."""

    def test_negative_weight(self):
        """Test negative weights are invalid."""
        with pytest.raises(InvalidGameError):
            WeightedVotingGame([1.0, -1.0], 1.0)

    def test_non_positive_quota(self):
        """Test a zero quota is invalid."""
        with pytest.raises(InvalidGameError):
            WeightedVotingGame([1.0, 1.0], 0.0)

    def test_weights_are_read_only(self):
        """Test games are immutable."""
        game = WeightedVotingGame([1, 2], 2)
        with pytest.raises(ValueError):
            game.weights[0] = 5.0

    def test_char_value(self):
        """Test the characteristic function of the parliament game."""
        game = WeightedVotingGame([49, 49, 2], 50)
        assert char_value(game, Coalition.from_members([0, 2])) == 1.0
        assert char_value(game, Coalition.from_members([0])) == 0.0
        assert char_value(game, Coalition(0)) == 0.0

    def test_decimal_quota_reached(self):
        """Test that 0.7 + 0.1 reaches a quota of 0.8."""
        game = WeightedVotingGame([0.7, 0.1], 0.8)
        assert char_value(game, grand_coalition(2)) == 1.0
        assert game.grand_coalition_wins

    def test_values_matrix(self):
        """Test batch evaluation of coalitions."""
        game = WeightedVotingGame([2, 1, 1], 3)
        members = np.array([[1, 1, 0], [0, 1, 1], [1, 1, 1]], dtype=bool)
        assert game.values(members).tolist() == [1.0, 0.0, 1.0]

    def test_values_wrong_width(self):
        """Test a membership matrix of the wrong width."""
        game = WeightedVotingGame([2, 1, 1], 3)
        with pytest.raises(DimensionError):
            game.values(np.ones((1, 2), dtype=bool))

    def test_normalized(self):
        """Test normalization to quota 1."""
        game = WeightedVotingGame([2, 1, 1], 4).normalized()
        assert game.quota == 1.0
        np.testing.assert_allclose(game.weights, [0.5, 0.25, 0.25])
        np.testing.assert_allclose(normalize_weights(WeightedVotingGame([3, 6], 2)), [1.5, 3.0])

    def test_with_weight_and_quota(self):
        """Test derived games leave the original untouched."""
        game = WeightedVotingGame([1, 2], 2)
        assert game.with_weight(0, 5).weights.tolist() == [5.0, 2.0]
        assert game.with_quota(3).quota == 3.0
        assert game.weights.tolist() == [1.0, 2.0]

    def test_dict_round_trip(self):
        """Test the JSON game literal."""
        game = WeightedVotingGame.from_dict({'weights': [49, 49, 2], 'quota': 50})
        assert game.to_dict() == {'weights': [49.0, 49.0, 2.0], 'quota': 50.0}

    def test_from_dict_missing_quota(self):
        """Test an incomplete game literal."""
        with pytest.raises(InvalidGameError):
            WeightedVotingGame.from_dict({'weights': [1, 2]})


class TestSolvability:
    """Test solver entry checks."""

    def test_losing_grand_coalition(self):
        """Test v(N)=0 is rejected."""
        with pytest.raises(InvalidGameError):
            ensure_solvable(WeightedVotingGame([1, 1], 3))

    def test_cap(self):
        """Test the enumeration cap."""
        with pytest.raises(EnumerationLimitError):
            ensure_solvable(WeightedVotingGame([1] * 5, 3), cap=4)


class TestSolutionVector:
    """Test payoff vectors and the imputation check."""

    def test_imputation(self):
        """Test efficiency and non-negativity."""
        game = WeightedVotingGame([49, 49, 2], 50)
        assert is_imputation(SolutionVector([1 / 3, 1 / 3, 1 / 3]), game)
        assert not is_imputation(SolutionVector([0.5, 0.6, -0.1]), game)
        assert not is_imputation(np.array([0.5, 0.4, 0.0]), game)

    def test_imputation_wrong_length(self):
        """Test length mismatch."""
        with pytest.raises(DimensionError):
            is_imputation(np.array([1.0]), WeightedVotingGame([1, 1], 1))

    def test_as_row(self):
        """Test the epsilon is appended after the payoffs."""
        assert SolutionVector([0.5, 0.5], lcv=0.25).as_row().tolist() == [0.5, 0.5, 0.25]

    def test_std_errors_length(self):
        """Test std-errors must match the payoffs."""
        with pytest.raises(DimensionError):
            SolutionVector([0.5, 0.5], std_errors=[0.1])


class TestParseWeights:
    """Test the command-line weight list parser."""

    def test_parse(self):
        """Test a comma-separated list."""
        assert parse_weights('49,49,2') == [49.0, 49.0, 2.0]

    def test_parse_invalid(self):
        """Test a malformed list."""
        with pytest.raises(InvalidGameError):
            parse_weights('1,x')


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
