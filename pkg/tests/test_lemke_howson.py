"""
Tests for Lemke-Howson path following on bimatrix games.
"""

from fractions import Fraction

import pytest

from conftest import bimatrix, every_2x2_pattern, random_bimatrix
from tfnp.errors import DimensionMismatch, PivotLimitExceeded
from tfnp.lemke_howson import lemke_howson
from tfnp.normal_form import MixedProfile, NormalFormGame, epsilon_nash_check, support_enumeration_nash


class TestLemkeHowson:
    def test_matching_pennies(self, matching_pennies):
        result = lemke_howson(matching_pennies)
        assert result.profile == MixedProfile.uniform((2, 2))
        assert result.pivots == len(result.bases) - 1

    def test_prisoners_dilemma(self, prisoners_dilemma):
        for label in range(4):
            assert lemke_howson(prisoners_dilemma, label).profile == MixedProfile.pure((2, 2), (1, 1))

    def test_coordination_every_label(self):
        game = bimatrix([[1, 0], [0, 1]], [[1, 0], [0, 1]])
        equilibria = support_enumeration_nash(game)
        for label in range(4):
            result = lemke_howson(game, label)
            assert result.dropped_label == label
            assert result.profile in equilibria

    def test_rectangular(self):
        game = bimatrix([[3, 1, 0], [0, 2, 4]], [[1, 2, 0], [3, 0, 2]])
        result = lemke_howson(game, 2)
        assert epsilon_nash_check(game, result.profile).holds

    def test_every_2x2_pattern(self):
        for index, game in enumerate(every_2x2_pattern()):
            result = lemke_howson(game, index % 4)
            assert epsilon_nash_check(game, result.profile, 0).holds
            assert result.profile in support_enumeration_nash(game)

    def test_random_4x4(self, rng):
        for _ in range(100):
            game = random_bimatrix(rng, 4, 4)
            result = lemke_howson(game, rng.randrange(8))
            assert epsilon_nash_check(game, result.profile, 0).holds
            assert result.profile in support_enumeration_nash(game)

    @pytest.mark.parametrize("size", [2, 3, 4])
    def test_random_rectangular(self, rng, size):
        for _ in range(8):
            game = random_bimatrix(rng, size, size + 1)
            result = lemke_howson(game, rng.randrange(2 * size + 1))
            assert epsilon_nash_check(game, result.profile, 0).holds

    @pytest.mark.parametrize("size", [2, 3, 4, 5, 6])
    def test_never_revisits_a_basis(self, rng, size):
        for _ in range(3):
            game = random_bimatrix(rng, size, size)
            for label in range(2 * size):
                result = lemke_howson(game, label)
                assert len(set(result.bases)) == len(result.bases)
                assert result.pivots == len(result.bases) - 1

    def test_label_out_of_range(self, matching_pennies):
        with pytest.raises(DimensionMismatch):
            lemke_howson(matching_pennies, 4)

    def test_pivot_limit(self, matching_pennies):
        with pytest.raises(PivotLimitExceeded):
            lemke_howson(matching_pennies, pivot_limit=1)

    def test_needs_two_players(self):
        game = NormalFormGame.from_function((2, 2, 2), lambda i, p: Fraction(sum(p)))
        with pytest.raises(DimensionMismatch):
            lemke_howson(game)
