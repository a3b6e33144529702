"""
Tests for normal-form games: payoffs, gains, Nash's map and support enumeration.
"""

import math
from collections.abc import Iterator
from fractions import Fraction
from itertools import product

import pytest

from conftest import bimatrix, every_2x2_pattern, nondegenerate_2x2
from tfnp.circuits import circuit_eval, export_nash_circuit
from tfnp.errors import DimensionMismatch, SizeCapExceeded
from tfnp.normal_form import (
    Deviation,
    MixedProfile,
    NormalFormGame,
    best_pure_deviation,
    deviation_payoff,
    epsilon_nash_check,
    expected_payoff,
    gain,
    grid_profiles,
    nash_map,
    pure_equilibria,
    strong_to_weak_radius,
    support_enumeration_nash,
)

HALF = Fraction(1, 2)


def grid_neighbours(x: MixedProfile, denominator: int, radius: Fraction) -> Iterator[MixedProfile]:
    """Profiles of a 2x2 game on the ``1/denominator`` grid within ``radius`` of ``x``."""
    choices = []
    for p, _ in x.blocks:
        low = max(0, math.ceil((p - radius) * denominator))
        high = min(denominator, math.floor((p + radius) * denominator))
        choices.append([Fraction(k, denominator) for k in range(low, high + 1)])
    for p, q in product(*choices):
        yield MixedProfile.of((p, 1 - p), (q, 1 - q))


@pytest.fixture()
def weighted_coordination() -> NormalFormGame:
    return bimatrix([[4, 0], [0, 2]], [[4, 0], [0, 2]])


class TestNormalFormGame:
    def test_dimensions_are_checked(self):
        with pytest.raises(DimensionMismatch):
            NormalFormGame((2, 2), ((1, 2, 3, 4),))
        with pytest.raises(DimensionMismatch):
            bimatrix([[1, 2]], [[1], [2]])

    def test_tensors(self):
        game = NormalFormGame.from_tensors([[[1, 2], [3, 4]], [["1/2", 0], [0, 1]]])
        assert game.strategy_counts == (2, 2)
        assert game.payoff(0, (1, 0)) == 3
        assert game.payoff(1, (0, 0)) == HALF
        assert NormalFormGame.from_tensors(game.to_tensors()) == game

    def test_ragged_tensor(self):
        with pytest.raises(DimensionMismatch):
            NormalFormGame.from_tensors([[[1, 2], [3]], [[1, 2], [3, 4]]])

    def test_profile_index_range(self, matching_pennies):
        with pytest.raises(DimensionMismatch):
            matching_pennies.index((0, 2))

    def test_mixed_profile_must_be_distribution(self):
        with pytest.raises(DimensionMismatch):
            MixedProfile.of([HALF, HALF], [1, 1])
        with pytest.raises(DimensionMismatch):
            MixedProfile.of([])


class TestPayoffs:
    def test_matching_pennies_uniform(self, matching_pennies):
        x = MixedProfile.uniform((2, 2))
        assert expected_payoff(matching_pennies, x, 0) == 0
        assert all(gain(matching_pennies, x, i, j) == 0 for i in range(2) for j in range(2))

    def test_three_players(self):
        game = NormalFormGame.from_function((2, 2, 2), lambda i, p: sum(p))
        x = MixedProfile.uniform((2, 2, 2))
        assert expected_payoff(game, x, 2) == Fraction(3, 2)
        assert deviation_payoff(game, x, 0, 1) == 2
        assert gain(game, x, 0, 1) == HALF
        assert gain(game, x, 0, 0) == -HALF

    def test_gains_at_pure_equilibrium(self, prisoners_dilemma):
        x = MixedProfile.pure((2, 2), (1, 1))
        assert all(gain(prisoners_dilemma, x, i, j) <= 0 for i in range(2) for j in range(2))

    def test_size_mismatch(self, matching_pennies):
        with pytest.raises(DimensionMismatch):
            expected_payoff(matching_pennies, MixedProfile.uniform((3, 2)), 0)


class TestNashMap:
    def test_fixes_matching_pennies_equilibrium(self, matching_pennies):
        x = MixedProfile.uniform((2, 2))
        assert nash_map(matching_pennies, x) == x

    def test_moves_toward_better_reply(self, weighted_coordination):
        image = nash_map(weighted_coordination, MixedProfile.uniform((2, 2)))
        assert image.blocks[0] == (Fraction(2, 3), Fraction(1, 3))

    def test_image_is_a_profile(self, rng):
        for _ in range(20):
            game = nondegenerate_2x2(rng, -5, 5)
            for x in grid_profiles((2, 2), 3):
                image = nash_map(game, x)
                assert all(sum(b) == 1 and min(b) >= 0 for b in image.blocks)

    def test_fixed_points_are_equilibria(self, coordination):
        for x in support_enumeration_nash(coordination):
            assert nash_map(coordination, x) == x

    def test_fixed_point_iff_exact_equilibrium(self, rng):
        for _ in range(40):
            game = bimatrix(*([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)] for _ in range(2)))
            for d in range(1, 5):
                for x in grid_profiles((2, 2), d):
                    assert epsilon_nash_check(game, x, 0).holds == (nash_map(game, x) == x)

    def test_every_2x2_equilibrium_is_fixed(self):
        for game in every_2x2_pattern():
            circuit = export_nash_circuit(game, "ratio")
            for x in support_enumeration_nash(game):
                assert nash_map(game, x) == x
                assert circuit_eval(circuit, x.flat) == x.flat


class TestEpsilonNash:
    def test_exact_equilibrium(self, prisoners_dilemma):
        check = epsilon_nash_check(prisoners_dilemma, MixedProfile.pure((2, 2), (1, 1)))
        assert check.holds
        assert check.worst_gain == 0

    def test_fails_with_worst_gain(self, weighted_coordination):
        check = epsilon_nash_check(weighted_coordination, MixedProfile.uniform((2, 2)), "1/4")
        assert not check.holds
        assert check.worst_gain == HALF
        assert check.worst == (0, 0)

    def test_payoff_range_always_holds(self, rng):
        for _ in range(10):
            game = nondegenerate_2x2(rng)
            for x in grid_profiles((2, 2), 2):
                assert epsilon_nash_check(game, x, 4).holds

    def test_radius(self, prisoners_dilemma):
        assert strong_to_weak_radius(prisoners_dilemma, 1) == Fraction(1, 40)

    def test_grid_near_an_equilibrium_is_approximate(self, rng):
        eps = Fraction(1, 100)
        for _ in range(40):
            game = nondegenerate_2x2(rng)
            radius = strong_to_weak_radius(game, eps)
            denominator = 4 * math.ceil(1 / radius)
            for x in support_enumeration_nash(game):
                nearby = list(grid_neighbours(x, denominator, radius))
                assert nearby
                for y in nearby:
                    assert epsilon_nash_check(game, y, eps).holds


class TestPureEquilibria:
    def test_prisoners_dilemma(self, prisoners_dilemma):
        assert pure_equilibria(prisoners_dilemma) == [(1, 1)]
        assert best_pure_deviation(prisoners_dilemma, (0, 0)) == Deviation(0, 1, Fraction(2))

    def test_matching_pennies_has_none(self, matching_pennies):
        assert pure_equilibria(matching_pennies) == []

    def test_grid_size(self):
        assert len(list(grid_profiles((2, 2), 2))) == 9


class TestSupportEnumeration:
    def test_coordination(self):
        game = bimatrix([[1, 0], [0, 1]], [[1, 0], [0, 1]])
        assert support_enumeration_nash(game) == (
            MixedProfile.of([1, 0], [1, 0]),
            MixedProfile.of([0, 1], [0, 1]),
            MixedProfile.of([HALF, HALF], [HALF, HALF]),
        )

    def test_weighted_mixed_equilibrium(self, coordination):
        third = Fraction(1, 3)
        assert MixedProfile.of([third, 2 * third], [third, 2 * third]) in support_enumeration_nash(coordination)

    def test_matching_pennies(self, matching_pennies):
        assert support_enumeration_nash(matching_pennies) == (MixedProfile.uniform((2, 2)),)

    def test_every_result_is_exact(self, rng):
        for _ in range(20):
            game = nondegenerate_2x2(rng, -4, 4)
            found = support_enumeration_nash(game)
            assert found
            assert all(epsilon_nash_check(game, x).holds for x in found)

    def test_size_cap(self):
        game = bimatrix([[0] * 6] * 6, [[0] * 6] * 6)
        with pytest.raises(SizeCapExceeded):
            support_enumeration_nash(game)
