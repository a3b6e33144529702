"""
Tests for mean-payoff and parity games.
"""

import random
from fractions import Fraction

import pytest

from tfnp.errors import DimensionMismatch, SizeCapExceeded
from tfnp.mean_payoff import (
    MeanPayoffGame,
    ParityGame,
    brute_force_mpg,
    brute_force_parity,
    brute_force_positional,
    certify_mpg,
    certify_parity,
    mpg_decision,
    mpg_solve,
    parity_solve,
    parity_to_mpg,
    parity_winner,
)
from tfnp.ssg import SimpleStochasticGame

METHODS = ["value-iteration", "strategy-iteration"]


@pytest.fixture()
def loop_or_cycle() -> MeanPayoffGame:
    # node 0 picks its own loop (2) or the cycle through node 1 (4 then 6)
    return MeanPayoffGame.build([1, 2], [[(0, 2), (1, 4)], [(0, 6)]])


def random_mpg(rng: random.Random, n: int) -> MeanPayoffGame:
    owners = [rng.choice([1, 2]) for _ in range(n)]
    edges = [
        [(rng.randrange(n), rng.randint(-10, 10)) for _ in range(rng.randint(1, 2))] for _ in range(n)
    ]
    return MeanPayoffGame.build(owners, edges)


def random_parity(rng: random.Random, n: int) -> ParityGame:
    return ParityGame(
        tuple(rng.choice([1, 2]) for _ in range(n)),
        tuple(tuple(sorted(set(rng.choices(range(n), k=2)))) for _ in range(n)),
        tuple(rng.randint(1, 4) for _ in range(n)),
    )


class TestMeanPayoffGame:
    def test_needs_outgoing_edges(self):
        with pytest.raises(DimensionMismatch):
            MeanPayoffGame.build([1, 1], [[(1, 0)], []])

    def test_edge_range(self):
        with pytest.raises(DimensionMismatch):
            MeanPayoffGame.build([1], [[(3, 0)]])

    def test_owner(self):
        with pytest.raises(DimensionMismatch):
            MeanPayoffGame.build([3], [[(0, 0)]])

    def test_max_reward(self, loop_or_cycle):
        assert loop_or_cycle.max_reward == 6
        assert loop_or_cycle.owned(2) == [1]


class TestMpgSolve:
    @pytest.mark.parametrize("method", METHODS)
    def test_self_loop(self, method):
        assert mpg_solve(MeanPayoffGame.build([2], [[(0, -7)]]), method=method).values == (-7,)

    @pytest.mark.parametrize("method", METHODS)
    def test_two_cycle(self, method):
        g = MeanPayoffGame.build([1, 2], [[(1, 1)], [(0, 3)]])
        assert mpg_solve(g, method=method).values == (2, 2)

    @pytest.mark.parametrize("method", METHODS)
    def test_choice(self, loop_or_cycle, method):
        solution = mpg_solve(loop_or_cycle, method=method)
        assert solution.values == (5, 5)
        assert solution.max_strategy == {0: 1}
        assert solution.method == method

    def test_value_iteration_horizon(self, loop_or_cycle):
        assert mpg_solve(loop_or_cycle).horizon == 4 * 2**3 * 6

    def test_min_player_escapes(self):
        # node 1 (min) leaves the profitable loop for a losing one
        g = MeanPayoffGame.build([1, 2, 1], [[(1, 0)], [(0, 8), (2, 0)], [(2, -1)]])
        solution = mpg_solve(g)
        assert solution.values == (-1, -1, -1)
        assert solution.min_strategy == {1: 2}

    def test_matches_brute_force(self, rng):
        for index in range(500):
            g = random_mpg(rng, rng.randint(1, 6))
            solution = mpg_solve(g, method=METHODS[index % 2])
            assert solution.values == brute_force_mpg(g)
            assert all(v.denominator <= len(g) for v in solution.values)
            assert certify_mpg(g, solution.values, solution.max_strategy, solution.min_strategy)

    def test_unknown_method(self, loop_or_cycle):
        with pytest.raises(ValueError):
            mpg_solve(loop_or_cycle, method="policy")  # type: ignore[arg-type]

    def test_certify_rejects_wrong_values(self, loop_or_cycle):
        assert not certify_mpg(loop_or_cycle, (Fraction(2), Fraction(2)), {0: 0}, {1: 0})
        assert not certify_mpg(loop_or_cycle, (Fraction(5), Fraction(5)), {0: 0}, {1: 0})

    def test_decision(self, loop_or_cycle):
        assert mpg_decision(loop_or_cycle, 0, 5)
        assert not mpg_decision(loop_or_cycle, 0, "11/2")


class TestParity:
    def test_reduction_rewards(self):
        g = ParityGame((1, 2), ((1,), (0,)), (1, 2))
        reduced = parity_to_mpg(g)
        assert [e.reward for out in reduced.edges for e in out] == [3, -9]

    def test_label_cap(self):
        with pytest.raises(SizeCapExceeded):
            parity_to_mpg(ParityGame((1,), ((0,),), (5,)), label_cap=4)

    def test_labels_are_positive(self):
        with pytest.raises(DimensionMismatch):
            ParityGame((1,), ((0,),), (0,))

    def test_self_loops(self):
        assert parity_winner(ParityGame((2,), ((0,),), (3,)), 0).winner == 1
        assert parity_winner(ParityGame((1,), ((0,),), (2,)), 0).winner == 2

    def test_player_one_picks_the_odd_loop(self):
        g = ParityGame((1, 1, 2), ((1, 2), (1,), (2,)), (1, 3, 2))
        result = parity_winner(g, 0)
        assert result.winner == 1
        assert result.strategy[0] == 1

    def test_highest_label_on_cycle_decides(self):
        g = ParityGame((1, 2), ((1,), (0,)), (1, 2))
        assert parity_solve(g).winners == (2, 2)

    def test_matches_brute_force(self, rng):
        for _ in range(500):
            g = random_parity(rng, rng.randint(1, 6))
            solution = parity_solve(g)
            assert solution.winners == brute_force_parity(g)
            assert certify_parity(g, solution.winners, solution.max_strategy, solution.min_strategy)

    def test_certify_rejects_wrong_winner(self):
        g = ParityGame((1,), ((0,),), (2,))
        assert not certify_parity(g, (1,), {0: 0}, {})


class TestBruteForcePositional:
    def test_dispatch(self, loop_or_cycle):
        assert brute_force_positional(loop_or_cycle) == (5, 5)
        ssg = SimpleStochasticGame.build([("max", [1, 2]), ("sink1", []), ("sink2", [])])
        assert brute_force_positional(ssg) == (1, 1, 0)
        parity = ParityGame((1,), ((0,),), (1,))
        assert brute_force_positional(parity) == (1,)

    def test_cap(self):
        g = MeanPayoffGame.build([1] * 3, [[(0, 0), (1, 0), (2, 0)]] * 3)
        with pytest.raises(SizeCapExceeded):
            brute_force_mpg(g, cap=10)
