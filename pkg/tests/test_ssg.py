"""
Tests for simple stochastic games.
"""

import random
from fractions import Fraction

import pytest

from tfnp.errors import DimensionMismatch, StepCapExceeded
from tfnp.ssg import (
    SimpleStochasticGame,
    brute_force_ssg,
    certify_ssg,
    ssg_absorption,
    ssg_decision,
    ssg_operator,
    ssg_solve,
)

THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)


@pytest.fixture()
def coin() -> SimpleStochasticGame:
    return SimpleStochasticGame.build([("random", [1, 2], ["1/3", "2/3"]), ("sink1", []), ("sink2", [])])


@pytest.fixture()
def choice() -> SimpleStochasticGame:
    return SimpleStochasticGame.build([("max", [2, 1]), ("sink1", []), ("sink2", [])])


@pytest.fixture()
def chain() -> SimpleStochasticGame:
    return SimpleStochasticGame.build(
        [("max", [3, 1]), ("random", [2, 3], ["1/2", "1/2"]), ("sink1", []), ("sink2", [])]
    )


def random_ssg(rng: random.Random, nodes: int) -> SimpleStochasticGame:
    spec: list[tuple] = [("sink1", []), ("sink2", [])]
    for _ in range(nodes - 2):
        kind = rng.choice(["max", "min", "random"])
        successors = rng.sample(range(nodes), 2)
        if kind == "random":
            spec.append((kind, successors, rng.choice([["1/2", "1/2"], ["1/3", "2/3"], ["3/4", "1/4"]])))
        else:
            spec.append((kind, successors))
    return SimpleStochasticGame.build(spec)


class TestSimpleStochasticGame:
    def test_probabilities_sum_to_one(self):
        with pytest.raises(DimensionMismatch):
            SimpleStochasticGame.build([("random", [1, 1], ["1/2", "1/3"]), ("sink1", [])])

    def test_sinks_have_no_successors(self):
        with pytest.raises(DimensionMismatch):
            SimpleStochasticGame.build([("sink1", [0])])

    def test_nonsinks_need_successors(self):
        with pytest.raises(DimensionMismatch):
            SimpleStochasticGame.build([("max", []), ("sink1", [])])

    def test_successor_range(self):
        with pytest.raises(DimensionMismatch):
            SimpleStochasticGame.build([("max", [5]), ("sink1", [])])


class TestSSGOperator:
    def test_sinks_are_fixed(self):
        g = SimpleStochasticGame.build([("sink1", []), ("sink2", [])])
        assert ssg_operator(g, [HALF, HALF]) == (1, 0)

    def test_random_node(self, coin):
        assert ssg_operator(coin, [0, 1, 0]) == (THIRD, 1, 0)

    def test_max_node(self, choice):
        assert ssg_operator(choice, [0, 1, 0]) == (1, 1, 0)

    def test_dimension(self, coin):
        with pytest.raises(DimensionMismatch):
            ssg_operator(coin, [0])


class TestSSGSolve:
    @pytest.mark.parametrize("method", ["strategy-improvement", "discounted"])
    def test_coin(self, coin, method):
        assert ssg_solve(coin, method=method).values == (THIRD, 1, 0)

    @pytest.mark.parametrize("method", ["strategy-improvement", "discounted"])
    def test_choice(self, choice, method):
        solution = ssg_solve(choice, method=method)
        assert solution.values[0] == 1
        assert solution.max_strategy == {0: 1}

    def test_chain(self, chain):
        solution = ssg_solve(chain)
        assert solution.values[0] == HALF
        assert solution.max_strategy == {0: 1}
        assert brute_force_ssg(chain)[0] == HALF

    def test_discounted_records_beta(self, chain):
        solution = ssg_solve(chain, method="discounted")
        assert solution.beta is not None and 0 < solution.beta < 1
        assert solution.values[0] == HALF

    def test_min_player_avoids_the_target(self):
        # the min node can loop forever between itself and a max node
        g = SimpleStochasticGame.build([("min", [1, 2]), ("max", [0]), ("sink1", [])])
        solution = ssg_solve(g)
        assert solution.values == (0, 0, 1)
        assert solution.min_strategy == {0: 1}

    @pytest.mark.parametrize("method", ["strategy-improvement", "discounted"])
    def test_min_self_loop(self, method):
        g = SimpleStochasticGame.build(
            [("sink1", []), ("sink2", []), ("max", [3, 0]), ("max", [4, 0]), ("min", [4, 0])]
        )
        solution = ssg_solve(g, method=method)
        assert solution.values == (1, 0, 1, 1, 0)
        assert solution.min_strategy == {4: 4}
        assert solution.values == brute_force_ssg(g)

    @pytest.mark.parametrize("method", ["strategy-improvement", "discounted"])
    def test_matches_brute_force(self, rng, method):
        for _ in range(200):
            g = random_ssg(rng, rng.randint(3, 7))
            solution = ssg_solve(g, method=method)
            assert certify_ssg(g, solution.values, solution.max_strategy, solution.min_strategy)
            assert solution.values == brute_force_ssg(g)

    def test_unknown_method(self, coin):
        with pytest.raises(ValueError):
            ssg_solve(coin, method="value-iteration")  # type: ignore[arg-type]

    def test_step_cap(self, choice):
        with pytest.raises(StepCapExceeded):
            ssg_solve(choice, step_cap=0)


class TestCertifySSG:
    def test_true_values(self, coin):
        assert certify_ssg(coin, (THIRD, Fraction(1), Fraction(0)), {}, {})

    def test_wrong_value(self, coin):
        assert not certify_ssg(coin, (HALF, Fraction(1), Fraction(0)), {}, {})

    def test_unreachable_target(self):
        g = SimpleStochasticGame.build([("max", [1]), ("max", [0]), ("sink1", [])])
        ones = (Fraction(1),) * 3
        assert not certify_ssg(g, ones, {0: 1, 1: 0}, {})
        assert ssg_absorption(g, {0: 1, 1: 0}, {}) == (0, 0, 1)

    def test_suboptimal_strategy(self, chain):
        # values of the strategy that jumps straight to the losing sink
        values = ssg_absorption(chain, {0: 3}, {})
        assert not certify_ssg(chain, values, {0: 3}, {})

    def test_strategy_must_use_edges(self, choice):
        assert not certify_ssg(choice, (Fraction(1), Fraction(1), Fraction(0)), {0: 0}, {})


class TestSSGDecision:
    def test_thresholds(self, coin, choice):
        assert not ssg_decision(coin, 0, HALF)
        assert ssg_decision(coin, 0, THIRD)
        assert ssg_decision(choice, 0, 1)

    def test_reuses_solution(self, coin):
        solution = ssg_solve(coin)
        assert ssg_decision(coin, 0, "1/4", solution=solution)
