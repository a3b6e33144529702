"""
Tests for least fixed points of monotone polynomial systems.
"""

from fractions import Fraction

import pytest

from tfnp.errors import DimensionMismatch, IterCapExceeded
from tfnp.lfp import (
    SCFG,
    BranchingProcess,
    Monomial,
    MonotonePolySystem,
    bp_to_system,
    extinction_report,
    kleene_lfp,
    lfp_solve,
    newton_lfp,
    scfg_to_system,
)

THIRD = Fraction(1, 3)


def binary_split(q) -> BranchingProcess:
    """Dies with probability ``q``, otherwise splits in two."""
    q = Fraction(q)
    return BranchingProcess.build([[(q, [0]), (1 - q, [2])]])


def quadratic(constant, square) -> MonotonePolySystem:
    return MonotonePolySystem.from_terms([{(0,): constant, (2,): square}])


class TestBranchingProcess:
    def test_probabilities_sum_to_one(self):
        with pytest.raises(DimensionMismatch):
            BranchingProcess.build([[("1/2", [0]), ("1/3", [2])]])

    def test_offspring_length(self):
        with pytest.raises(DimensionMismatch):
            BranchingProcess.build([[(1, [0, 1])]])

    def test_every_type_has_rules(self):
        with pytest.raises(DimensionMismatch):
            BranchingProcess.build([[(1, [0, 0])], []])

    def test_always_die(self):
        sys = bp_to_system(BranchingProcess.build([[(1, [0])]]))
        assert sys.polynomials == ((Monomial(Fraction(1), (0,)),),)

    def test_binary_split(self):
        sys = bp_to_system(binary_split("1/4"))
        assert sys.polynomials == ((Monomial(Fraction(1, 4), (0,)), Monomial(Fraction(3, 4), (2,))),)
        assert sys.evaluate([Fraction(1, 2)]) == (Fraction(7, 16),)

    def test_two_types(self):
        b = BranchingProcess.build([[(1, [1, 1])], [(1, [0, 0])]])
        sys = bp_to_system(b)
        assert sys.evaluate([Fraction(1, 2), Fraction(1, 3)]) == (Fraction(1, 6), Fraction(1))
        assert sys.probabilistic


class TestMonotonePolySystem:
    def test_negative_coefficient(self):
        with pytest.raises(DimensionMismatch):
            MonotonePolySystem.from_terms([{(1,): -1}])

    def test_exponent_length(self):
        with pytest.raises(DimensionMismatch):
            MonotonePolySystem.from_terms([{(1, 0): 1}])

    def test_zero_coefficients_are_dropped(self):
        assert quadratic(0, 1).polynomials == ((Monomial(Fraction(1), (2,)),),)

    def test_jacobian(self):
        sys = MonotonePolySystem.from_terms([{(1, 1): 1}, {(0, 0): 1}])
        J = sys.jacobian([Fraction(2), Fraction(3)])
        assert (J[0, 0], J[0, 1], J[1, 0], J[1, 1]) == (3, 2, 0, 0)

    def test_monotone(self, rng):
        sys = MonotonePolySystem.from_terms([{(0, 0): "1/4", (1, 1): "1/2"}, {(2, 0): "1/3", (0, 1): "1/3"}])
        for _ in range(20):
            x = [Fraction(rng.randint(0, 10), 10) for _ in range(2)]
            y = [v + Fraction(rng.randint(0, 10), 100) for v in x]
            assert all(a <= b for a, b in zip(sys.evaluate(x), sys.evaluate(y)))


class TestKleene:
    def test_constant(self):
        result = kleene_lfp(quadratic(1, 0), "1/100")
        assert result.x == (1,)
        assert result.residual == 0
        assert result.iterations == 1

    def test_subcritical(self):
        eps = Fraction(1, 10**9)
        result = kleene_lfp(quadratic("1/4", "3/4"), eps)
        assert result.x[0] <= THIRD
        assert THIRD - result.x[0] <= 2 * eps
        assert result.upper is not None and result.upper[0] < 1

    def test_critical_stays_below_one(self):
        eps = Fraction(1, 1000)
        result = kleene_lfp(quadratic("1/2", "1/2"), eps)
        assert result.residual <= eps
        assert result.x[0] < 1

    def test_iteration_cap(self):
        with pytest.raises(IterCapExceeded) as info:
            kleene_lfp(quadratic("1/4", "3/4"), "1/1000000", iter_cap=2)
        partial = info.value.partial
        assert partial.iterations == 2
        assert 0 < partial.x[0] < THIRD

    def test_epsilon_must_be_positive(self):
        with pytest.raises(ValueError):
            kleene_lfp(quadratic(1, 0), 0)


class TestNewton:
    def test_linear_system_in_one_step(self):
        result = newton_lfp(MonotonePolySystem.from_terms([{(0,): "1/2", (1,): "1/4"}]), "1/100")
        assert result.x == (Fraction(2, 3),)
        assert result.newton_steps == 1
        assert result.residual == 0

    def test_constant(self):
        assert newton_lfp(quadratic(1, 0), "1/100").x == (1,)

    def test_subcritical(self):
        eps = Fraction(1, 10**9)
        result = newton_lfp(quadratic("1/4", "3/4"), eps)
        assert 0 <= THIRD - result.x[0] <= 2 * eps
        assert result.newton_steps <= 10

    def test_critical(self):
        eps = Fraction(1, 10**6)
        result = newton_lfp(quadratic("1/2", "1/2"), eps)
        assert result.residual <= eps
        assert result.x[0] < 1

    def test_agrees_with_kleene(self):
        eps = Fraction(1, 10**6)
        sys = MonotonePolySystem.from_terms([{(0, 0): "1/4", (1, 1): "1/2"}, {(0, 0): "1/2", (0, 2): "1/3"}])
        primary, check = lfp_solve(sys, eps, method="both")
        assert primary.method == "newton"
        assert check is not None and check.method == "kleene"
        assert max(abs(a - b) for a, b in zip(primary.x, check.x)) <= 2 * eps

    def test_kleene_only(self):
        primary, check = lfp_solve(quadratic(1, 0), "1/10", method="kleene")
        assert primary.method == "kleene"
        assert check is None


class TestClosedForms:
    """``q + (1 - q) x^2`` has least fixed point ``min(1, q / (1 - q))``."""

    EPS = Fraction(1, 10**9)

    @pytest.mark.parametrize(("q", "lfp"), [("1/4", THIRD), ("1/2", Fraction(1)), ("3/4", Fraction(1))])
    def test_newton(self, q, lfp):
        result = newton_lfp(quadratic(q, 1 - Fraction(q)), self.EPS)
        assert 0 <= lfp - result.x[0] <= self.EPS

    @pytest.mark.parametrize(("q", "lfp"), [("1/4", THIRD), ("3/4", Fraction(1))])
    def test_kleene(self, q, lfp):
        result = kleene_lfp(quadratic(q, 1 - Fraction(q)), self.EPS)
        assert 0 <= lfp - result.x[0] <= self.EPS
        assert result.upper is not None and result.upper[0] >= lfp

    def test_kleene_at_the_critical_point(self):
        # residual (1 - x)^2 / 2 <= eps only pins x to within sqrt(2 eps)
        result = kleene_lfp(quadratic("1/2", "1/2"), self.EPS)
        assert result.upper is None
        assert 0 < 1 - result.x[0] <= Fraction(1, 20000)

    @pytest.mark.parametrize("q", ["1/4", "3/4"])
    def test_methods_agree_within_epsilon(self, q):
        primary, check = lfp_solve(quadratic(q, 1 - Fraction(q)), self.EPS, method="both")
        assert check is not None
        assert abs(primary.x[0] - check.x[0]) <= self.EPS

    def test_grammar(self):
        g = SCFG.build(["S"], [("S", ["S", "S"], "2/3"), ("S", ["a"], "1/3")], "S")
        for result in lfp_solve(scfg_to_system(g), self.EPS, method="both"):
            assert result is not None
            assert 0 <= Fraction(1, 2) - result.x[g.start_index] <= self.EPS

    def test_iterates_never_decrease(self):
        sys = quadratic("1/4", "3/4")
        previous = Fraction(0)
        for cap in range(1, 8):
            with pytest.raises(IterCapExceeded) as info:
                kleene_lfp(sys, self.EPS, iter_cap=cap)
            current = info.value.partial.x[0]
            assert previous <= current <= THIRD
            previous = current


class TestSCFG:
    def test_start_symbol_must_be_nonterminal(self):
        with pytest.raises(DimensionMismatch):
            SCFG.build(["S"], [("S", ["a"], 1)], "T")

    def test_productions_sum_to_one(self):
        with pytest.raises(DimensionMismatch):
            SCFG.build(["S"], [("S", ["a"], "1/2")], "S")

    def test_terminal_only(self):
        g = SCFG.build(["S"], [("S", ["a"], 1)], "S")
        assert newton_lfp(scfg_to_system(g), "1/100").x[g.start_index] == 1

    def test_terminals_contribute_nothing(self):
        g = SCFG.build(["S"], [("S", ["S", "a", "S"], "2/3"), ("S", ["b"], "1/3")], "S")
        assert scfg_to_system(g) == quadratic("1/3", "2/3")

    def test_language_probability(self):
        eps = Fraction(1, 10**6)
        g = SCFG.build(["S"], [("S", ["S", "S"], "2/3"), ("S", ["a"], "1/3")], "S")
        x = newton_lfp(scfg_to_system(g), eps).x[g.start_index]
        assert 0 <= Fraction(1, 2) - x <= 2 * eps

    def test_two_nonterminals(self):
        g = SCFG.build(["S", "A"], [("S", ["A", "A"], 1), ("A", ["a"], "1/2"), ("A", ["A", "b"], "1/2")], "S")
        sys = scfg_to_system(g)
        assert sys.evaluate([Fraction(0), Fraction(1, 2)]) == (Fraction(1, 4), Fraction(3, 4))


class TestExtinctionReport:
    def test_always_die(self):
        report = extinction_report(BranchingProcess.build([[(1, [0])]]), "1/100")
        assert report.probabilities == (1,)
        assert report.certain == ("yes",)

    def test_subcritical_split(self):
        eps = Fraction(1, 10**6)
        report = extinction_report(binary_split("1/4"), eps)
        assert abs(report.probabilities[0] - THIRD) <= 2 * eps
        assert report.agree
        assert report.certain == ("no",)

    def test_never_dies(self):
        report = extinction_report(binary_split(0), "1/100")
        assert report.probabilities == (0,)
        assert report.certain == ("no",)

    def test_critical_is_not_decided(self):
        report = extinction_report(binary_split("1/2"), "1/1000")
        assert report.probabilities[0] < 1
        assert report.certain == ("unknown",)
