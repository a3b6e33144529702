"""
Tests for exchange-market equilibria.
"""

from fractions import Fraction

import pytest

from tfnp.circuits import circuit_eval, parse_circuit
from tfnp.errors import DimensionMismatch, ValidationFailed
from tfnp.market import ExchangeEconomy, market_equilibrium_weak, price_map

RECIPROCAL = """
inputs 2
g0 = div(x1, x0)
g1 = sub(g0, 1)
g2 = div(x0, x1)
g3 = sub(g2, 1)
outputs g1 g3
"""


def economy(text: str, n: int = 2, eta=None) -> ExchangeEconomy:
    return ExchangeEconomy(n, parse_circuit(text).circuit, eta)


class TestValidate:
    def test_reciprocal_economy_passes(self):
        report = economy(RECIPROCAL).validate(samples=20)
        assert report.passed
        assert report.checked == 20

    def test_walras_failure(self):
        report = economy("inputs 2\ng0 = 1\noutputs g0 g0\n").validate(samples=5)
        assert len(report.walras_failures) == 5

    def test_homogeneity_failure(self):
        text = "inputs 2\ng0 = x1\ng1 = sub(0, x0)\noutputs g0 g1\n"
        report = economy(text).validate(samples=5)
        assert not report.walras_failures
        assert len(report.homogeneity_failures) == 5

    def test_dimensions(self):
        with pytest.raises(DimensionMismatch):
            economy(RECIPROCAL, n=3)


class TestPriceMap:
    def test_zero_excess_is_identity(self):
        e = economy("inputs 2\ng0 = 0\noutputs g0 g0\n")
        p = (Fraction(1, 3), Fraction(2, 3))
        assert circuit_eval(price_map(e, Fraction(1, 100)), p) == p

    def test_moves_toward_cheap_goods(self):
        e = economy(RECIPROCAL)
        p = (Fraction(1, 4), Fraction(3, 4))
        image = circuit_eval(price_map(e, Fraction(0)), p)
        # g = (2, -2/3): the underpriced good gains
        assert image == (Fraction(3, 4), Fraction(1, 4))
        assert sum(image) == 1


class TestMarketEquilibrium:
    def test_zero_excess(self):
        result = market_equilibrium_weak(economy("inputs 2\ng0 = 0\noutputs g0 g0\n"), "1/10")
        assert result.residual == 0

    def test_reciprocal_equilibrium(self):
        result = market_equilibrium_weak(economy(RECIPROCAL), "1/1000")
        assert result.residual <= Fraction(1, 1000)
        assert all(abs(v - Fraction(1, 2)) <= Fraction(1, 100) for v in result.prices)
        assert result.eta == Fraction(1, 8000)

    def test_rejects_invalid_economy(self):
        with pytest.raises(ValidationFailed):
            market_equilibrium_weak(economy("inputs 2\ng0 = 1\noutputs g0 g0\n"), "1/10")
