"""
Tests for Sqrt-Sum comparison and PosSLP.
"""

import math
from fractions import Fraction

import pytest

from tfnp.decide import SLPCircuit, posslp_decide, sqrt_sum_compare
from tfnp.errors import BitCapExceeded, SchemaError


class TestSqrtSumCompare:
    def test_perfect_squares(self):
        result = sqrt_sum_compare([4, 9], 5)
        assert result.outcome == "Equal"
        assert result.precision == 0
        assert sqrt_sum_compare([1, 4], 4).outcome == "Less"
        assert sqrt_sum_compare([16], 3).outcome == "Greater"

    def test_greater(self):
        result = sqrt_sum_compare([2, 3], 3)
        assert result.outcome == "Greater"
        assert result.lower < Fraction(3147, 1000) < result.upper

    def test_less(self):
        assert sqrt_sum_compare([2], 2).outcome == "Less"

    def test_mixed_squares_and_non_squares(self):
        # 2 + sqrt(2) ~ 3.414
        assert sqrt_sum_compare([4, 2], 4).outcome == "Less"
        assert sqrt_sum_compare([4, 2], 3).outcome == "Greater"

    def test_undecided_at_cap(self):
        result = sqrt_sum_compare([2, 3], 3, precision_cap=1)
        assert result.outcome == "Undecided"
        assert result.precision == 1
        assert result.lower < 3 < result.upper

    def test_single_non_square_is_always_decided(self):
        # k * 2**p is an integer so it can never fall strictly inside (lo, lo + 1)
        d = 10**40 - 1
        assert sqrt_sum_compare([d], 10**20, precision_cap=1).outcome == "Less"

    def test_agrees_with_wide_interval(self, rng):
        for _ in range(40):
            d = [rng.randint(1, 50) for _ in range(rng.randint(1, 4))]
            k = rng.randint(1, 20)
            outcome = sqrt_sum_compare(d, k).outcome
            lo = sum(math.isqrt(v << 512) for v in d)
            hi = lo + len(d)
            if outcome == "Less":
                assert lo < k << 256
            elif outcome == "Greater":
                assert hi > k << 256

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            sqrt_sum_compare([], 1)
        with pytest.raises(ValueError):
            sqrt_sum_compare([0, 4], 1)
        with pytest.raises(ValueError):
            sqrt_sum_compare([4], 0)


ONE_PLUS_ONE = """
g0 = 1
g1 = add(g0, g0)
outputs g1
"""

ONE_MINUS_ONE = """
g0 = 1
g1 = sub(g0, g0)
outputs g1
"""

ZERO_MINUS_ONE_SQUARED = """
g0 = 0
g1 = 1
g2 = add(g1, g1)
g3 = mul(g2, g2)   # 4
g4 = sub(g0, g3)
outputs g4
"""


class TestPosSLP:
    def test_signs(self):
        assert posslp_decide(SLPCircuit.parse(ONE_PLUS_ONE)) == "Positive"
        assert posslp_decide(SLPCircuit.parse(ONE_MINUS_ONE)) == "Zero"
        assert posslp_decide(SLPCircuit.parse(ZERO_MINUS_ONE_SQUARED)) == "Negative"

    def test_repeated_squaring_value(self):
        program = SLPCircuit.repeated_squaring(4)
        assert posslp_decide(program) == "Positive"
        # 2 ** 16 has 17 bits
        assert posslp_decide(program, bit_cap=17) == "Positive"
        with pytest.raises(BitCapExceeded):
            posslp_decide(program, bit_cap=16)

    def test_sixty_four_squarings_hit_the_cap(self):
        with pytest.raises(BitCapExceeded):
            posslp_decide(SLPCircuit.repeated_squaring(64), bit_cap=2**20)

    def test_text_round_trip(self):
        program = SLPCircuit.repeated_squaring(3, base=3)
        again = SLPCircuit.parse(program.to_text())
        assert again == program

    def test_division_rejected(self):
        with pytest.raises(SchemaError):
            SLPCircuit.parse("g0 = 1\ng1 = div(g0, g0)\noutputs g1\n")

    def test_only_zero_and_one_leaves(self):
        with pytest.raises(SchemaError):
            SLPCircuit.parse("g0 = 2\noutputs g0\n")

    def test_no_inputs(self):
        with pytest.raises(SchemaError):
            SLPCircuit.parse("g0 = x0\noutputs g0\n")
