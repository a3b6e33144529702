"""
Tests for Sperner path following and Scarf weak approximate fixed points.
"""

import random
from fractions import Fraction

import pytest

from conftest import nondegenerate_2x2
from tfnp.circuits import DomainSpec, circuit_eval, export_nash_circuit, parse_circuit
from tfnp.core import linf_distance
from tfnp.errors import OracleViolation, ResidualNotMet, SizeCapExceeded
from tfnp.simplicial import (
    SimplicialGrid,
    SpernerInstance,
    brute_force_sperner,
    retract_product_point,
    scarf_label,
    scarf_weak_fixpoint,
    smallest_index_coloring,
    sperner_orientation,
    sperner_solve,
)

ARGMAX = parse_circuit("inputs 3\ng0 = x0\ng1 = x1\ng2 = x2\noutputs g0 g1 g2\n").circuit
CONSTANT = parse_circuit("inputs 3\ng0 = 1/2\ng1 = 1/3\ng2 = 1/6\noutputs g0 g1 g2\n").circuit


def random_coloring(rng: random.Random, n: int) -> SpernerInstance:
    colors = {}
    for i in range(n + 1):
        for j in range(n + 1 - i):
            v = (i, j, n - i - j)
            colors[v] = rng.choice([c + 1 for c in range(3) if v[c]])
    return SpernerInstance(n, colors.__getitem__)


class TestSperner:
    def test_single_cell(self):
        inst = SpernerInstance(1, smallest_index_coloring)
        cell = sperner_solve(inst)
        assert set(cell.vertices) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
        assert cell.panchromatic
        assert brute_force_sperner(inst) == [cell]

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_smallest_index_coloring(self, n):
        inst = SpernerInstance(n, smallest_index_coloring)
        assert sperner_solve(inst) in brute_force_sperner(inst)

    def test_random_colorings(self, rng):
        for _ in range(30):
            n = rng.randint(1, 16)
            inst = random_coloring(rng, n)
            cells = brute_force_sperner(inst)
            assert len(cells) % 2 == 1
            assert sum(sperner_orientation(c) for c in cells) == 1
            cell = sperner_solve(inst)
            assert cell in cells
            for u in cell.vertices:
                for v in cell.vertices:
                    assert max(abs(a - b) for a, b in zip(u, v)) <= 1

    def test_circuit_coloring(self):
        inst = SpernerInstance.from_circuit(6, ARGMAX)
        assert inst.color((1, 4, 1)) == 2
        assert sperner_solve(inst) in brute_force_sperner(inst)

    def test_boundary_violation(self):
        with pytest.raises(OracleViolation):
            sperner_solve(SpernerInstance(1, lambda v: 1))

    def test_brute_force_cap(self):
        with pytest.raises(SizeCapExceeded):
            brute_force_sperner(SpernerInstance(300, smallest_index_coloring))


class TestSimplicialGrid:
    def test_corner_start(self):
        grid = SimplicialGrid(3, 4)
        assert grid.barycentric(()) == (4, 0, 0)
        assert grid.barycentric((1, 3)) == (1, 2, 1)
        assert grid.point((1, 2, 1)) == (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))

    def test_one_dimension(self):
        path = SimplicialGrid(1, 5).follow(lambda a: 0)
        assert path.vertices == ((5,),)

    def test_labels_must_point_at_positive_coordinates(self):
        with pytest.raises(OracleViolation):
            SimplicialGrid(2, 3).follow(lambda a: 1)


class TestScarf:
    def test_identity_has_zero_residual(self):
        result = scarf_weak_fixpoint(ARGMAX, "1/10")
        assert result.residual == 0
        assert sum(result.point) == 1

    def test_constant_map(self):
        result = scarf_weak_fixpoint(CONSTANT, "1/20")
        target = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))
        assert linf_distance(result.point, target) <= Fraction(1, 20)
        assert result.pitch == Fraction(1, 80)

    def test_label_rule(self):
        assert scarf_label(CONSTANT, (Fraction(1), Fraction(0), Fraction(0))) == 0
        assert scarf_label(CONSTANT, (Fraction(0), Fraction(1, 2), Fraction(1, 2))) == 1
        assert scarf_label(ARGMAX, (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))) == 1

    def test_coarse_pitch_without_retries(self):
        with pytest.raises(ResidualNotMet) as info:
            scarf_weak_fixpoint(CONSTANT, "1/100", pitch=1, retries=0)
        assert info.value.partial.residual == Fraction(1, 6)

    def test_cube_domain(self):
        contraction = parse_circuit("inputs 1\ng0 = mul(1/4, x0)\ng1 = add(1/2, g0)\noutputs g1\n").circuit
        result = scarf_weak_fixpoint(contraction, "1/100", domain=DomainSpec.cube(1))
        assert len(result.point) == 1
        assert abs(result.point[0] - Fraction(2, 3)) <= Fraction(1, 50)

    def test_constant_map_on_product(self):
        eps = Fraction(1, 10)
        circuit = parse_circuit("inputs 4\ng0 = 1/4\ng1 = 3/4\ng2 = 2/3\ng3 = 1/3\noutputs g0 g1 g2 g3\n").circuit
        result = scarf_weak_fixpoint(circuit, eps, domain=DomainSpec.product(2, 2))
        assert DomainSpec.product(2, 2).contains(result.point) is None
        assert linf_distance(circuit_eval(circuit, result.point), result.point) <= eps

    def test_nash_map_fixed_point_on_product(self, rng, matching_pennies):
        eps = Fraction(1, 100)
        domain = DomainSpec.product(2, 2)
        for game in [matching_pennies, *(nondegenerate_2x2(rng) for _ in range(3))]:
            circuit = export_nash_circuit(game)
            result = scarf_weak_fixpoint(circuit, eps, domain=domain)
            assert domain.contains(result.point) is None
            residual = linf_distance(circuit_eval(circuit, result.point), result.point)
            assert residual == result.residual
            assert residual <= eps

    def test_nonpositive_pitch(self):
        with pytest.raises(ValueError):
            scarf_weak_fixpoint(ARGMAX, "1/10", pitch=0)

    def test_nonpositive_epsilon(self):
        with pytest.raises(ValueError):
            scarf_weak_fixpoint(ARGMAX, 0)


class TestRetraction:
    def test_full_block_is_normalised(self):
        z = (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2), Fraction(0))
        assert retract_product_point(z, (2, 2)) == (Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(0))

    def test_light_block_gets_slack(self):
        z = (Fraction(0), Fraction(0), Fraction(1), Fraction(0))
        assert retract_product_point(z, (2, 2)) == (Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(0))
