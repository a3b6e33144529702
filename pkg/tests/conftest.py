import logging
import random
from collections.abc import Iterator
from fractions import Fraction
from itertools import product

import pytest

from tfnp.core import RationalMatrix
from tfnp.normal_form import NormalFormGame

logging.basicConfig(level=logging.DEBUG)


def bimatrix(A, B) -> NormalFormGame:
    return NormalFormGame.from_bimatrix(RationalMatrix.from_rows(A), RationalMatrix.from_rows(B))


def nondegenerate_2x2(rng: random.Random, low: int = -2, high: int = 2) -> NormalFormGame:
    """Random 2x2 game where no player is ever indifferent between pure replies."""
    while True:
        A = [[rng.randint(low, high) for _ in range(2)] for _ in range(2)]
        B = [[rng.randint(low, high) for _ in range(2)] for _ in range(2)]
        if all(A[0][j] != A[1][j] for j in range(2)) and all(B[i][0] != B[i][1] for i in range(2)):
            return bimatrix(A, B)


def every_2x2_pattern() -> Iterator[NormalFormGame]:
    """One game with payoffs in -2..2 for each nondegenerate pattern of reply differences.

    Shifting a column of A or a row of B changes no best reply, so these cover
    every nondegenerate 2x2 game with payoffs in -2..2 up to equilibrium set.
    """
    nonzero = [d for d in range(-4, 5) if d]
    for d0, d1, e0, e1 in product(nonzero, repeat=4):
        A = [[-2 + max(d0, 0), -2 + max(d1, 0)], [-2 + max(-d0, 0), -2 + max(-d1, 0)]]
        B = [[-2 + max(e0, 0), -2 + max(-e0, 0)], [-2 + max(e1, 0), -2 + max(-e1, 0)]]
        yield bimatrix(A, B)


def random_rational(rng: random.Random, low: int = -20, high: int = 20, den: int = 7) -> Fraction:
    return Fraction(rng.randint(low * den, high * den), rng.randint(1, den))


def random_bimatrix(rng: random.Random, m: int, n: int) -> NormalFormGame:
    """Random rational ``m x n`` game with no ties between pure replies."""
    while True:
        A = [[random_rational(rng, -30, 30, den=97) for _ in range(n)] for _ in range(m)]
        B = [[random_rational(rng, -30, 30, den=97) for _ in range(n)] for _ in range(m)]
        columns_distinct = all(len({A[i][j] for i in range(m)}) == m for j in range(n))
        rows_distinct = all(len(set(row)) == n for row in B)
        if columns_distinct and rows_distinct:
            return bimatrix(A, B)


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture()
def matching_pennies() -> NormalFormGame:
    return bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])


@pytest.fixture()
def coordination() -> NormalFormGame:
    return bimatrix([[2, 0], [0, 1]], [[2, 0], [0, 1]])


@pytest.fixture()
def prisoners_dilemma() -> NormalFormGame:
    return bimatrix([[3, 0], [5, 1]], [[3, 5], [0, 1]])