"""Shapley stochastic games solved by iterating the contraction ``F_u(x) = Val(B_u(x))``."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .config import DEFAULT_LIMITS
from .core import RationalLike, RationalMatrix, Vector, floor_to_grid, linf_distance, parse_rational
from .errors import DimensionMismatch, IterCapExceeded
from .lp import MatrixGameSolution, matrix_game_value

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class ShapleyState:
    """``transitions[i][j][v]`` moves to state v; ``stop[i, j]`` ends the game."""

    rewards: RationalMatrix
    stop: RationalMatrix
    transitions: tuple[tuple[Vector, ...], ...]


@dataclass(frozen=True, slots=True)
class ShapleyGame:
    states: tuple[ShapleyState, ...]

    def __post_init__(self) -> None:
        n = len(self.states)
        if n == 0:
            raise DimensionMismatch("a Shapley game needs at least one state")
        for u, st in enumerate(self.states):
            m, k = st.rewards.rows, st.rewards.cols
            if (st.stop.rows, st.stop.cols) != (m, k) or len(st.transitions) != m:
                raise DimensionMismatch(f"state {u}: stop/transition shapes differ from the rewards")
            for i in range(m):
                if len(st.transitions[i]) != k:
                    raise DimensionMismatch(f"state {u}: row {i} has the wrong number of columns")
                for j in range(k):
                    probs = st.transitions[i][j]
                    q = st.stop[i, j]
                    if len(probs) != n:
                        raise DimensionMismatch(f"state {u}: transition ({i}, {j}) must cover {n} states")
                    if q <= 0 or any(p < 0 for p in probs):
                        raise DimensionMismatch(f"state {u}: ({i}, {j}) needs q > 0 and p >= 0")
                    if q + sum(probs) != 1:
                        raise DimensionMismatch(f"state {u}: stop and transitions at ({i}, {j}) sum to {q + sum(probs)}")

    @classmethod
    def build(cls, states: Sequence[dict[str, Any]]) -> ShapleyGame:
        """Each state is ``{"rewards": rows, "stop": rows, "transitions": [[[p_v, ...], ...], ...]}``."""
        return cls(
            tuple(
                ShapleyState(
                    RationalMatrix.from_rows(s["rewards"]),
                    RationalMatrix.from_rows(s["stop"]),
                    tuple(tuple(tuple(parse_rational(p) for p in cell) for cell in row) for row in s["transitions"]),
                )
                for s in states
            )
        )

    @property
    def q(self) -> Fraction:
        return min(v for st in self.states for v in st.stop.entries)

    def stage_matrix(self, u: int, x: Sequence[Fraction]) -> RationalMatrix:
        st = self.states[u]
        m, k = st.rewards.rows, st.rewards.cols
        return RationalMatrix(
            m,
            k,
            tuple(
                st.rewards[i, j] + sum((p * xv for p, xv in zip(st.transitions[i][j], x)), Fraction(0))
                for i in range(m)
                for j in range(k)
            ),
        )


def _stage_solutions(g: ShapleyGame, x: Sequence[Fraction]) -> list[MatrixGameSolution]:
    if len(x) != len(g.states):
        raise DimensionMismatch(f"value vector has {len(x)} entries, game has {len(g.states)} states")
    return [matrix_game_value(g.stage_matrix(u, x)) for u in range(len(g.states))]


def shapley_operator(g: ShapleyGame, x: Sequence[RationalLike]) -> Vector:
    return tuple(s.value for s in _stage_solutions(g, [parse_rational(v) for v in x]))


@dataclass(frozen=True, slots=True)
class ShapleySolution:
    values: Vector
    residual: Fraction
    strategies: tuple[tuple[Vector, Vector], ...]
    iterations: int
    residuals: tuple[Fraction, ...]


def shapley_solve(
    g: ShapleyGame, epsilon: RationalLike, iter_cap: int = DEFAULT_LIMITS.iter_cap
) -> ShapleySolution:
    """Values within ``epsilon`` of the game's values.

    Iterates are floored to a dyadic grid fine enough not to disturb the stop
    rule ``|F(x) - x| <= epsilon * q / 2``; flooring keeps iterates monotone
    whenever the exact iteration is.
    """
    eps = parse_rational(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    q = g.q
    target = eps * q / 2
    grid = eps * q * q / 8
    bits = 0
    while Fraction(1, 1 << bits) > grid:
        bits += 1

    x: Vector = (Fraction(0),) * len(g.states)
    residuals: list[Fraction] = []
    iterations = 0
    while True:
        solutions = _stage_solutions(g, x)
        fx = tuple(s.value for s in solutions)
        residual = linf_distance(fx, x)
        residuals.append(residual)
        logger.debug(f"shapley_solve: iteration {iterations}, residual {float(residual):.3g}")
        if residual <= target:
            break
        if iterations >= iter_cap:
            raise IterCapExceeded(f"shapley_solve: {iter_cap} iterations", partial=fx)
        x = tuple(floor_to_grid(v, bits) for v in fx)
        iterations += 1
    logger.info(
        f"shapley_solve: {iterations} iterations, residual {float(residual):.3g}, q = {q}"
    )
    return ShapleySolution(
        values=fx,
        residual=residual,
        strategies=tuple((s.row_strategy, s.col_strategy) for s in solutions),
        iterations=iterations,
        residuals=tuple(residuals),
    )
