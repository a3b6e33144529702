"""Exact two-phase simplex (Bland's rule) and zero-sum matrix games."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Literal

from .core import RationalLike, RationalMatrix, Vector, parse_rational, solve_linear_system
from .errors import DimensionMismatch, Infeasible, SingularMatrix, Unbounded

logger = logging.getLogger(__name__)

Relation = Literal["<=", "=", ">="]
Sense = Literal["max", "min"]

_FLIP: dict[Relation, Relation] = {"<=": ">=", ">=": "<=", "=": "="}


@dataclass(frozen=True, slots=True)
class LinearProgram:
    """``sense`` of ``objective . x`` subject to ``matrix x (relation) rhs``.

    Variables with ``free[j]`` set are unbounded below, the rest are >= 0.
    """

    objective: Vector
    matrix: RationalMatrix
    relations: tuple[Relation, ...]
    rhs: Vector
    sense: Sense = "max"
    free: tuple[bool, ...] = field(default=())

    def __post_init__(self) -> None:
        n = len(self.objective)
        if self.matrix.cols != n and self.matrix.rows:
            raise DimensionMismatch(f"objective has {n} entries, matrix has {self.matrix.cols} columns")
        if len(self.relations) != self.matrix.rows or len(self.rhs) != self.matrix.rows:
            raise DimensionMismatch("relations/rhs must have one entry per constraint row")
        if not self.free:
            object.__setattr__(self, "free", (False,) * n)
        elif len(self.free) != n:
            raise DimensionMismatch("free flags must have one entry per variable")

    @classmethod
    def build(
        cls,
        objective: Sequence[RationalLike],
        rows: Sequence[Sequence[RationalLike]],
        relations: Sequence[Relation],
        rhs: Sequence[RationalLike],
        sense: Sense = "max",
        free: Sequence[bool] | None = None,
    ) -> LinearProgram:
        obj = tuple(parse_rational(c) for c in objective)
        matrix = RationalMatrix.from_rows(rows) if rows else RationalMatrix(0, len(obj), ())
        return cls(
            objective=obj,
            matrix=matrix,
            relations=tuple(relations),
            rhs=tuple(parse_rational(v) for v in rhs),
            sense=sense,
            free=tuple(free) if free is not None else (),
        )

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x)), Fraction(0))

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if any(v < 0 for v, f in zip(x, self.free) if not f):
            return False
        for i, rel in enumerate(self.relations):
            lhs = sum((a * v for a, v in zip(self.matrix.row(i), x)), Fraction(0))
            if rel == "<=" and lhs > self.rhs[i]:
                return False
            if rel == ">=" and lhs < self.rhs[i]:
                return False
            if rel == "=" and lhs != self.rhs[i]:
                return False
        return True


@dataclass(frozen=True, slots=True)
class LPSolution:
    optimum: Fraction
    solution: Vector
    pivots: int = 0


class _Tableau:
    """Dense simplex tableau in equality form ``A x = b``, ``x >= 0``."""

    def __init__(self, A: list[list[Fraction]], b: list[Fraction], basis: list[int]) -> None:
        self.A = A
        self.b = b
        self.basis = basis
        self.pivots = 0

    @property
    def width(self) -> int:
        return len(self.A[0]) if self.A else 0

    def pivot(self, r: int, c: int) -> None:
        A, b = self.A, self.b
        p = A[r][c]
        row = [v / p for v in A[r]]
        A[r] = row
        b[r] = b[r] / p
        for i in range(len(A)):
            if i == r:
                continue
            f = A[i][c]
            if f:
                A[i] = [a - f * rv for a, rv in zip(A[i], row)]
                b[i] -= f * b[r]
        self.basis[r] = c
        self.pivots += 1

    def maximize(self, cost: Sequence[Fraction], allowed: int) -> None:
        """Bland's rule on columns ``0..allowed-1``."""
        A, b = self.A, self.b
        m = len(A)
        while True:
            in_basis = set(self.basis)
            cb = [cost[j] for j in self.basis]
            entering = None
            for j in range(allowed):
                if j in in_basis:
                    continue
                reduced = cost[j] - sum((cb[i] * A[i][j] for i in range(m)), Fraction(0))
                if reduced > 0:
                    entering = j
                    break
            if entering is None:
                return
            leave = None
            best = Fraction(0)
            for i in range(m):
                a = A[i][entering]
                if a <= 0:
                    continue
                ratio = b[i] / a
                if leave is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                    leave, best = i, ratio
            if leave is None:
                raise Unbounded(f"objective unbounded along column {entering}")
            self.pivot(leave, entering)


def lp_optimize(lp: LinearProgram) -> LPSolution:
    """Exact optimum and an optimal basic feasible solution."""
    n = lp.num_vars
    # column layout: structural (free vars split into +/-), slacks/surplus, artificials
    columns: list[tuple[int, int]] = []
    for j in range(n):
        columns.append((j, 1))
        if lp.free[j]:
            columns.append((j, -1))
    num_struct = len(columns)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    rels: list[Relation] = []
    for i in range(lp.matrix.rows):
        coeffs = [lp.matrix[i, j] * sign for j, sign in columns]
        rel, r = lp.relations[i], lp.rhs[i]
        if r < 0:
            coeffs = [-c for c in coeffs]
            rel, r = _FLIP[rel], -r
        rows.append(coeffs)
        rhs.append(r)
        rels.append(rel)

    m = len(rows)
    num_slack = sum(1 for rel in rels if rel != "=")
    num_art = sum(1 for rel in rels if rel != "<=")
    width = num_struct + num_slack + num_art
    A = [row + [Fraction(0)] * (width - num_struct) for row in rows]
    basis: list[int] = []
    s_col, a_col = num_struct, num_struct + num_slack
    for i, rel in enumerate(rels):
        if rel == "<=":
            A[i][s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        elif rel == ">=":
            A[i][s_col] = Fraction(-1)
            s_col += 1
            A[i][a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        else:
            A[i][a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1

    tab = _Tableau(A, rhs, basis)
    first_art = num_struct + num_slack
    if num_art:
        phase1 = [Fraction(0)] * first_art + [Fraction(-1)] * num_art
        tab.maximize(phase1, width)
        infeasibility = sum((tab.b[i] for i in range(m) if tab.basis[i] >= first_art), Fraction(0))
        if infeasibility > 0:
            raise Infeasible(f"phase one ended with artificial mass {infeasibility}")
        # drive zero-valued artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tab.A):
            if tab.basis[i] >= first_art:
                col = next((j for j in range(first_art) if tab.A[i][j] != 0), None)
                if col is None:
                    del tab.A[i], tab.b[i], tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1

    sign = 1 if lp.sense == "max" else -1
    cost = [sign * lp.objective[j] * s for j, s in columns] + [Fraction(0)] * (width - num_struct)
    tab.maximize(cost, first_art)

    values = [Fraction(0)] * width
    for i, col in enumerate(tab.basis):
        values[col] = tab.b[i]
    x = [Fraction(0)] * n
    for col, (j, s) in enumerate(columns):
        x[j] += s * values[col]
    solution = tuple(x)
    optimum = lp.value(solution)
    logger.debug(f"lp_optimize: {n} vars, {m} rows, {tab.pivots} pivots, optimum {optimum}")
    return LPSolution(optimum=optimum, solution=solution, pivots=tab.pivots)


def lp_vertex_enumeration(lp: LinearProgram) -> LPSolution:
    """Brute-force oracle: best basic solution over all active-constraint sets.

    Only meaningful for small, feasible, bounded programs.
    """
    n = lp.num_vars
    constraints: list[tuple[Vector, Fraction]] = [
        (lp.matrix.row(i), lp.rhs[i]) for i in range(lp.matrix.rows)
    ]
    for j in range(n):
        if not lp.free[j]:
            constraints.append((tuple(Fraction(int(k == j)) for k in range(n)), Fraction(0)))
    best: LPSolution | None = None
    for active in combinations(range(len(constraints)), n):
        A = RationalMatrix.from_rows([constraints[k][0] for k in active])
        try:
            x = solve_linear_system(A, [constraints[k][1] for k in active])
        except SingularMatrix:
            continue
        if not lp.is_feasible(x):
            continue
        value = lp.value(x)
        if best is None or (value > best.optimum if lp.sense == "max" else value < best.optimum):
            best = LPSolution(optimum=value, solution=x)
    if best is None:
        raise Infeasible("no feasible vertex")
    return best


@dataclass(frozen=True, slots=True)
class MatrixGameSolution:
    value: Fraction
    row_strategy: Vector
    col_strategy: Vector


def matrix_game_value(A: RationalMatrix) -> MatrixGameSolution:
    """Value and optimal mixed strategies of the zero-sum game ``A`` (row maximizes)."""
    m, n = A.rows, A.cols
    if m == 0 or n == 0:
        raise DimensionMismatch("matrix game needs a nonempty matrix")
    if m == 1 and n == 1:
        one = (Fraction(1),)
        return MatrixGameSolution(A[0, 0], one, one)

    # row player: max v  s.t.  x^T A e_j >= v,  sum x = 1
    row_lp = LinearProgram.build(
        objective=[0] * m + [1],
        rows=[[A[i, j] for i in range(m)] + [-1] for j in range(n)] + [[1] * m + [0]],
        relations=[">="] * n + ["="],
        rhs=[0] * n + [1],
        sense="max",
        free=[False] * m + [True],
    )
    # column player: min w  s.t.  e_i^T A y <= w,  sum y = 1
    col_lp = LinearProgram.build(
        objective=[0] * n + [1],
        rows=[[A[i, j] for j in range(n)] + [-1] for i in range(m)] + [[1] * n + [0]],
        relations=["<="] * m + ["="],
        rhs=[0] * m + [1],
        sense="min",
        free=[False] * n + [True],
    )
    rows = lp_optimize(row_lp)
    cols = lp_optimize(col_lp)
    if rows.optimum != cols.optimum:
        # strong duality makes this unreachable for exact arithmetic
        raise ArithmeticError(f"primal {rows.optimum} != dual {cols.optimum}")
    return MatrixGameSolution(
        value=rows.optimum,
        row_strategy=rows.solution[:m],
        col_strategy=cols.solution[:n],
    )
