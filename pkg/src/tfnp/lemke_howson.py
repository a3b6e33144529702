"""Lemke-Howson complementary pivoting with a lexicographic ratio test."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .core import RationalMatrix
from .errors import DimensionMismatch, PivotLimitExceeded, Unbounded
from .normal_form import MixedProfile, NormalFormGame

logger = logging.getLogger(__name__)

Basis = tuple[int, ...]


class _Tableau:
    """Rows ``T x = 1`` over the label-indexed variables ``0..m+n-1``.

    ``identity`` lists the columns of the starting basis, in the order used to
    break ratio-test ties.
    """

    def __init__(self, rows: list[list[Fraction]], basis: list[int], identity: list[int]) -> None:
        self.rows = rows
        self.basis = basis
        self.identity = identity

    def _lex_key(self, r: int, c: int) -> list[Fraction]:
        row = self.rows[r]
        a = row[c]
        return [row[-1] / a, *(row[k] / a for k in self.identity)]

    def enter(self, c: int) -> int:
        """Pivot column ``c`` into the basis; return the label that leaves."""
        candidates = [r for r, row in enumerate(self.rows) if row[c] > 0]
        if not candidates:
            raise Unbounded(f"no positive entry in column {c}")
        r = min(candidates, key=lambda i: self._lex_key(i, c))
        pivot = self.rows[r]
        p = pivot[c]
        pivot = [v / p for v in pivot]
        self.rows[r] = pivot
        for i, row in enumerate(self.rows):
            if i != r and row[c]:
                f = row[c]
                self.rows[i] = [a - f * b for a, b in zip(row, pivot)]
        leaving = self.basis[r]
        self.basis[r] = c
        return leaving

    def values(self, labels: range) -> list[Fraction]:
        out = {b: row[-1] for b, row in zip(self.basis, self.rows)}
        return [out.get(k, Fraction(0)) for k in labels]


@dataclass(frozen=True, slots=True)
class LemkeHowsonResult:
    profile: MixedProfile
    dropped_label: int
    pivots: int
    bases: tuple[tuple[Basis, Basis], ...]


def _positive(M: RationalMatrix) -> RationalMatrix:
    low = min(M.entries)
    return M.shifted(1 - low) if low <= 0 else M


def lemke_howson(
    g: NormalFormGame, dropped_label: int = 0, pivot_limit: int | None = None
) -> LemkeHowsonResult:
    """Follow the path from the artificial equilibrium after dropping ``dropped_label``.

    Labels ``0..m-1`` are the row player's strategies, ``m..m+n-1`` the column
    player's. Payoffs are shifted to be positive, which leaves the equilibria
    unchanged.
    """
    A, B = g.bimatrix()
    m, n = A.rows, A.cols
    if not 0 <= dropped_label < m + n:
        raise DimensionMismatch(f"dropped label {dropped_label} outside 0..{m + n - 1}")
    A, B = _positive(A), _positive(B)
    limit = pivot_limit if pivot_limit is not None else comb(m + n, m) * comb(m + n, n)
    one, zero = Fraction(1), Fraction(0)

    # x side: B^T x + s = 1, x carries labels 0..m-1, slacks m..m+n-1
    x_tab = _Tableau(
        [[B[i, j] for i in range(m)] + [one if k == j else zero for k in range(n)] + [one] for j in range(n)],
        [m + j for j in range(n)],
        [m + j for j in range(n)],
    )
    # y side: r + A y = 1, slacks carry labels 0..m-1, y carries m..m+n-1
    y_tab = _Tableau(
        [[one if k == i else zero for k in range(m)] + [A[i, j] for j in range(n)] + [one] for i in range(m)],
        list(range(m)),
        list(range(m)),
    )

    tableau, other = (x_tab, y_tab) if dropped_label < m else (y_tab, x_tab)
    entering = dropped_label
    pivots = 0
    bases: list[tuple[Basis, Basis]] = [(tuple(sorted(x_tab.basis)), tuple(sorted(y_tab.basis)))]
    while True:
        if pivots >= limit:
            raise PivotLimitExceeded(f"lemke_howson: {limit} pivots without an equilibrium")
        leaving = tableau.enter(entering)
        pivots += 1
        bases.append((tuple(sorted(x_tab.basis)), tuple(sorted(y_tab.basis))))
        logger.debug(f"lemke_howson: pivot {pivots}, entered {entering}, left {leaving}")
        if leaving == dropped_label:
            break
        entering = leaving
        tableau, other = other, tableau

    x = x_tab.values(range(m))
    y = y_tab.values(range(m, m + n))
    sx, sy = sum(x), sum(y)
    profile = MixedProfile((tuple(v / sx for v in x), tuple(v / sy for v in y)))
    logger.info(f"lemke_howson: {m}x{n} game, label {dropped_label}, {pivots} pivots")
    return LemkeHowsonResult(profile, dropped_label, pivots, tuple(bases))
