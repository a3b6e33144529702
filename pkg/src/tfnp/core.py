"""
Exact rational core: rational parsing, dense matrices, linear systems
and rational reconstruction.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadRational, DimensionMismatch, SingularMatrix

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = int | str | Fraction
Vector = tuple[Fraction, ...]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an integer, a Fraction or a ``"num/den"`` string."""
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ValueError(f"expected integer or 'num/den' string, got {type(value).__name__}")
    text = value.strip()
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {value!r}") from None
    if d == 0:
        raise BadRational(f"zero denominator in {value!r}")
    return Fraction(n, d)


def format_rational(q: Fraction | int) -> str:
    return str(Fraction(q))


def vector(values: Iterable[RationalLike]) -> Vector:
    return tuple(parse_rational(v) for v in values)


def linf(values: Iterable[Fraction]) -> Fraction:
    """L-infinity norm; 0 for an empty vector."""
    return max((abs(v) for v in values), default=Fraction(0))


def linf_distance(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    if len(x) != len(y):
        raise DimensionMismatch(f"vectors of length {len(x)} and {len(y)}")
    return linf(a - b for a, b in zip(x, y))


@dataclass(frozen=True, slots=True)
class RationalMatrix:
    """Dense row-major matrix of Fractions."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries,"
                f" got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> RationalMatrix:
        if not rows:
            return cls(0, 0, ())
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), width, tuple(parse_rational(v) for r in rows for v in r))

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(
            self.cols,
            self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def matvec(self, x: Sequence[Fraction]) -> Vector:
        if len(x) != self.cols:
            raise DimensionMismatch(f"matrix has {self.cols} columns, vector has {len(x)}")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), x)), Fraction(0)) for i in range(self.rows)
        )

    def shifted(self, c: Fraction) -> RationalMatrix:
        return RationalMatrix(self.rows, self.cols, tuple(v + c for v in self.entries))

    def negated(self) -> RationalMatrix:
        return RationalMatrix(self.rows, self.cols, tuple(-v for v in self.entries))


def _integer_rows(A: RationalMatrix, b: Sequence[Fraction]) -> list[list[int]]:
    """Scale each augmented row by the lcm of its denominators."""
    out: list[list[int]] = []
    for i in range(A.rows):
        row = [*A.row(i), Fraction(b[i])]
        scale = math.lcm(*(v.denominator for v in row))
        out.append([int(v * scale) for v in row])
    return out


def solve_linear_system(A: RationalMatrix, b: Sequence[RationalLike]) -> Vector:
    """Solve ``A x = b`` exactly.

    Fraction-free (Bareiss) elimination on the integer-scaled augmented matrix;
    the pivot in each column is the first row with a nonzero entry.
    """
    if A.rows != A.cols:
        raise DimensionMismatch(f"expected a square matrix, got {A.rows}x{A.cols}")
    if len(b) != A.rows:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {A.rows}")
    n = A.rows
    rhs = [parse_rational(v) for v in b]
    M = _integer_rows(A, rhs)
    prev = 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if M[i][k] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {k}")
        if pivot != k:
            M[k], M[pivot] = M[pivot], M[k]
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n + 1):
                row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk

    x: list[Fraction] = [Fraction(0)] * n
    for i in reversed(range(n)):
        acc = Fraction(M[i][n])
        for j in range(i + 1, n):
            acc -= M[i][j] * x[j]
        x[i] = acc / M[i][i]
    return tuple(x)


def rational_reconstruct(x: RationalLike, denom_bound: int) -> Fraction:
    """Closest rational to ``x`` with denominator at most ``denom_bound``.

    Walks the continued-fraction convergents of ``x``; the answer is either the
    last convergent within the bound or the best semiconvergent after it. Ties
    go to the smaller denominator.
    """
    if denom_bound < 1:
        raise ValueError("denom_bound must be >= 1")
    q = parse_rational(x)
    if q.denominator <= denom_bound:
        return q

    p0, q0, p1, q1 = 0, 1, 1, 0
    n, d = q.numerator, q.denominator
    while True:
        a = n // d
        q2 = q0 + a * q1
        if q2 > denom_bound:
            break
        p0, q0, p1, q1 = p1, q1, p0 + a * p1, q2
        n, d = d, n - a * d

    k = (denom_bound - q0) // q1
    semi = Fraction(p0 + k * p1, q0 + k * q1)
    conv = Fraction(p1, q1)
    ds, dc = abs(semi - q), abs(conv - q)
    if ds < dc:
        return semi
    if dc < ds:
        return conv
    return conv if conv.denominator <= semi.denominator else semi


def floor_to_grid(q: Fraction, bits: int) -> Fraction:
    """Largest multiple of 2**-bits that is <= q."""
    scale = 1 << bits
    return Fraction((q.numerator * scale) // q.denominator, scale)
