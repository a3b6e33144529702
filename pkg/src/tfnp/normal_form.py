"""
k-player normal-form games: expected payoffs, gains, Nash's map, epsilon-Nash
checks, pure equilibria and support enumeration for bimatrix games.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Any

from .config import DEFAULT_LIMITS
from .core import (
    RationalLike,
    RationalMatrix,
    Vector,
    linf_distance,
    parse_rational,
    solve_linear_system,
)
from .errors import DimensionMismatch, SingularMatrix, SizeCapExceeded

logger = logging.getLogger(__name__)

PureProfile = tuple[int, ...]


@dataclass(frozen=True, slots=True)
class NormalFormGame:
    """Payoffs are stored flat per player, profiles in row-major order (last player fastest)."""

    strategy_counts: tuple[int, ...]
    payoffs: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if not self.strategy_counts:
            raise DimensionMismatch("a game needs at least one player")
        if any(s < 1 for s in self.strategy_counts):
            raise DimensionMismatch("every player needs at least one strategy")
        size = math.prod(self.strategy_counts)
        if len(self.payoffs) != len(self.strategy_counts):
            raise DimensionMismatch("one payoff tensor per player is required")
        if any(len(p) != size for p in self.payoffs):
            raise DimensionMismatch(f"payoff tensors must have {size} entries")

    @classmethod
    def from_function(
        cls, strategy_counts: Sequence[int], payoff: Callable[[int, PureProfile], RationalLike]
    ) -> NormalFormGame:
        counts = tuple(strategy_counts)
        profiles = list(product(*(range(s) for s in counts)))
        return cls(
            counts,
            tuple(tuple(parse_rational(payoff(i, p)) for p in profiles) for i in range(len(counts))),
        )

    @classmethod
    def from_tensors(cls, tensors: Sequence[Any]) -> NormalFormGame:
        """Build from one nested-list payoff tensor per player."""
        counts: list[int] = []
        level = tensors[0]
        for _ in range(len(tensors)):
            if not isinstance(level, (list, tuple)):
                raise DimensionMismatch("payoff tensor depth must equal the player count")
            counts.append(len(level))
            level = level[0]

        def flatten(t: Any, depth: int) -> list[Fraction]:
            if depth == 0:
                return [parse_rational(t)]
            if not isinstance(t, (list, tuple)) or len(t) != counts[len(counts) - depth]:
                raise DimensionMismatch("ragged payoff tensor")
            return [v for sub in t for v in flatten(sub, depth - 1)]

        return cls(tuple(counts), tuple(tuple(flatten(t, len(counts))) for t in tensors))

    @classmethod
    def from_bimatrix(
        cls,
        A: RationalMatrix | Sequence[Sequence[RationalLike]],
        B: RationalMatrix | Sequence[Sequence[RationalLike]],
    ) -> NormalFormGame:
        a = A if isinstance(A, RationalMatrix) else RationalMatrix.from_rows(A)
        b = B if isinstance(B, RationalMatrix) else RationalMatrix.from_rows(B)
        if (a.rows, a.cols) != (b.rows, b.cols):
            raise DimensionMismatch(f"payoff matrices {a.rows}x{a.cols} and {b.rows}x{b.cols}")
        return cls((a.rows, a.cols), (a.entries, b.entries))

    @property
    def players(self) -> int:
        return len(self.strategy_counts)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for s in self.strategy_counts:
            out.append(acc)
            acc += s
        return tuple(out)

    @property
    def is_bimatrix(self) -> bool:
        return self.players == 2

    def bimatrix(self) -> tuple[RationalMatrix, RationalMatrix]:
        if not self.is_bimatrix:
            raise DimensionMismatch(f"expected a 2-player game, got {self.players} players")
        m, n = self.strategy_counts
        return RationalMatrix(m, n, self.payoffs[0]), RationalMatrix(m, n, self.payoffs[1])

    def profiles(self) -> Iterator[PureProfile]:
        return product(*(range(s) for s in self.strategy_counts))

    def index(self, profile: Sequence[int]) -> int:
        if len(profile) != self.players:
            raise DimensionMismatch(f"profile has {len(profile)} entries, game has {self.players} players")
        flat = 0
        for s, count in zip(profile, self.strategy_counts):
            if not 0 <= s < count:
                raise DimensionMismatch(f"strategy {s} out of range 0..{count - 1}")
            flat = flat * count + s
        return flat

    def payoff(self, i: int, profile: Sequence[int]) -> Fraction:
        return self.payoffs[i][self.index(profile)]

    def max_abs_payoff(self) -> Fraction:
        return max((abs(v) for p in self.payoffs for v in p), default=Fraction(0))

    def to_tensors(self) -> list[Any]:
        def nest(flat: Sequence[Fraction], counts: Sequence[int]) -> Any:
            if not counts:
                return flat[0]
            step = len(flat) // counts[0]
            return [nest(flat[k * step : (k + 1) * step], counts[1:]) for k in range(counts[0])]

        return [nest(p, self.strategy_counts) for p in self.payoffs]


@dataclass(frozen=True, slots=True)
class MixedProfile:
    """One probability vector per player; each block is nonnegative and sums to 1."""

    blocks: tuple[Vector, ...]

    def __post_init__(self) -> None:
        for i, block in enumerate(self.blocks):
            if not block:
                raise DimensionMismatch(f"player {i} has an empty distribution")
            if any(v < 0 for v in block) or sum(block) != 1:
                raise DimensionMismatch(f"player {i} block {block} is not a distribution")

    @classmethod
    def of(cls, *blocks: Sequence[RationalLike]) -> MixedProfile:
        return cls(tuple(tuple(parse_rational(v) for v in b) for b in blocks))

    @classmethod
    def from_flat(cls, flat: Sequence[RationalLike], sizes: Sequence[int]) -> MixedProfile:
        if len(flat) != sum(sizes):
            raise DimensionMismatch(f"flat profile has {len(flat)} entries, expected {sum(sizes)}")
        blocks, start = [], 0
        for s in sizes:
            blocks.append(tuple(parse_rational(v) for v in flat[start : start + s]))
            start += s
        return cls(tuple(blocks))

    @classmethod
    def pure(cls, sizes: Sequence[int], choice: Sequence[int]) -> MixedProfile:
        return cls(
            tuple(tuple(Fraction(int(j == c)) for j in range(s)) for s, c in zip(sizes, choice))
        )

    @classmethod
    def uniform(cls, sizes: Sequence[int]) -> MixedProfile:
        return cls(tuple((Fraction(1, s),) * s for s in sizes))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def flat(self) -> Vector:
        return tuple(v for b in self.blocks for v in b)

    def distance(self, other: MixedProfile) -> Fraction:
        return linf_distance(self.flat, other.flat)

    def support(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, v in enumerate(self.blocks[i]) if v)


@dataclass(frozen=True, slots=True)
class NashCheck:
    holds: bool
    worst_gain: Fraction
    worst: tuple[int, int]


@dataclass(frozen=True, slots=True)
class Deviation:
    player: int
    strategy: int
    improvement: Fraction


def _check_dims(g: NormalFormGame, x: MixedProfile) -> None:
    if x.sizes != g.strategy_counts:
        raise DimensionMismatch(f"profile sizes {x.sizes} do not match game {g.strategy_counts}")


def _weighted_sum(g: NormalFormGame, x: MixedProfile, i: int, fixed: tuple[int, int] | None) -> Fraction:
    supports: list[Sequence[int]] = [x.support(p) for p in range(g.players)]
    if fixed is not None:
        supports[fixed[0]] = (fixed[1],)
    total = Fraction(0)
    for profile in product(*supports):
        weight = Fraction(1)
        for p, s in enumerate(profile):
            if fixed is None or p != fixed[0]:
                weight *= x.blocks[p][s]
        total += weight * g.payoff(i, profile)
    return total


def expected_payoff(g: NormalFormGame, x: MixedProfile, i: int) -> Fraction:
    _check_dims(g, x)
    return _weighted_sum(g, x, i, None)


def deviation_payoff(g: NormalFormGame, x: MixedProfile, i: int, j: int) -> Fraction:
    """``U_i(x_{-i}, j)``: player i switches to pure strategy j."""
    _check_dims(g, x)
    if not 0 <= j < g.strategy_counts[i]:
        raise DimensionMismatch(f"player {i} has no strategy {j}")
    return _weighted_sum(g, x, i, (i, j))


def gain(g: NormalFormGame, x: MixedProfile, i: int, j: int) -> Fraction:
    return deviation_payoff(g, x, i, j) - expected_payoff(g, x, i)


def _gains(g: NormalFormGame, x: MixedProfile, i: int) -> list[Fraction]:
    base = expected_payoff(g, x, i)
    return [deviation_payoff(g, x, i, j) - base for j in range(g.strategy_counts[i])]


def nash_map(g: NormalFormGame, x: MixedProfile) -> MixedProfile:
    """Nash's map; its fixed points are exactly the equilibria."""
    _check_dims(g, x)
    blocks = []
    for i, block in enumerate(x.blocks):
        positive = [max(Fraction(0), v) for v in _gains(g, x, i)]
        denom = 1 + sum(positive)
        blocks.append(tuple((xv + pv) / denom for xv, pv in zip(block, positive)))
    return MixedProfile(tuple(blocks))


def epsilon_nash_check(g: NormalFormGame, x: MixedProfile, epsilon: RationalLike = 0) -> NashCheck:
    """Pure deviations suffice: payoff is linear in the deviator's own strategy."""
    eps = parse_rational(epsilon)
    _check_dims(g, x)
    worst: tuple[int, int] = (0, 0)
    worst_gain: Fraction | None = None
    for i in range(g.players):
        for j, v in enumerate(_gains(g, x, i)):
            if worst_gain is None or v > worst_gain:
                worst, worst_gain = (i, j), v
    assert worst_gain is not None
    return NashCheck(worst_gain <= eps, worst_gain, worst)


def best_pure_deviation(g: NormalFormGame, profile: Sequence[int]) -> Deviation | None:
    """The largest strict unilateral improvement, lowest player/strategy on ties."""
    best: Deviation | None = None
    current = list(profile)
    for i in range(g.players):
        here = g.payoff(i, current)
        for j in range(g.strategy_counts[i]):
            if j == profile[i]:
                continue
            current[i] = j
            improvement = g.payoff(i, current) - here
            current[i] = profile[i]
            if improvement > 0 and (best is None or improvement > best.improvement):
                best = Deviation(i, j, improvement)
    return best


def pure_equilibria(g: NormalFormGame) -> list[PureProfile]:
    return [p for p in g.profiles() if best_pure_deviation(g, p) is None]


def strong_to_weak_radius(g: NormalFormGame, epsilon: RationalLike) -> Fraction:
    """L-infinity radius around an exact equilibrium inside which every profile is epsilon-Nash."""
    eps = parse_rational(epsilon)
    bound = g.max_abs_payoff()
    if bound == 0:
        return Fraction(1)
    return eps / (g.players * bound * sum(g.strategy_counts))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def grid_profiles(sizes: Sequence[int], denominator: int) -> Iterator[MixedProfile]:
    """Every profile whose entries are multiples of ``1/denominator``."""
    per_player = [
        [tuple(Fraction(c, denominator) for c in comp) for comp in _compositions(denominator, s)]
        for s in sizes
    ]
    for blocks in product(*per_player):
        yield MixedProfile(tuple(blocks))


def _indifference(M: RationalMatrix, rows: Sequence[int], cols: Sequence[int]) -> tuple[Vector, Fraction]:
    """Mix over ``cols`` making every row in ``rows`` earn the same ``v``."""
    k = len(cols)
    system = [[M[r, c] for c in cols] + [Fraction(-1)] for r in rows]
    system.append([Fraction(1)] * k + [Fraction(0)])
    sol = solve_linear_system(RationalMatrix.from_rows(system), [0] * k + [1])
    return sol[:k], sol[k]


def support_enumeration_nash(
    g: NormalFormGame, size_cap: int = DEFAULT_LIMITS.size_cap
) -> tuple[MixedProfile, ...]:
    """All equilibria of a nondegenerate bimatrix game, in discovery order.

    Supports of equal size are paired; each pair is solved for the
    indifference system, then kept if both mixes are nonnegative and best
    responses.
    """
    A, B = g.bimatrix()
    m, n = A.rows, A.cols
    if m > size_cap or n > size_cap:
        raise SizeCapExceeded(f"{m}x{n} game exceeds support enumeration cap {size_cap}")
    Bt = B.transpose()
    found: list[MixedProfile] = []
    for k in range(1, min(m, n) + 1):
        for I in combinations(range(m), k):
            for J in combinations(range(n), k):
                try:
                    y_sub, v = _indifference(A, I, J)
                    x_sub, u = _indifference(Bt, J, I)
                except SingularMatrix:
                    continue
                if any(q < 0 for q in y_sub) or any(q < 0 for q in x_sub):
                    continue
                x = [Fraction(0)] * m
                y = [Fraction(0)] * n
                for idx, q in zip(I, x_sub):
                    x[idx] = q
                for idx, q in zip(J, y_sub):
                    y[idx] = q
                if any(r > v for r in A.matvec(y)) or any(c > u for c in Bt.matvec(x)):
                    continue
                profile = MixedProfile((tuple(x), tuple(y)))
                if profile not in found:
                    found.append(profile)
    logger.info(f"support_enumeration_nash: {m}x{n} game, {len(found)} equilibria")
    return tuple(found)
