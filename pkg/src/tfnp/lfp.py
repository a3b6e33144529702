"""
Least fixed points of monotone polynomial systems.

Branching processes and stochastic context-free grammars both reduce to a
system ``x = F(x)`` whose polynomials have nonnegative coefficients. Kleene
iteration from 0 converges to the least fixed point from below; Newton's
method does the same much faster when the Jacobian step is well defined.
Every returned vector is a lower bound. An upper bound is reported only
when a pre-fixed point ``F(u) <= u`` has been verified exactly.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .config import DEFAULT_LIMITS
from .core import RationalLike, RationalMatrix, Vector, floor_to_grid, linf, linf_distance, parse_rational, solve_linear_system
from .errors import DimensionMismatch, IterCapExceeded, OracleViolation, SingularMatrix

logger = logging.getLogger(__name__)

LfpMethod = Literal["kleene", "newton", "both"]
Answer = Literal["yes", "no", "unknown"]

UPPER_SCALES = (1, 2, 4)


@dataclass(frozen=True, slots=True)
class Monomial:
    coefficient: Fraction
    exponents: tuple[int, ...]

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        out = self.coefficient
        for v, e in zip(x, self.exponents):
            if e:
                out *= v**e
        return out

    def derivative(self, k: int, x: Sequence[Fraction]) -> Fraction:
        e = self.exponents[k]
        if not e:
            return Fraction(0)
        out = self.coefficient * e
        for j, (v, ej) in enumerate(zip(x, self.exponents)):
            power = ej - 1 if j == k else ej
            if power:
                out *= v**power
        return out


@dataclass(frozen=True, slots=True)
class MonotonePolySystem:
    """``polynomials[i]`` is the right-hand side ``F_i`` as a sum of monomials."""

    polynomials: tuple[tuple[Monomial, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.polynomials)
        for i, poly in enumerate(self.polynomials):
            for m in poly:
                if len(m.exponents) != n:
                    raise DimensionMismatch(f"F_{i} has a monomial over {len(m.exponents)} variables, expected {n}")
                if m.coefficient < 0 or any(e < 0 for e in m.exponents):
                    raise DimensionMismatch(f"F_{i} has a negative coefficient or exponent")

    @classmethod
    def from_terms(cls, terms: Sequence[Mapping[tuple[int, ...], RationalLike]]) -> MonotonePolySystem:
        """One ``{exponents: coefficient}`` mapping per variable; zero coefficients are dropped."""
        polys = []
        for poly in terms:
            polys.append(
                tuple(
                    Monomial(c, tuple(exp))
                    for exp, raw in sorted(poly.items())
                    if (c := parse_rational(raw)) != 0
                )
            )
        return cls(tuple(polys))

    @property
    def size(self) -> int:
        return len(self.polynomials)

    @property
    def probabilistic(self) -> bool:
        """Coefficient sums are at most 1, so F maps the unit cube into itself."""
        return all(sum((m.coefficient for m in poly), Fraction(0)) <= 1 for poly in self.polynomials)

    def evaluate(self, x: Sequence[Fraction]) -> Vector:
        if len(x) != self.size:
            raise DimensionMismatch(f"point has {len(x)} coordinates, system has {self.size} variables")
        return tuple(sum((m.evaluate(x) for m in poly), Fraction(0)) for poly in self.polynomials)

    def jacobian(self, x: Sequence[Fraction]) -> RationalMatrix:
        n = self.size
        return RationalMatrix(
            n,
            n,
            tuple(
                sum((m.derivative(k, x) for m in poly), Fraction(0))
                for poly in self.polynomials
                for k in range(n)
            ),
        )


def _collect(n: int, rules: Sequence[tuple[Fraction, Sequence[int]]]) -> tuple[Monomial, ...]:
    """Sum ``p * prod(x_k ** counts[k])`` terms, merging equal exponent vectors."""
    merged: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for p, counts in rules:
        merged[tuple(counts)] += p
    return tuple(Monomial(c, exp) for exp, c in sorted(merged.items()) if c)


# Branching processes


@dataclass(frozen=True, slots=True)
class BranchingRule:
    probability: Fraction
    offspring: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class BranchingProcess:
    """``rules[i]`` lists what an individual of type i is replaced by."""

    rules: tuple[tuple[BranchingRule, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rules)
        if n == 0:
            raise DimensionMismatch("a branching process needs at least one type")
        for i, rules in enumerate(self.rules):
            if not rules:
                raise DimensionMismatch(f"type {i} has no rules")
            for r in rules:
                if len(r.offspring) != n or any(c < 0 for c in r.offspring):
                    raise DimensionMismatch(f"type {i}: offspring vectors need {n} nonnegative counts")
                if r.probability < 0:
                    raise DimensionMismatch(f"type {i}: negative rule probability")
            total = sum((r.probability for r in rules), Fraction(0))
            if total != 1:
                raise DimensionMismatch(f"type {i}: rule probabilities sum to {total}")

    @classmethod
    def build(cls, rules: Sequence[Sequence[tuple[RationalLike, Sequence[int]]]]) -> BranchingProcess:
        return cls(
            tuple(tuple(BranchingRule(parse_rational(p), tuple(v)) for p, v in type_rules) for type_rules in rules)
        )

    @property
    def types(self) -> int:
        return len(self.rules)


def bp_to_system(b: BranchingProcess) -> MonotonePolySystem:
    n = b.types
    return MonotonePolySystem(
        tuple(_collect(n, [(r.probability, r.offspring) for r in rules]) for rules in b.rules)
    )


# Grammars


@dataclass(frozen=True, slots=True)
class Production:
    lhs: str
    rhs: tuple[str, ...]
    probability: Fraction


@dataclass(frozen=True, slots=True)
class SCFG:
    """Symbols not listed in ``nonterminals`` are terminals."""

    nonterminals: tuple[str, ...]
    productions: tuple[Production, ...]
    start: str

    def __post_init__(self) -> None:
        if self.start not in self.nonterminals:
            raise DimensionMismatch(f"start symbol {self.start!r} is not a nonterminal")
        totals: dict[str, Fraction] = {a: Fraction(0) for a in self.nonterminals}
        for p in self.productions:
            if p.lhs not in totals:
                raise DimensionMismatch(f"production for unknown nonterminal {p.lhs!r}")
            if p.probability < 0:
                raise DimensionMismatch(f"negative probability in a production of {p.lhs!r}")
            totals[p.lhs] += p.probability
        for a, total in totals.items():
            if total != 1:
                raise DimensionMismatch(f"productions of {a!r} sum to {total}")

    @classmethod
    def build(
        cls, nonterminals: Sequence[str], productions: Sequence[tuple[str, Sequence[str], RationalLike]], start: str
    ) -> SCFG:
        return cls(
            tuple(nonterminals),
            tuple(Production(lhs, tuple(rhs), parse_rational(p)) for lhs, rhs, p in productions),
            start,
        )

    @property
    def start_index(self) -> int:
        return self.nonterminals.index(self.start)


def scfg_to_system(g: SCFG) -> MonotonePolySystem:
    index = {a: i for i, a in enumerate(g.nonterminals)}
    n = len(index)
    by_lhs: dict[str, list[tuple[Fraction, list[int]]]] = {a: [] for a in g.nonterminals}
    for p in g.productions:
        counts = [0] * n
        for s in p.rhs:
            if s in index:
                counts[index[s]] += 1
        by_lhs[p.lhs].append((p.probability, counts))
    return MonotonePolySystem(tuple(_collect(n, by_lhs[a]) for a in g.nonterminals))


# Iteration


@dataclass(frozen=True, slots=True)
class LfpResult:
    x: Vector
    residual: Fraction
    iterations: int
    method: Literal["kleene", "newton"]
    upper: Vector | None = None
    newton_steps: int = 0
    kleene_steps: int = 0


def _bits(x: Sequence[Fraction]) -> int:
    return max((v.numerator.bit_length() + v.denominator.bit_length() for v in x), default=0)


def _grid_bits(epsilon: Fraction, exact_bits: int) -> int:
    return max(exact_bits, epsilon.denominator.bit_length() - epsilon.numerator.bit_length() + 64)


def _round(x: Vector, exact_bits: int, grid: int) -> Vector:
    """Floor to a dyadic grid once exact iterates get too long; flooring keeps lower bounds."""
    if _bits(x) <= exact_bits:
        return x
    return tuple(floor_to_grid(v, grid) for v in x)


def _check_iterate(sys: MonotonePolySystem, previous: Vector, x: Vector) -> None:
    if any(b < a for a, b in zip(previous, x)):
        raise OracleViolation("least-fixed-point iterates decreased")
    if sys.probabilistic and any(v > 1 for v in x):
        raise OracleViolation("probabilistic system iterate left the unit cube")


def _upper_bound(sys: MonotonePolySystem, x: Vector, direction: Vector) -> Vector | None:
    """A verified pre-fixed point ``F(u) <= u`` above ``x``, which bounds the least fixed point."""
    for t in UPPER_SCALES:
        u = tuple(a + t * d for a, d in zip(x, direction))
        if all(fu <= v for fu, v in zip(sys.evaluate(u), u)):
            return u
    return None


def _bracketed(upper: Vector | None, x: Vector, eps: Fraction) -> bool:
    return upper is not None and linf_distance(upper, x) <= eps


def kleene_lfp(
    sys: MonotonePolySystem,
    epsilon: RationalLike,
    iter_cap: int = DEFAULT_LIMITS.iter_cap,
    exact_bits: int = DEFAULT_LIMITS.exact_bits,
) -> LfpResult:
    eps = parse_rational(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    grid = _grid_bits(eps, exact_bits)
    x: Vector = (Fraction(0),) * sys.size
    for k in range(iter_cap + 1):
        fx = sys.evaluate(x)
        residual = linf_distance(fx, x)
        if residual <= eps:
            upper = _upper_bound(sys, x, tuple(b - a for a, b in zip(x, fx)))
            # without a pre-fixed point the residual is all there is to go on
            if upper is None or _bracketed(upper, x, eps):
                logger.info(f"kleene_lfp: {k} iterations, residual {float(residual):.3g}")
                return LfpResult(x, residual, k, "kleene", upper, kleene_steps=k)
        nxt = _round(fx, exact_bits, grid)
        _check_iterate(sys, x, nxt)
        x = nxt
        if k % 1000 == 0:
            logger.debug(f"kleene_lfp: iteration {k}, residual {float(residual):.3g}")
    raise IterCapExceeded(
        f"kleene_lfp: {iter_cap} iterations", partial=LfpResult(x, residual, iter_cap, "kleene", kleene_steps=iter_cap)
    )


def _newton_direction(sys: MonotonePolySystem, x: Vector, fx: Vector) -> Vector | None:
    """Solve ``(I - J) d = F(x) - x``; only accepted when ``(I - J)^-1`` is nonnegative."""
    n = sys.size
    J = sys.jacobian(x)
    rows = [[Fraction(int(i == j)) - J[i, j] for j in range(n)] for i in range(n)]
    A = RationalMatrix.from_rows(rows)
    try:
        for j in range(n):
            column = solve_linear_system(A, [Fraction(int(i == j)) for i in range(n)])
            if any(v < 0 for v in column):
                return None
        return solve_linear_system(A, [b - a for a, b in zip(x, fx)])
    except SingularMatrix:
        return None


def newton_lfp(
    sys: MonotonePolySystem,
    epsilon: RationalLike,
    iter_cap: int = DEFAULT_LIMITS.iter_cap,
    exact_bits: int = DEFAULT_LIMITS.exact_bits,
) -> LfpResult:
    """Newton iteration from 0, falling back to a Kleene step when the Newton step is rejected."""
    eps = parse_rational(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    grid = _grid_bits(eps, exact_bits)
    x: Vector = (Fraction(0),) * sys.size
    newton = kleene = 0
    for k in range(iter_cap + 1):
        fx = sys.evaluate(x)
        residual = linf_distance(fx, x)
        d = _newton_direction(sys, x, fx)
        if residual <= eps:
            direction = d if d is not None else tuple(b - a for a, b in zip(x, fx))
            upper = _upper_bound(sys, x, direction)
            # at a singular root each Newton step covers half of the remaining gap
            if _bracketed(upper, x, eps) or (upper is None and linf(direction) <= eps / 2):
                logger.info(f"newton_lfp: {newton} Newton and {kleene} Kleene steps, residual {float(residual):.3g}")
                return LfpResult(x, residual, k, "newton", upper, newton, kleene)
        candidate = None
        if d is not None:
            y = tuple(a + b for a, b in zip(x, d))
            if all(b >= a for a, b in zip(x, y)) and not (sys.probabilistic and any(v > 1 for v in y)):
                candidate = y
        if candidate is None:
            logger.warning(f"newton_lfp: Newton step rejected at iteration {k}, taking a Kleene step")
            # rounded Newton iterates need not satisfy x <= F(x)
            candidate = tuple(max(a, b) for a, b in zip(x, fx))
            kleene += 1
        else:
            newton += 1
        nxt = _round(candidate, exact_bits, grid)
        _check_iterate(sys, x, nxt)
        x = nxt
        logger.debug(f"newton_lfp: iteration {k}, residual {float(residual):.3g}")
    raise IterCapExceeded(
        f"newton_lfp: {iter_cap} iterations",
        partial=LfpResult(x, residual, iter_cap, "newton", newton_steps=newton, kleene_steps=kleene),
    )


def lfp_solve(
    sys: MonotonePolySystem,
    epsilon: RationalLike,
    method: LfpMethod = "newton",
    iter_cap: int = DEFAULT_LIMITS.iter_cap,
    exact_bits: int = DEFAULT_LIMITS.exact_bits,
) -> tuple[LfpResult, LfpResult | None]:
    """The primary result plus the Kleene cross-check when ``method == "both"``."""
    if method == "kleene":
        return kleene_lfp(sys, epsilon, iter_cap, exact_bits), None
    primary = newton_lfp(sys, epsilon, iter_cap, exact_bits)
    if method == "both":
        return primary, kleene_lfp(sys, epsilon, iter_cap, exact_bits)
    return primary, None


@dataclass(frozen=True, slots=True)
class ExtinctionReport:
    probabilities: Vector
    newton: LfpResult
    kleene: LfpResult
    agree: bool
    certain: tuple[Answer, ...]


def _certain(lower: Fraction, upper: Fraction | None) -> Answer:
    if lower == 1:
        return "yes"
    if upper is not None and upper < 1:
        return "no"
    return "unknown"


def extinction_report(
    b: BranchingProcess,
    epsilon: RationalLike,
    iter_cap: int = DEFAULT_LIMITS.iter_cap,
    exact_bits: int = DEFAULT_LIMITS.exact_bits,
) -> ExtinctionReport:
    """Extinction probabilities (lower bounds) with a Kleene cross-check.

    ``certain[i]`` answers "does type i die out with probability 1?" only
    when the bounds settle it.
    """
    eps = parse_rational(epsilon)
    sys = bp_to_system(b)
    newton = newton_lfp(sys, eps, iter_cap, exact_bits)
    kleene = kleene_lfp(sys, eps, iter_cap, exact_bits)
    agree = linf_distance(newton.x, kleene.x) <= eps
    if not agree:
        logger.warning(f"extinction_report: Newton and Kleene differ by {float(linf_distance(newton.x, kleene.x)):.3g}")
    uppers = [u for u in (newton.upper, kleene.upper) if u is not None]
    upper = tuple(min(col) for col in zip(*uppers)) if uppers else None
    lower = tuple(max(a, c) for a, c in zip(newton.x, kleene.x))
    certain = tuple(_certain(lo, upper[i] if upper else None) for i, lo in enumerate(lower))
    return ExtinctionReport(lower, newton, kleene, agree, certain)
