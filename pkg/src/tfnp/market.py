"""Exchange-market equilibria as weak approximate fixed points of a Nash-style price map."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction

from .circuits import AlgebraicCircuit, CircuitBuilder, circuit_eval
from .config import DEFAULT_LIMITS
from .core import RationalLike, Vector, linf, parse_rational
from .errors import DimensionMismatch, DivisionByZero, ValidationFailed
from .simplicial import ScarfResult, scarf_weak_fixpoint

logger = logging.getLogger(__name__)

HOMOGENEITY_SCALES = (Fraction(2), Fraction(1, 3))


@dataclass(frozen=True, slots=True)
class EconomyReport:
    checked: int
    walras_failures: tuple[Vector, ...]
    homogeneity_failures: tuple[Vector, ...]

    @property
    def passed(self) -> bool:
        return not self.walras_failures and not self.homogeneity_failures


@dataclass(frozen=True, slots=True)
class ExchangeEconomy:
    """``excess`` maps n prices to n excess demands; ``eta`` overrides the interior clamp."""

    commodities: int
    excess: AlgebraicCircuit
    eta: Fraction | None = None

    def __post_init__(self) -> None:
        n = self.commodities
        if n < 1 or self.excess.arity != n or self.excess.output_arity != n:
            raise DimensionMismatch(f"excess demand must map {n} prices to {n} demands")

    def clamp(self, p: Vector, eta: Fraction) -> Vector:
        n = self.commodities
        return tuple((1 - n * eta) * v + eta for v in p)

    def validate(self, samples: int = 64, seed: int = 0) -> EconomyReport:
        """Sampled Walras' law and degree-0 homogeneity at interior rational prices."""
        rng = random.Random(seed)
        walras: list[Vector] = []
        homogeneity: list[Vector] = []
        for _ in range(samples):
            weights = [rng.randint(1, 16) for _ in range(self.commodities)]
            total = sum(weights)
            p = tuple(Fraction(w, total) for w in weights)
            try:
                g = circuit_eval(self.excess, p)
            except DivisionByZero:
                walras.append(p)
                continue
            if sum((a * b for a, b in zip(p, g)), Fraction(0)) != 0:
                walras.append(p)
            for scale in HOMOGENEITY_SCALES:
                if circuit_eval(self.excess, tuple(scale * v for v in p)) != g:
                    homogeneity.append(p)
                    break
        report = EconomyReport(samples, tuple(walras), tuple(homogeneity))
        logger.info(
            f"ExchangeEconomy.validate: {samples} samples, {len(walras)} Walras and"
            f" {len(homogeneity)} homogeneity failures"
        )
        return report


def price_map(e: ExchangeEconomy, eta: Fraction) -> AlgebraicCircuit:
    """``(p_i + max(0, g_i)) / (1 + sum_j max(0, g_j))`` with ``g`` read at the clamped prices."""
    n = e.commodities
    b = CircuitBuilder(n)
    zero, one = b.const(0), b.const(1)
    prices = [b.input(i) for i in range(n)]
    clamped = [b.add(b.scale(p, 1 - n * eta), b.const(eta)) for p in prices]
    positives = [b.max(zero, g) for g in b.inline(e.excess, clamped)]
    denom = b.add(one, b.sum(positives))
    return b.build([b.div(b.add(p, g), denom) for p, g in zip(prices, positives)])


@dataclass(frozen=True, slots=True)
class MarketResult:
    prices: Vector
    residual: Fraction
    excess: Vector
    eta: Fraction
    scarf: ScarfResult


def market_equilibrium_weak(
    e: ExchangeEconomy,
    epsilon: RationalLike,
    pitch: RationalLike | None = None,
    retries: int = DEFAULT_LIMITS.retries,
    samples: int = 64,
    seed: int = 0,
) -> MarketResult:
    eps = parse_rational(epsilon)
    report = e.validate(samples=samples, seed=seed)
    if not report.passed:
        raise ValidationFailed(
            f"economy fails validation: {len(report.walras_failures)} Walras,"
            f" {len(report.homogeneity_failures)} homogeneity violations"
        )
    eta = e.eta if e.eta is not None else eps / (4 * e.commodities)
    scarf = scarf_weak_fixpoint(price_map(e, eta), eps, pitch=pitch, retries=retries)
    excess = circuit_eval(e.excess, e.clamp(scarf.point, eta))
    logger.info(f"market_equilibrium_weak: residual {scarf.residual}, max excess {float(linf(excess)):.3g}")
    return MarketResult(scarf.point, scarf.residual, excess, eta, scarf)
