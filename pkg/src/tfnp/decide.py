"""Sqrt-Sum comparison and PosSLP sign evaluation at desk scale."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .circuits import AlgebraicCircuit, CircuitBuilder, Gate, format_circuit, parse_circuit
from .config import DEFAULT_LIMITS
from .errors import BitCapExceeded, SchemaError

logger = logging.getLogger(__name__)

SqrtSumOutcome = Literal["Less", "Equal", "Greater", "Undecided"]
Sign = Literal["Positive", "Zero", "Negative"]

START_PRECISION = 64


@dataclass(frozen=True, slots=True)
class SqrtSumResult:
    outcome: SqrtSumOutcome
    precision: int
    lower: Fraction
    upper: Fraction


def sqrt_sum_compare(
    d: Sequence[int], k: int, precision_cap: int = DEFAULT_LIMITS.precision_cap
) -> SqrtSumResult:
    """Compare ``sum(sqrt(d_i))`` with ``k``.

    At precision ``p`` the sum lies in ``[lo, hi] / 2**p`` with
    ``lo = sum(isqrt(d_i * 4**p))`` and ``hi`` adding one per non-square
    ``d_i``; precision doubles until ``k`` falls outside or the cap is hit.
    """
    if not d or any(v < 1 for v in d):
        raise ValueError("sqrt_sum_compare needs a nonempty sequence of positive integers")
    if k < 1:
        raise ValueError("k must be >= 1")

    roots = [math.isqrt(v) for v in d]
    if all(r * r == v for r, v in zip(roots, d)):
        total = sum(roots)
        outcome: SqrtSumOutcome = "Equal" if total == k else ("Less" if total < k else "Greater")
        return SqrtSumResult(outcome, 0, Fraction(total), Fraction(total))

    non_squares = sum(1 for r, v in zip(roots, d) if r * r != v)
    p = min(START_PRECISION, precision_cap)
    while True:
        lo = sum(math.isqrt(v << (2 * p)) for v in d)
        hi = lo + non_squares
        target = k << p
        lower, upper = Fraction(lo, 1 << p), Fraction(hi, 1 << p)
        logger.debug(f"sqrt_sum_compare: precision {p}, interval [{float(lower)}, {float(upper)}]")
        # with a non-square present the true sum lies strictly inside (lo, hi)
        if hi <= target:
            return SqrtSumResult("Less", p, lower, upper)
        if lo >= target:
            return SqrtSumResult("Greater", p, lower, upper)
        if p >= precision_cap:
            logger.info(f"sqrt_sum_compare: undecided at {p} bits")
            return SqrtSumResult("Undecided", p, lower, upper)
        p = min(2 * p, precision_cap)


@dataclass(frozen=True, slots=True)
class SLPCircuit:
    """Division-free straight-line program with leaves 0 and 1 and a single output."""

    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self) -> None:
        for k, gate in enumerate(self.gates):
            if gate.op == "const":
                if gate.value not in (0, 1):
                    raise SchemaError(f"g{k}: only the constants 0 and 1 are allowed")
            elif gate.op not in ("add", "sub", "mul"):
                raise SchemaError(f"g{k}: {gate.op} is not allowed in a straight-line program")
            elif not (0 <= gate.left < k and 0 <= gate.right < k):
                raise SchemaError(f"g{k} must reference earlier gates")
        if not 0 <= self.output < len(self.gates):
            raise SchemaError(f"output g{self.output} does not exist")

    @classmethod
    def parse(cls, text: str) -> SLPCircuit:
        circuit = parse_circuit(text).circuit
        if circuit.arity != 0:
            raise SchemaError("straight-line programs take no inputs")
        if circuit.output_arity != 1:
            raise SchemaError("straight-line programs have exactly one output")
        return cls(circuit.gates, circuit.outputs[0])

    @classmethod
    def repeated_squaring(cls, times: int, base: int = 2) -> SLPCircuit:
        """``base ** (2 ** times)`` built from 1 by additions and squarings."""
        b = CircuitBuilder(0)
        one = b.const(1)
        acc = one
        for _ in range(base - 1):
            acc = b.add(acc, one)
        for _ in range(times):
            acc = b.mul(acc, acc)
        circuit = b.build([acc])
        return cls(circuit.gates, acc)

    def as_circuit(self) -> AlgebraicCircuit:
        return AlgebraicCircuit(0, self.gates, (self.output,))

    def to_text(self) -> str:
        return format_circuit(self.as_circuit())


def posslp_decide(c: SLPCircuit, bit_cap: int = DEFAULT_LIMITS.bit_cap) -> Sign:
    """Sign of the program's output, evaluated over exact integers."""
    values: list[int] = []
    for k, gate in enumerate(c.gates):
        match gate.op:
            case "const":
                value = int(gate.value or 0)
            case "add":
                value = values[gate.left] + values[gate.right]
            case "sub":
                value = values[gate.left] - values[gate.right]
            case _:
                a, b = values[gate.left], values[gate.right]
                # product bit length is at most the sum, check before multiplying
                if a.bit_length() + b.bit_length() > bit_cap + 1:
                    raise BitCapExceeded(f"g{k} would exceed {bit_cap} bits")
                value = a * b
        if value.bit_length() > bit_cap:
            raise BitCapExceeded(f"g{k} has {value.bit_length()} bits, cap {bit_cap}")
        values.append(value)
    out = values[c.output]
    logger.debug(f"posslp_decide: output has {out.bit_length()} bits")
    return "Positive" if out > 0 else "Zero" if out == 0 else "Negative"
