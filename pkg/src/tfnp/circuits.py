"""
Algebraic circuits over {+, -, *, /, max, min} with rational constants.

Text format, one statement per line::

    inputs 2
    domain simplex 2
    g0 = x0
    g1 = 1/2
    g2 = mul(g1, g0)
    g3 = max(g2, x1)
    outputs g3 g0

References are ``g<k>`` (an earlier label), ``x<j>`` (input j) or a rational
literal. ``#`` starts a comment.
"""

from __future__ import annotations

import logging
import random
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import TYPE_CHECKING, Literal

from .core import RationalLike, Vector, format_rational, parse_rational
from .errors import DimensionMismatch, DivisionByZero, SchemaError

if TYPE_CHECKING:
    from .normal_form import NormalFormGame

logger = logging.getLogger(__name__)

Op = Literal["input", "const", "add", "sub", "mul", "div", "max", "min"]
BINARY_OPS: tuple[Op, ...] = ("add", "sub", "mul", "div", "max", "min")
NashVariant = Literal["projection", "ratio"]


@dataclass(frozen=True, slots=True)
class Gate:
    op: Op
    left: int = -1
    right: int = -1
    value: Fraction | None = None
    index: int = -1

    def __str__(self) -> str:
        match self.op:
            case "input":
                return f"x{self.index}"
            case "const":
                assert self.value is not None
                return format_rational(self.value)
            case _:
                return f"{self.op}(g{self.left}, g{self.right})"


@dataclass(frozen=True, slots=True)
class AlgebraicCircuit:
    arity: int
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        for k, gate in enumerate(self.gates):
            if gate.op == "input":
                if not 0 <= gate.index < self.arity:
                    raise DimensionMismatch(f"g{k} reads x{gate.index} but arity is {self.arity}")
            elif gate.op == "const":
                if gate.value is None:
                    raise DimensionMismatch(f"g{k} is a constant without a value")
            elif not (0 <= gate.left < k and 0 <= gate.right < k):
                raise DimensionMismatch(f"g{k} must reference earlier gates")
        for out in self.outputs:
            if not 0 <= out < len(self.gates):
                raise DimensionMismatch(f"output g{out} does not exist")

    @property
    def output_arity(self) -> int:
        return len(self.outputs)

    def to_text(self, domain: DomainSpec | None = None) -> str:
        return format_circuit(self, domain)


DomainKind = Literal["cube", "simplex", "product"]


@dataclass(frozen=True, slots=True)
class DomainSpec:
    """Unit cube, unit simplex, or a product of simplexes with ``blocks`` sizes."""

    kind: DomainKind
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.blocks or any(b < 1 for b in self.blocks):
            raise DimensionMismatch("domain block sizes must be >= 1")
        if self.kind != "product" and len(self.blocks) != 1:
            raise DimensionMismatch(f"{self.kind} domain takes a single dimension")

    @classmethod
    def cube(cls, n: int) -> DomainSpec:
        return cls("cube", (n,))

    @classmethod
    def simplex(cls, n: int) -> DomainSpec:
        return cls("simplex", (n,))

    @classmethod
    def product(cls, *sizes: int) -> DomainSpec:
        return cls("product", tuple(sizes))

    @classmethod
    def parse(cls, text: str) -> DomainSpec:
        kind, *sizes = text.split()
        if kind not in ("cube", "simplex", "product"):
            raise SchemaError(f"unknown domain kind {kind!r}")
        try:
            blocks = tuple(int(s) for s in sizes)
        except ValueError:
            raise SchemaError(f"bad domain sizes in {text!r}") from None
        try:
            return cls(kind, blocks)  # type: ignore[arg-type]
        except DimensionMismatch as exc:
            raise SchemaError(str(exc)) from None

    def __str__(self) -> str:
        return " ".join([self.kind, *(str(b) for b in self.blocks)])

    @property
    def dimension(self) -> int:
        return sum(self.blocks)

    @property
    def simplex_blocks(self) -> tuple[int, ...]:
        if self.kind == "cube":
            return ()
        return self.blocks

    def contains(self, x: Sequence[Fraction]) -> str | None:
        """``None`` when ``x`` lies in the domain, else the reason it does not."""
        if len(x) != self.dimension:
            return f"point has {len(x)} coordinates, domain has {self.dimension}"
        if self.kind == "cube":
            bad = next((i for i, v in enumerate(x) if not 0 <= v <= 1), None)
            return None if bad is None else f"coordinate {bad} = {x[bad]} outside [0, 1]"
        start = 0
        for b, size in enumerate(self.blocks):
            block = x[start : start + size]
            if any(v < 0 for v in block):
                return f"block {b} has a negative coordinate"
            if sum(block) != 1:
                return f"block {b} sums to {sum(block)}"
            start += size
        return None

    def vertices(self) -> Iterator[Vector]:
        one, zero = Fraction(1), Fraction(0)
        if self.kind == "cube":
            for bits in product((zero, one), repeat=self.blocks[0]):
                yield tuple(bits)
            return
        units = [
            [tuple(one if k == j else zero for k in range(size)) for j in range(size)]
            for size in self.blocks
        ]
        for choice in product(*units):
            yield tuple(v for block in choice for v in block)

    def sample(self, rng: random.Random, denominator: int = 16) -> Vector:
        if self.kind == "cube":
            return tuple(Fraction(rng.randint(0, denominator), denominator) for _ in range(self.blocks[0]))
        point: list[Fraction] = []
        for size in self.blocks:
            weights = [rng.randint(0, denominator) for _ in range(size)]
            if not any(weights):
                weights[rng.randrange(size)] = 1
            total = sum(weights)
            point.extend(Fraction(w, total) for w in weights)
        return tuple(point)


# Building


class CircuitBuilder:
    """Appends gates in topological order, sharing leaves and repeated products."""

    def __init__(self, arity: int) -> None:
        self.arity = arity
        self._gates: list[Gate] = []
        self._consts: dict[Fraction, int] = {}
        self._inputs: dict[int, int] = {}
        self._products: dict[tuple[int, ...], int] = {}

    def _push(self, gate: Gate) -> int:
        self._gates.append(gate)
        return len(self._gates) - 1

    def input(self, i: int) -> int:
        if i not in self._inputs:
            self._inputs[i] = self._push(Gate("input", index=i))
        return self._inputs[i]

    def const(self, q: RationalLike) -> int:
        value = parse_rational(q)
        if value not in self._consts:
            self._consts[value] = self._push(Gate("const", value=value))
        return self._consts[value]

    def op(self, op: Op, a: int, b: int) -> int:
        return self._push(Gate(op, a, b))

    def add(self, a: int, b: int) -> int:
        return self.op("add", a, b)

    def sub(self, a: int, b: int) -> int:
        return self.op("sub", a, b)

    def mul(self, a: int, b: int) -> int:
        return self.op("mul", a, b)

    def div(self, a: int, b: int) -> int:
        return self.op("div", a, b)

    def max(self, a: int, b: int) -> int:
        return self.op("max", a, b)

    def min(self, a: int, b: int) -> int:
        return self.op("min", a, b)

    def sum(self, items: Sequence[int]) -> int:
        if not items:
            return self.const(0)
        acc = items[0]
        for item in items[1:]:
            acc = self.add(acc, item)
        return acc

    def maximum(self, items: Sequence[int]) -> int:
        acc = items[0]
        for item in items[1:]:
            acc = self.max(acc, item)
        return acc

    def scale(self, a: int, q: RationalLike) -> int:
        value = parse_rational(q)
        if value == 1:
            return a
        if value == 0:
            return self.const(0)
        return self.mul(self.const(value), a)

    def product(self, factors: Sequence[int]) -> int:
        key = tuple(factors)
        if not key:
            return self.const(1)
        if key not in self._products:
            acc = key[0]
            for f in key[1:]:
                acc = self.mul(acc, f)
            self._products[key] = acc
        return self._products[key]

    def inline(self, circuit: AlgebraicCircuit, inputs: Sequence[int]) -> list[int]:
        """Copy ``circuit`` into this builder with its inputs bound to ``inputs``."""
        if len(inputs) != circuit.arity:
            raise DimensionMismatch(f"circuit takes {circuit.arity} inputs, got {len(inputs)}")
        mapping: list[int] = []
        for gate in circuit.gates:
            match gate.op:
                case "input":
                    mapping.append(inputs[gate.index])
                case "const":
                    assert gate.value is not None
                    mapping.append(self.const(gate.value))
                case _:
                    mapping.append(self.op(gate.op, mapping[gate.left], mapping[gate.right]))
        return [mapping[o] for o in circuit.outputs]

    def build(self, outputs: Sequence[int]) -> AlgebraicCircuit:
        return AlgebraicCircuit(self.arity, tuple(self._gates), tuple(outputs))


# Text format

_ASSIGN = re.compile(r"^g(\d+)\s*=\s*(.+)$")
_CALL = re.compile(r"^(add|sub|mul|div|max|min)\(\s*([^,\s]+)\s*,\s*([^,\s)]+)\s*\)$")


@dataclass(frozen=True, slots=True)
class ParsedCircuit:
    circuit: AlgebraicCircuit
    domain: DomainSpec | None = None


@dataclass
class _Parser:
    arity: int | None = None
    domain: DomainSpec | None = None
    gates: list[Gate] = field(default_factory=list)
    labels: dict[int, int] = field(default_factory=dict)
    max_input: int = -1

    def ref(self, token: str, line: int) -> int:
        if token.startswith("g"):
            try:
                return self.labels[int(token[1:])]
            except (KeyError, ValueError):
                raise SchemaError(f"line {line}: undefined gate {token}", line=line) from None
        if token.startswith("x"):
            try:
                index = int(token[1:])
            except ValueError:
                raise SchemaError(f"line {line}: bad input reference {token}", line=line) from None
            self.max_input = max(self.max_input, index)
            self.gates.append(Gate("input", index=index))
            return len(self.gates) - 1
        try:
            value = parse_rational(token)
        except ValueError:
            raise SchemaError(f"line {line}: bad reference {token!r}", line=line) from None
        self.gates.append(Gate("const", value=value))
        return len(self.gates) - 1


def parse_circuit(text: str) -> ParsedCircuit:
    p = _Parser()
    outputs: list[int] | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("inputs"):
            try:
                p.arity = int(line.split()[1])
            except (IndexError, ValueError):
                raise SchemaError(f"line {line_no}: expected 'inputs <n>'", line=line_no) from None
            continue
        if line.startswith("domain"):
            p.domain = DomainSpec.parse(line[len("domain") :].strip())
            continue
        if line.startswith("outputs"):
            outputs = [p.ref(tok, line_no) for tok in line.split()[1:]]
            continue
        m = _ASSIGN.match(line)
        if not m:
            raise SchemaError(f"line {line_no}: cannot parse {line!r}", line=line_no)
        label, body = int(m.group(1)), m.group(2).strip()
        if label in p.labels:
            raise SchemaError(f"line {line_no}: g{label} defined twice", line=line_no)
        call = _CALL.match(body)
        if call:
            op = call.group(1)
            left = p.ref(call.group(2), line_no)
            right = p.ref(call.group(3), line_no)
            p.gates.append(Gate(op, left, right))  # type: ignore[arg-type]
            p.labels[label] = len(p.gates) - 1
        else:
            p.labels[label] = p.ref(body, line_no)
    if outputs is None:
        raise SchemaError("circuit has no 'outputs' line")
    arity = p.arity if p.arity is not None else p.max_input + 1
    try:
        circuit = AlgebraicCircuit(arity, tuple(p.gates), tuple(outputs))
    except DimensionMismatch as exc:
        raise SchemaError(str(exc)) from None
    return ParsedCircuit(circuit, p.domain)


def format_circuit(circuit: AlgebraicCircuit, domain: DomainSpec | None = None) -> str:
    lines = [f"inputs {circuit.arity}"]
    if domain is not None:
        lines.append(f"domain {domain}")
    lines.extend(f"g{k} = {gate}" for k, gate in enumerate(circuit.gates))
    lines.append("outputs " + " ".join(f"g{o}" for o in circuit.outputs))
    return "\n".join(lines) + "\n"


# Evaluation


def _apply(op: Op, a: Fraction, b: Fraction, gate: int) -> Fraction:
    match op:
        case "add":
            return a + b
        case "sub":
            return a - b
        case "mul":
            return a * b
        case "div":
            if b == 0:
                raise DivisionByZero(gate)
            return a / b
        case "max":
            return a if a >= b else b
        case "min":
            return a if a <= b else b
    raise ValueError(f"not a binary op: {op}")


def _evaluate(
    circuit: AlgebraicCircuit, x: Sequence[Fraction], selections: list[int] | None = None
) -> list[Fraction]:
    if len(x) != circuit.arity:
        raise DimensionMismatch(f"circuit takes {circuit.arity} inputs, got {len(x)}")
    values: list[Fraction] = []
    for k, gate in enumerate(circuit.gates):
        match gate.op:
            case "input":
                values.append(Fraction(x[gate.index]))
            case "const":
                assert gate.value is not None
                values.append(gate.value)
            case op:
                a, b = values[gate.left], values[gate.right]
                if selections is not None and op in ("max", "min"):
                    selections.append(0 if (a >= b if op == "max" else a <= b) else 1)
                values.append(_apply(op, a, b, k))
    return values


def circuit_eval(circuit: AlgebraicCircuit, x: Sequence[RationalLike]) -> Vector:
    """Exact gate-by-gate evaluation."""
    values = _evaluate(circuit, [parse_rational(v) for v in x])
    return tuple(values[o] for o in circuit.outputs)


def selection_pattern(circuit: AlgebraicCircuit, x: Sequence[RationalLike]) -> tuple[int, ...]:
    """Which operand every max/min gate picks at ``x`` (0 = left, ties go left)."""
    selections: list[int] = []
    _evaluate(circuit, [parse_rational(v) for v in x], selections)
    return tuple(selections)


def is_linear_circuit(circuit: AlgebraicCircuit) -> bool:
    """Only +, -, max, min and multiplication/division by constant subcircuits."""
    constant: list[bool] = []
    for gate in circuit.gates:
        match gate.op:
            case "input":
                constant.append(False)
            case "const":
                constant.append(True)
            case op:
                lc, rc = constant[gate.left], constant[gate.right]
                if op == "mul" and not (lc or rc):
                    return False
                if op == "div" and not rc:
                    return False
                constant.append(lc and rc)
    return True


@dataclass(frozen=True, slots=True)
class Violation:
    point: Vector
    reason: str


@dataclass(frozen=True, slots=True)
class SelfMapReport:
    checked: int
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def validate_self_map(
    circuit: AlgebraicCircuit, domain: DomainSpec, samples: int = 1000, seed: int = 0
) -> SelfMapReport:
    """Sampling check that ``circuit`` maps ``domain`` into itself.

    Evaluates at every domain vertex and at ``samples`` seeded random rational
    points. A pass is evidence, not proof.
    """
    if circuit.arity != domain.dimension or circuit.output_arity != domain.dimension:
        raise DimensionMismatch(
            f"circuit is {circuit.arity}->{circuit.output_arity}, domain dimension {domain.dimension}"
        )
    rng = random.Random(seed)
    points = list(domain.vertices()) + [domain.sample(rng) for _ in range(samples)]
    violations: list[Violation] = []
    for point in points:
        try:
            image = circuit_eval(circuit, point)
        except DivisionByZero as exc:
            violations.append(Violation(point, str(exc)))
            continue
        if reason := domain.contains(image):
            violations.append(Violation(point, reason))
    logger.info(f"validate_self_map: {len(points)} points, {len(violations)} violations")
    return SelfMapReport(len(points), tuple(violations))


# Nash map export


def _gain_gates(b: CircuitBuilder, game: NormalFormGame) -> list[list[tuple[int, int]]]:
    """Per player and strategy: (x_ij input gate, gain g_ij gate)."""
    sizes = game.strategy_counts
    offsets = game.offsets
    result: list[list[tuple[int, int]]] = []
    for i in range(game.players):
        others = [p for p in range(game.players) if p != i]
        deviations: list[int] = []
        for j in range(sizes[i]):
            terms: list[int] = []
            for rest in product(*(range(sizes[p]) for p in others)):
                profile = list(rest)
                profile.insert(i, j)
                u = game.payoff(i, profile)
                if u == 0:
                    continue
                mono = b.product([b.input(offsets[p] + s) for p, s in zip(others, rest)])
                terms.append(b.scale(mono, u))
            deviations.append(b.sum(terms))
        xs = [b.input(offsets[i] + j) for j in range(sizes[i])]
        expected = b.sum([b.mul(x, d) for x, d in zip(xs, deviations)])
        result.append([(x, b.sub(d, expected)) for x, d in zip(xs, deviations)])
    return result


def export_nash_circuit(game: NormalFormGame, variant: NashVariant = "projection") -> AlgebraicCircuit:
    """Circuit for a map on the product of simplexes whose fixed points are the equilibria.

    ``ratio`` is Nash's map ``(x_ij + max(0, g_ij)) / (1 + sum_l max(0, g_il))``.
    ``projection`` (default) is division-free: each block ``x_i + g_i`` is
    projected onto its simplex, ``max(0, y_ij - t_i)`` with
    ``t_i = max over nonempty S of (sum_{j in S} y_ij - 1) / |S|``.
    """
    b = CircuitBuilder(sum(game.strategy_counts))
    zero, one = b.const(0), b.const(1)
    outputs: list[int] = []
    for block in _gain_gates(b, game):
        if variant == "ratio":
            positives = [b.max(zero, g) for _, g in block]
            denom = b.add(one, b.sum(positives))
            outputs.extend(b.div(b.add(x, p), denom) for (x, _), p in zip(block, positives))
            continue
        ys = [b.add(x, g) for x, g in block]
        shifts = [
            b.scale(b.sub(b.sum([ys[j] for j in subset]), one), Fraction(1, size))
            for size in range(1, len(ys) + 1)
            for subset in combinations(range(len(ys)), size)
        ]
        tau = b.maximum(shifts)
        outputs.extend(b.max(zero, b.sub(y, tau)) for y in ys)
    circuit = b.build(outputs)
    logger.info(
        f"export_nash_circuit: {game.players} players, variant={variant}, {len(circuit.gates)} gates"
    )
    return circuit
