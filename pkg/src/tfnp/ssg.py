"""
Simple stochastic games: exact values and optimal positional strategies.

Player 1 owns the max nodes and wants to reach the 1-sink, player 2 owns the
min nodes. Both solve methods end in :func:`certify_ssg`; nothing uncertified
is returned.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Literal

from .config import DEFAULT_LIMITS
from .core import RationalLike, RationalMatrix, Vector, parse_rational, rational_reconstruct, solve_linear_system
from .errors import CertificationFailed, DimensionMismatch, SizeCapExceeded, StepCapExceeded
from .lp import LinearProgram, Relation, lp_optimize

logger = logging.getLogger(__name__)

NodeKind = Literal["max", "min", "random", "sink1", "sink2"]
SSGMethod = Literal["strategy-improvement", "discounted"]
Strategy = dict[int, int]

DISCOUNT_RETRIES = 3


@dataclass(frozen=True, slots=True)
class SSGNode:
    kind: NodeKind
    successors: tuple[int, ...] = ()
    probabilities: tuple[Fraction, ...] = ()


@dataclass(frozen=True, slots=True)
class SimpleStochasticGame:
    nodes: tuple[SSGNode, ...]

    def __post_init__(self) -> None:
        n = len(self.nodes)
        for u, node in enumerate(self.nodes):
            if any(not 0 <= w < n for w in node.successors):
                raise DimensionMismatch(f"node {u} has a successor outside 0..{n - 1}")
            if node.kind in ("sink1", "sink2"):
                if node.successors:
                    raise DimensionMismatch(f"sink {u} must not have successors")
                continue
            if not node.successors:
                raise DimensionMismatch(f"node {u} needs at least one successor")
            if node.kind == "random":
                if len(node.probabilities) != len(node.successors):
                    raise DimensionMismatch(f"random node {u} needs one probability per successor")
                if any(p < 0 for p in node.probabilities) or sum(node.probabilities) != 1:
                    raise DimensionMismatch(
                        f"random node {u} probabilities sum to {sum(node.probabilities)}, expected 1"
                    )

    @classmethod
    def build(cls, nodes: Sequence[Sequence[Any]]) -> SimpleStochasticGame:
        """Each node is ``(kind, successors)`` or ``(kind, successors, probabilities)``."""
        out = []
        for spec in nodes:
            kind, succ = spec[0], tuple(spec[1])
            probs = tuple(parse_rational(p) for p in spec[2]) if len(spec) > 2 else ()
            out.append(SSGNode(kind, succ, probs))
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.nodes)

    def owned(self, kind: NodeKind) -> list[int]:
        return [u for u, node in enumerate(self.nodes) if node.kind == kind]

    def bit_size(self) -> int:
        """Total bits of ``(outdegree + 1) * lcm(denominators)`` over random nodes."""
        total = 0
        for node in self.nodes:
            if node.kind == "random":
                lcm = math.lcm(*(p.denominator for p in node.probabilities))
                total += ((len(node.successors) + 1) * lcm).bit_length()
        return max(total, 1)


@dataclass(frozen=True, slots=True)
class SSGSolution:
    values: Vector
    max_strategy: Strategy
    min_strategy: Strategy
    method: SSGMethod
    iterations: int
    beta: Fraction | None = None


def _check_vector(g: SimpleStochasticGame, x: Sequence[Fraction]) -> None:
    if len(x) != len(g):
        raise DimensionMismatch(f"vector has {len(x)} entries, game has {len(g)} nodes")


def ssg_operator(g: SimpleStochasticGame, x: Sequence[RationalLike]) -> Vector:
    xs = [parse_rational(v) for v in x]
    _check_vector(g, xs)
    out = []
    for node in g.nodes:
        match node.kind:
            case "sink1":
                out.append(Fraction(1))
            case "sink2":
                out.append(Fraction(0))
            case "random":
                out.append(sum((p * xs[w] for p, w in zip(node.probabilities, node.successors)), Fraction(0)))
            case "max":
                out.append(max(xs[w] for w in node.successors))
            case "min":
                out.append(min(xs[w] for w in node.successors))
    return tuple(out)


def _chain(g: SimpleStochasticGame, s1: Mapping[int, int], s2: Mapping[int, int]) -> list[list[tuple[int, Fraction]]]:
    moves: list[list[tuple[int, Fraction]]] = []
    for u, node in enumerate(g.nodes):
        match node.kind:
            case "max":
                moves.append([(s1[u], Fraction(1))])
            case "min":
                moves.append([(s2[u], Fraction(1))])
            case "random":
                moves.append([(w, p) for w, p in zip(node.successors, node.probabilities) if p])
            case _:
                moves.append([])
    return moves


def ssg_absorption(g: SimpleStochasticGame, s1: Mapping[int, int], s2: Mapping[int, int]) -> Vector:
    """Probability of reaching a 1-sink from every node in the Markov chain fixed by both strategies.

    Solved exactly on the nodes that can reach a 1-sink; every other node gets 0.
    """
    moves = _chain(g, s1, s2)
    n = len(g)
    reach = set(g.owned("sink1"))
    changed = True
    while changed:
        changed = False
        for u in range(n):
            if u not in reach and any(w in reach for w, _ in moves[u]):
                reach.add(u)
                changed = True
    unknowns = [u for u in sorted(reach) if g.nodes[u].kind != "sink1"]
    index = {u: k for k, u in enumerate(unknowns)}
    values = [Fraction(0)] * n
    for u in g.owned("sink1"):
        values[u] = Fraction(1)
    if unknowns:
        rows, rhs = [], []
        for u in unknowns:
            row = [Fraction(0)] * len(unknowns)
            row[index[u]] += 1
            b = Fraction(0)
            for w, p in moves[u]:
                if w in index:
                    row[index[w]] -= p
                elif g.nodes[w].kind == "sink1":
                    b += p
            rows.append(row)
            rhs.append(b)
        for u, v in zip(unknowns, solve_linear_system(RationalMatrix.from_rows(rows), rhs)):
            values[u] = v
    return tuple(values)


def _zero_set(g: SimpleStochasticGame, s1: Mapping[int, int] | None) -> set[int]:
    """Largest node set avoiding 1-sinks where player 2 can stay forever."""
    zero = {u for u, node in enumerate(g.nodes) if node.kind != "sink1"}
    changed = True
    while changed:
        changed = False
        for u in list(zero):
            node = g.nodes[u]
            if node.kind == "min":
                ok = any(w in zero for w in node.successors)
            elif node.kind == "max" and s1 is not None:
                ok = s1[u] in zero
            elif node.kind == "random":
                ok = all(w in zero for w, p in zip(node.successors, node.probabilities) if p)
            else:
                ok = all(w in zero for w in node.successors)
            if not ok:
                zero.discard(u)
                changed = True
    return zero


def _min_response(
    g: SimpleStochasticGame, s1: Mapping[int, int], discount: Fraction = Fraction(1)
) -> tuple[Vector, Strategy]:
    """Player 2's optimal values against ``s1`` via LP: maximise sum(v) under the Bellman inequalities."""
    n = len(g)
    zero = _zero_set(g, s1) if discount == 1 else set()
    rows: list[list[Fraction]] = []
    rels: list[Relation] = []
    rhs: list[Fraction] = []

    def add(coeffs: Sequence[tuple[int, Fraction]], rel: Relation, b: Fraction) -> None:
        row = [Fraction(0)] * n
        for k, c in coeffs:
            row[k] += c
        rows.append(row)
        rels.append(rel)
        rhs.append(b)

    for u, node in enumerate(g.nodes):
        add([(u, Fraction(1))], "<=", Fraction(1))
        if node.kind == "sink1":
            add([(u, Fraction(1))], "=", Fraction(1))
        elif node.kind == "sink2" or u in zero:
            add([(u, Fraction(1))], "=", Fraction(0))
        elif node.kind == "max":
            add([(u, Fraction(1)), (s1[u], -discount)], "=", Fraction(0))
        elif node.kind == "random":
            coeffs = [(u, Fraction(1))]
            coeffs += [(w, -discount * p) for w, p in zip(node.successors, node.probabilities)]
            add(coeffs, "=", Fraction(0))
        else:
            for w in node.successors:
                add([(u, Fraction(1)), (w, -discount)], "<=", Fraction(0))
    lp = LinearProgram.build([1] * n, rows, rels, rhs, sense="max")
    values = lp_optimize(lp).solution
    s2 = {u: min(g.nodes[u].successors, key=lambda w: values[w]) for u in g.owned("min")}
    return values, s2


def _strategy_iteration(
    g: SimpleStochasticGame, discount: Fraction, step_cap: int
) -> tuple[Vector, Strategy, Strategy, int]:
    """Hoffman-Karp: switch every max node with a strictly better successor, re-solve player 2."""
    s1 = {u: g.nodes[u].successors[0] for u in g.owned("max")}
    steps = 0
    while True:
        values, s2 = _min_response(g, s1, discount)
        switches = {}
        for u in s1:
            best = max(g.nodes[u].successors, key=lambda w: values[w])
            if values[best] > values[s1[u]]:
                switches[u] = best
        if not switches:
            return values, s1, s2, steps
        steps += 1
        if steps > step_cap:
            raise StepCapExceeded(f"strategy improvement exceeded {step_cap} rounds", partial=s1)
        logger.debug(f"ssg strategy improvement: round {steps}, switching {sorted(switches)}")
        s1.update(switches)


def certify_ssg(
    g: SimpleStochasticGame,
    values: Sequence[Fraction],
    s1: Mapping[int, int],
    s2: Mapping[int, int],
) -> bool:
    """Exact check of local equations, induced absorption, and single-node switches."""
    if len(values) != len(g):
        return False
    if set(s1) != set(g.owned("max")) or set(s2) != set(g.owned("min")):
        return False
    for u, w in (*s1.items(), *s2.items()):
        if w not in g.nodes[u].successors:
            return False
    if tuple(values) != ssg_operator(g, values):
        logger.info("certify_ssg: local equations fail")
        return False
    if ssg_absorption(g, s1, s2) != tuple(values):
        logger.info("certify_ssg: absorption probabilities differ from the claimed values")
        return False
    for u in s1:
        for w in g.nodes[u].successors:
            trial = ssg_absorption(g, {**s1, u: w}, s2)
            if any(a > b for a, b in zip(trial, values)):
                logger.info(f"certify_ssg: max node {u} improves by switching to {w}")
                return False
    for u in s2:
        for w in g.nodes[u].successors:
            trial = ssg_absorption(g, s1, {**s2, u: w})
            if any(a < b for a, b in zip(trial, values)):
                logger.info(f"certify_ssg: min node {u} improves by switching to {w}")
                return False
    return True


def ssg_solve(
    g: SimpleStochasticGame,
    method: SSGMethod = "strategy-improvement",
    beta: RationalLike | None = None,
    step_cap: int = DEFAULT_LIMITS.step_cap,
) -> SSGSolution:
    if method not in ("strategy-improvement", "discounted"):
        raise ValueError(f"unknown ssg method {method!r}")
    if method == "strategy-improvement":
        values, s1, s2, steps = _strategy_iteration(g, Fraction(1), step_cap)
        if not certify_ssg(g, values, s1, s2):
            raise CertificationFailed("strategy improvement result failed certification")
        logger.info(f"ssg_solve: strategy improvement finished after {steps} rounds")
        return SSGSolution(values, s1, s2, method, steps)

    bits = g.bit_size()
    b = parse_rational(beta) if beta is not None else Fraction(1, 1 << (4 * bits))
    bound = 1 << (2 * bits)
    for attempt in range(DISCOUNT_RETRIES + 1):
        discounted, s1, s2, steps = _strategy_iteration(g, 1 - b, step_cap)
        values = tuple(rational_reconstruct(v, bound) for v in discounted)
        if certify_ssg(g, values, s1, s2):
            logger.info(f"ssg_solve: discounted mode certified with beta = 2^-{b.denominator.bit_length() - 1}")
            return SSGSolution(values, s1, s2, method, steps, beta=b)
        logger.warning(f"ssg_solve: certification failed at beta {b}, retrying with beta^2")
        b = b * b
    raise CertificationFailed(f"discounted mode failed certification after {DISCOUNT_RETRIES} retries")


def ssg_decision(
    g: SimpleStochasticGame,
    node: int,
    threshold: RationalLike,
    solution: SSGSolution | None = None,
) -> bool:
    solved = solution or ssg_solve(g)
    return solved.values[node] >= parse_rational(threshold)


def positional_strategies(
    g: SimpleStochasticGame, kind: NodeKind
) -> Iterator[Strategy]:
    owned = g.owned(kind)
    for choice in product(*(g.nodes[u].successors for u in owned)):
        yield dict(zip(owned, choice))


def brute_force_ssg(g: SimpleStochasticGame, cap: int = DEFAULT_LIMITS.brute_force_cap) -> Vector:
    """Per-node max over player 1 strategies of the min over player 2 strategies."""
    pairs = math.prod(len(g.nodes[u].successors) for u in g.owned("max") + g.owned("min"))
    if pairs > cap:
        raise SizeCapExceeded(f"{pairs} strategy pairs exceed the brute-force cap {cap}")
    best: list[Fraction] | None = None
    for s1 in positional_strategies(g, "max"):
        worst: list[Fraction] | None = None
        for s2 in positional_strategies(g, "min"):
            values = ssg_absorption(g, s1, s2)
            worst = list(values) if worst is None else [min(a, b) for a, b in zip(worst, values)]
        assert worst is not None
        best = worst if best is None else [max(a, b) for a, b in zip(best, worst)]
    assert best is not None
    return tuple(best)
