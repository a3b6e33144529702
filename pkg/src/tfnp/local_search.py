"""
Local-search instances: Hopfield networks and congestion games.

Both come with a potential that strictly improves on every local move, so
the converge drivers below always terminate given enough steps.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Literal

from .config import DEFAULT_LIMITS
from .core import RationalLike, Vector, parse_rational
from .errors import DimensionMismatch, SizeCapExceeded, StepCapExceeded
from .normal_form import Deviation, NormalFormGame, PureProfile, best_pure_deviation

logger = logging.getLogger(__name__)

Configuration = tuple[int, ...]
HopfieldRule = Literal["first-unstable", "best-improvement", "seeded-random"]
CongestionRule = Literal["first-improving", "best-improving", "seeded-random"]

# Hopfield


@dataclass(frozen=True, slots=True)
class Edge:
    u: int
    v: int
    weight: Fraction


@dataclass(frozen=True, slots=True)
class HopfieldNet:
    nodes: int
    edges: tuple[Edge, ...]
    thresholds: Vector

    def __post_init__(self) -> None:
        if len(self.thresholds) != self.nodes:
            raise DimensionMismatch(f"{self.nodes} nodes but {len(self.thresholds)} thresholds")
        seen: set[frozenset[int]] = set()
        for e in self.edges:
            if not (0 <= e.u < self.nodes and 0 <= e.v < self.nodes):
                raise DimensionMismatch(f"edge ({e.u}, {e.v}) leaves the node range")
            if e.u == e.v:
                raise DimensionMismatch(f"self-loop on node {e.u}")
            pair = frozenset((e.u, e.v))
            if pair in seen:
                raise DimensionMismatch(f"duplicate edge ({e.u}, {e.v})")
            seen.add(pair)

    @classmethod
    def build(
        cls,
        nodes: int,
        edges: Sequence[tuple[int, int, RationalLike]],
        thresholds: Sequence[RationalLike] | None = None,
    ) -> HopfieldNet:
        return cls(
            nodes,
            tuple(Edge(u, v, parse_rational(w)) for u, v, w in edges),
            tuple(parse_rational(t) for t in thresholds) if thresholds is not None else (Fraction(0),) * nodes,
        )

    def adjacency(self) -> list[list[tuple[int, Fraction]]]:
        adj: list[list[tuple[int, Fraction]]] = [[] for _ in range(self.nodes)]
        for e in self.edges:
            adj[e.u].append((e.v, e.weight))
            adj[e.v].append((e.u, e.weight))
        return adj


@dataclass(frozen=True, slots=True)
class Stability:
    stable: bool
    field: Fraction


@dataclass(frozen=True, slots=True)
class Switch:
    node: int
    field: Fraction
    potential_before: Fraction
    potential_after: Fraction


@dataclass(frozen=True, slots=True)
class HopfieldRun:
    configuration: Configuration
    trace: tuple[Switch, ...]


def _check_configuration(net: HopfieldNet, s: Sequence[int]) -> None:
    if len(s) != net.nodes:
        raise DimensionMismatch(f"configuration has {len(s)} states, net has {net.nodes} nodes")
    if any(v not in (1, -1) for v in s):
        raise DimensionMismatch("states must be +1 or -1")


def hopfield_potential(net: HopfieldNet, s: Sequence[int]) -> Fraction:
    _check_configuration(net, s)
    edges = sum((e.weight * s[e.u] * s[e.v] for e in net.edges), Fraction(0))
    return edges + sum((t * v for t, v in zip(net.thresholds, s)), Fraction(0))


def _field(adj: list[list[tuple[int, Fraction]]], net: HopfieldNet, s: Sequence[int], v: int) -> Fraction:
    return sum((w * s[u] for u, w in adj[v]), Fraction(0)) + net.thresholds[v]


def _is_stable(state: int, field: Fraction) -> bool:
    return field >= 0 if state == 1 else field <= 0


def node_stability(net: HopfieldNet, s: Sequence[int], v: int) -> Stability:
    _check_configuration(net, s)
    f = _field(net.adjacency(), net, s, v)
    return Stability(_is_stable(s[v], f), f)


def hopfield_converge(
    net: HopfieldNet,
    s0: Sequence[int],
    rule: HopfieldRule = "first-unstable",
    step_cap: int = DEFAULT_LIMITS.step_cap,
    seed: int = 0,
) -> HopfieldRun:
    """Switch unstable nodes until none is left; each switch raises the potential by ``2|field|``."""
    _check_configuration(net, s0)
    adj = net.adjacency()
    s = list(s0)
    fields = [_field(adj, net, s, v) for v in range(net.nodes)]
    potential = hopfield_potential(net, s)
    rng = random.Random(seed)
    trace: list[Switch] = []
    while True:
        unstable = [v for v in range(net.nodes) if not _is_stable(s[v], fields[v])]
        if not unstable:
            break
        if len(trace) >= step_cap:
            raise StepCapExceeded(
                f"hopfield_converge: {step_cap} switches without reaching a stable configuration",
                partial=HopfieldRun(tuple(s), tuple(trace)),
            )
        match rule:
            case "first-unstable":
                v = unstable[0]
            case "best-improvement":
                v = max(unstable, key=lambda u: (abs(fields[u]), -u))
            case "seeded-random":
                v = rng.choice(unstable)
            case _:
                raise ValueError(f"unknown rule {rule!r}")
        f = fields[v]
        after = potential + 2 * abs(f)
        s[v] = -s[v]
        for u, w in adj[v]:
            fields[u] += 2 * w * s[v]
        trace.append(Switch(v, f, potential, after))
        logger.debug(f"hopfield_converge: switch node {v}, field {f}, potential {after}")
        potential = after
    logger.info(f"hopfield_converge: stable after {len(trace)} switches ({rule})")
    return HopfieldRun(tuple(s), tuple(trace))


def _configuration(profile: Sequence[int]) -> Configuration:
    # strategy 0 is state +1, strategy 1 is state -1
    return tuple(1 if c == 0 else -1 for c in profile)


def configuration_profile(s: Sequence[int]) -> PureProfile:
    return tuple(0 if v == 1 else 1 for v in s)


def stable_configurations(net: HopfieldNet) -> list[Configuration]:
    adj = net.adjacency()
    found = []
    for profile in product((0, 1), repeat=net.nodes):
        s = _configuration(profile)
        if all(_is_stable(s[v], _field(adj, net, s, v)) for v in range(net.nodes)):
            found.append(s)
    return found


def hopfield_to_game(net: HopfieldNet, cap: int = DEFAULT_LIMITS.hopfield_game_cap) -> NormalFormGame:
    """Each node is a player paid 1 when stable; pure equilibria are the stable configurations."""
    if net.nodes > cap:
        raise SizeCapExceeded(f"{net.nodes} nodes exceeds the game tensor cap {cap}")
    adj = net.adjacency()

    def payoff(i: int, profile: PureProfile) -> int:
        s = _configuration(profile)
        return int(_is_stable(s[i], _field(adj, net, s, i)))

    return NormalFormGame.from_function((2,) * net.nodes, payoff)


# Congestion


@dataclass(frozen=True, slots=True)
class CongestionGame:
    """``costs[r][j]`` is the cost of resource r when j players use it (index 0 unused)."""

    resources: tuple[str, ...]
    strategies: tuple[tuple[tuple[int, ...], ...], ...]
    costs: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.strategies)
        if k < 1:
            raise DimensionMismatch("a congestion game needs at least one player")
        if len(self.costs) != len(self.resources):
            raise DimensionMismatch("one cost table per resource is required")
        if any(len(c) != k + 1 for c in self.costs):
            raise DimensionMismatch(f"cost tables must cover 0..{k} users")
        for i, family in enumerate(self.strategies):
            if not family:
                raise DimensionMismatch(f"player {i} has no strategies")
            for strategy in family:
                if any(not 0 <= r < len(self.resources) for r in strategy):
                    raise DimensionMismatch(f"player {i} uses an unknown resource")

    @classmethod
    def build(
        cls,
        strategies: Sequence[Sequence[Sequence[str]]],
        costs: Mapping[str, Sequence[int]],
    ) -> CongestionGame:
        """Cost tables may omit the zero-user entry."""
        resources = tuple(costs)
        index = {r: n for n, r in enumerate(resources)}
        k = len(strategies)
        tables = []
        for r in resources:
            table = list(costs[r])
            if len(table) == k:
                table = [0, *table]
            tables.append(tuple(int(c) for c in table))
        try:
            families = tuple(
                tuple(tuple(sorted({index[r] for r in strategy})) for strategy in family)
                for family in strategies
            )
        except KeyError as exc:
            raise DimensionMismatch(f"unknown resource {exc.args[0]!r}") from None
        return cls(resources, families, tuple(tables))

    @property
    def players(self) -> int:
        return len(self.strategies)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.strategies)

    def profiles(self) -> Iterator[PureProfile]:
        return product(*(range(c) for c in self.strategy_counts))

    def usage(self, s: Sequence[int]) -> list[int]:
        self.check_profile(s)
        counts = [0] * len(self.resources)
        for i, choice in enumerate(s):
            for r in self.strategies[i][choice]:
                counts[r] += 1
        return counts

    def check_profile(self, s: Sequence[int]) -> None:
        if len(s) != self.players:
            raise DimensionMismatch(f"profile has {len(s)} entries, game has {self.players} players")
        for i, choice in enumerate(s):
            if not 0 <= choice < len(self.strategies[i]):
                raise DimensionMismatch(f"player {i} has no strategy {choice}")


@dataclass(frozen=True, slots=True)
class Move:
    player: int
    old: int
    new: int
    cost_before: int
    cost_after: int
    potential_before: int
    potential_after: int


@dataclass(frozen=True, slots=True)
class CongestionRun:
    profile: PureProfile
    trace: tuple[Move, ...]


@dataclass(frozen=True, slots=True)
class PureNashCheck:
    holds: bool
    best_deviation: Deviation | None


def congestion_cost(g: CongestionGame, s: Sequence[int], i: int) -> int:
    usage = g.usage(s)
    return sum(g.costs[r][usage[r]] for r in g.strategies[i][s[i]])


def rosenthal_potential(g: CongestionGame, s: Sequence[int]) -> int:
    usage = g.usage(s)
    return sum(sum(g.costs[r][1 : n + 1]) for r, n in enumerate(usage))


def _switch_cost(g: CongestionGame, usage: Sequence[int], old: tuple[int, ...], new: tuple[int, ...]) -> int:
    old_set = set(old)
    return sum(g.costs[r][usage[r] + (0 if r in old_set else 1)] for r in new)


def _improving_moves(g: CongestionGame, s: Sequence[int]) -> list[tuple[int, int, int]]:
    """(player, strategy, improvement) for every strictly improving unilateral switch."""
    usage = g.usage(s)
    moves = []
    for i, choice in enumerate(s):
        current = g.strategies[i][choice]
        here = sum(g.costs[r][usage[r]] for r in current)
        for j, candidate in enumerate(g.strategies[i]):
            if j == choice:
                continue
            improvement = here - _switch_cost(g, usage, current, candidate)
            if improvement > 0:
                moves.append((i, j, improvement))
    return moves


def congestion_converge(
    g: CongestionGame,
    s0: Sequence[int],
    rule: CongestionRule = "first-improving",
    step_cap: int = DEFAULT_LIMITS.step_cap,
    seed: int = 0,
) -> CongestionRun:
    s = list(s0)
    g.check_profile(s)
    rng = random.Random(seed)
    trace: list[Move] = []
    potential = rosenthal_potential(g, s)
    while moves := _improving_moves(g, s):
        if len(trace) >= step_cap:
            raise StepCapExceeded(
                f"congestion_converge: {step_cap} moves without reaching an equilibrium",
                partial=CongestionRun(tuple(s), tuple(trace)),
            )
        match rule:
            case "first-improving":
                i, j, _ = moves[0]
            case "best-improving":
                i, j, _ = max(moves, key=lambda m: (m[2], -m[0], -m[1]))
            case "seeded-random":
                i, j, _ = rng.choice(moves)
            case _:
                raise ValueError(f"unknown rule {rule!r}")
        before = congestion_cost(g, s, i)
        old = s[i]
        s[i] = j
        after_potential = rosenthal_potential(g, s)
        trace.append(Move(i, old, j, before, congestion_cost(g, s, i), potential, after_potential))
        logger.debug(f"congestion_converge: player {i} {old} -> {j}, potential {after_potential}")
        potential = after_potential
    logger.info(f"congestion_converge: equilibrium after {len(trace)} moves ({rule})")
    return CongestionRun(tuple(s), tuple(trace))


def pure_nash_check(g: CongestionGame | NormalFormGame, s: Sequence[int]) -> PureNashCheck:
    if isinstance(g, NormalFormGame):
        deviation = best_pure_deviation(g, s)
        return PureNashCheck(deviation is None, deviation)
    moves = _improving_moves(g, s)
    if not moves:
        return PureNashCheck(True, None)
    i, j, improvement = max(moves, key=lambda m: (m[2], -m[0], -m[1]))
    return PureNashCheck(False, Deviation(i, j, Fraction(improvement)))


def congestion_pure_equilibria(g: CongestionGame) -> list[PureProfile]:
    return [p for p in g.profiles() if not _improving_moves(g, p)]
