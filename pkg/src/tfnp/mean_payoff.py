"""
Mean-payoff and parity games.

Values come from finite-horizon value iteration (``4 n^3 W`` rounds, then
rounding to the nearest fraction with denominator at most ``n``) or from
strategy iteration on a discounted game close enough to 1. Strategies are
certified by exact minimum/maximum cycle means in each one-player subgame.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Literal

from .config import DEFAULT_LIMITS
from .core import RationalLike, RationalMatrix, Vector, parse_rational, rational_reconstruct, solve_linear_system
from .errors import CertificationFailed, DimensionMismatch, SizeCapExceeded, StepCapExceeded
from .ssg import SimpleStochasticGame, brute_force_ssg

logger = logging.getLogger(__name__)

MPGMethod = Literal["value-iteration", "strategy-iteration"]
Strategy = dict[int, int]
Owner = Literal[1, 2]

DISCOUNT_RETRIES = 3


@dataclass(frozen=True, slots=True)
class GraphEdge:
    target: int
    reward: int = 0


@dataclass(frozen=True, slots=True)
class MeanPayoffGame:
    """Player 1 maximises, player 2 minimises the limiting average reward."""

    owners: tuple[Owner, ...]
    edges: tuple[tuple[GraphEdge, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.owners)
        if n == 0 or len(self.edges) != n:
            raise DimensionMismatch("one owner and one edge list per node are required")
        for u, out in enumerate(self.edges):
            if self.owners[u] not in (1, 2):
                raise DimensionMismatch(f"node {u} owner must be 1 or 2")
            if not out:
                raise DimensionMismatch(f"node {u} needs at least one outgoing edge")
            if any(not 0 <= e.target < n for e in out):
                raise DimensionMismatch(f"node {u} has an edge outside 0..{n - 1}")

    @classmethod
    def build(cls, owners: Sequence[int], edges: Sequence[Sequence[tuple[int, int]]]) -> MeanPayoffGame:
        return cls(
            tuple(owners),  # type: ignore[arg-type]
            tuple(tuple(GraphEdge(t, int(r)) for t, r in out) for out in edges),
        )

    def __len__(self) -> int:
        return len(self.owners)

    @property
    def max_reward(self) -> int:
        return max(abs(e.reward) for out in self.edges for e in out)

    def owned(self, player: int) -> list[int]:
        return [u for u, o in enumerate(self.owners) if o == player]


@dataclass(frozen=True, slots=True)
class ParityGame:
    """Player 1 wins a play when the largest label seen infinitely often is odd."""

    owners: tuple[Owner, ...]
    successors: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.owners)
        if n == 0 or len(self.successors) != n or len(self.labels) != n:
            raise DimensionMismatch("owners, successors and labels must cover every node")
        for u, out in enumerate(self.successors):
            if self.owners[u] not in (1, 2):
                raise DimensionMismatch(f"node {u} owner must be 1 or 2")
            if not out or any(not 0 <= w < n for w in out):
                raise DimensionMismatch(f"node {u} needs successors inside 0..{n - 1}")
            if self.labels[u] < 1:
                raise DimensionMismatch(f"node {u} label must be a positive integer")

    def __len__(self) -> int:
        return len(self.owners)

    def owned(self, player: int) -> list[int]:
        return [u for u, o in enumerate(self.owners) if o == player]


@dataclass(frozen=True, slots=True)
class MPGSolution:
    values: Vector
    max_strategy: Strategy
    min_strategy: Strategy
    method: MPGMethod
    horizon: int
    discount: Fraction


# Cycle means


def _sccs(n: int, adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if root in index:
            continue
        work: list[tuple[int, Iterator[int]]] = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            u, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[u] = min(low[u], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == u:
                        break
                out.append(comp)
    return out


def _min_cycle_mean(nodes: Sequence[int], edges: Sequence[Sequence[GraphEdge]]) -> Fraction | None:
    """Karp's minimum cycle mean inside one strongly connected component."""
    members = set(nodes)
    k = len(nodes)
    source = nodes[0]
    inf = None
    D: list[dict[int, int | None]] = [{v: inf for v in nodes}]
    D[0][source] = 0
    for t in range(1, k + 1):
        row: dict[int, int | None] = {v: inf for v in nodes}
        for u in nodes:
            du = D[t - 1][u]
            if du is None:
                continue
            for e in edges[u]:
                if e.target in members:
                    cand = du + e.reward
                    cur = row[e.target]
                    if cur is None or cand < cur:
                        row[e.target] = cand
        D.append(row)
    best: Fraction | None = None
    for v in nodes:
        dk = D[k][v]
        if dk is None:
            continue
        worst = max(
            Fraction(dk - dt, k - t) for t in range(k) if (dt := D[t][v]) is not None
        )
        if best is None or worst < best:
            best = worst
    return best


def _one_player_values(
    g: MeanPayoffGame, fixed: Mapping[int, int], minimise: bool
) -> Vector:
    """Best cycle mean reachable from each node when the other player's choices are ``fixed``."""
    n = len(g)
    sign = 1 if minimise else -1
    edges: list[list[GraphEdge]] = []
    for u in range(n):
        chosen = list(g.edges[u])
        if u in fixed:
            parallel = [e for e in chosen if e.target == fixed[u]]
            pick = max if g.owners[u] == 1 else min
            chosen = [pick(parallel, key=lambda e: e.reward)]
        edges.append([GraphEdge(e.target, sign * e.reward) for e in chosen])
    adj = [[e.target for e in out] for out in edges]
    comps = _sccs(n, adj)
    comp_of = {v: c for c, comp in enumerate(comps) for v in comp}
    # Tarjan emits components in reverse topological order
    best: list[Fraction | None] = [None] * len(comps)
    for c, comp in enumerate(comps):
        cyclic = len(comp) > 1 or any(e.target == comp[0] for e in edges[comp[0]])
        here = _min_cycle_mean(comp, edges) if cyclic else None
        for v in comp:
            for e in edges[v]:
                d = comp_of[e.target]
                if d != c and best[d] is not None and (here is None or best[d] < here):
                    here = best[d]
        best[c] = here
    values = []
    for v in range(n):
        b = best[comp_of[v]]
        assert b is not None, "every node reaches a cycle"
        values.append(sign * b)
    return tuple(values)


def certify_mpg(g: MeanPayoffGame, values: Sequence[Fraction], s1: Mapping[int, int], s2: Mapping[int, int]) -> bool:
    """``s1`` guarantees at least ``values`` and ``s2`` at most ``values`` against every reply."""
    return (
        _one_player_values(g, s1, minimise=True) == tuple(values)
        and _one_player_values(g, s2, minimise=False) == tuple(values)
    )


# Solvers


def _zp_values(g: MeanPayoffGame) -> tuple[Vector, int]:
    n = len(g)
    k = 4 * n**3 * max(g.max_reward, 1)
    v = [0] * n
    for _ in range(k):
        v = [
            (max if g.owners[u] == 1 else min)(e.reward + v[e.target] for e in g.edges[u])
            for u in range(n)
        ]
    return tuple(rational_reconstruct(Fraction(x, k), n) for x in v), k


def _evaluate(g: MeanPayoffGame, choice: Mapping[int, GraphEdge], discount: Fraction) -> Vector:
    n = len(g)
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rhs = []
    for u in range(n):
        e = choice[u]
        rows[u][e.target] -= discount
        rhs.append(Fraction(e.reward))
    return solve_linear_system(RationalMatrix.from_rows(rows), rhs)


def _discounted_strategies(
    g: MeanPayoffGame, discount: Fraction, step_cap: int
) -> tuple[Strategy, Strategy]:
    """Nested policy iteration: player 2 best-responds exactly inside every player 1 round."""
    choice = {u: g.edges[u][0] for u in range(len(g))}
    rounds = 0
    while True:
        while True:
            values = _evaluate(g, choice, discount)
            switched = False
            for u in g.owned(2):
                best = min(g.edges[u], key=lambda e: e.reward + discount * values[e.target])
                if best.reward + discount * values[best.target] < choice[u].reward + discount * values[choice[u].target]:
                    choice[u] = best
                    switched = True
            if not switched:
                break
        switched = False
        for u in g.owned(1):
            best = max(g.edges[u], key=lambda e: e.reward + discount * values[e.target])
            if best.reward + discount * values[best.target] > choice[u].reward + discount * values[choice[u].target]:
                choice[u] = best
                switched = True
        if not switched:
            break
        rounds += 1
        if rounds > step_cap:
            raise StepCapExceeded(f"discounted strategy iteration exceeded {step_cap} rounds")
    s1 = {u: choice[u].target for u in g.owned(1)}
    s2 = {u: choice[u].target for u in g.owned(2)}
    return s1, s2


def mpg_solve(
    g: MeanPayoffGame,
    method: MPGMethod = "value-iteration",
    step_cap: int = DEFAULT_LIMITS.step_cap,
) -> MPGSolution:
    if method not in ("value-iteration", "strategy-iteration"):
        raise ValueError(f"unknown mpg method {method!r}")
    n = len(g)
    gap = Fraction(1, 4 * n**3 * max(g.max_reward, 1))
    horizon = 0
    zp: Vector | None = None
    if method == "value-iteration":
        zp, horizon = _zp_values(g)
    for attempt in range(DISCOUNT_RETRIES + 1):
        discount = 1 - gap
        s1, s2 = _discounted_strategies(g, discount, step_cap)
        values = zp if zp is not None else _one_player_values(g, s1, minimise=True)
        if certify_mpg(g, values, s1, s2):
            logger.info(f"mpg_solve: {n} nodes certified ({method}, discount 1 - {gap})")
            return MPGSolution(values, s1, s2, method, horizon, discount)
        logger.warning(f"mpg_solve: certification failed at discount 1 - {gap}, moving closer to 1")
        gap = gap * gap
    raise CertificationFailed("mean-payoff strategies failed cycle-mean certification")


def mpg_decision(
    g: MeanPayoffGame, node: int, threshold: RationalLike, solution: MPGSolution | None = None
) -> bool:
    solved = solution or mpg_solve(g)
    return solved.values[node] >= parse_rational(threshold)


# Parity


def parity_to_mpg(g: ParityGame, label_cap: int = DEFAULT_LIMITS.label_cap) -> MeanPayoffGame:
    """Edges out of v earn ``+N^l(v)`` for odd labels and ``-N^l(v)`` for even ones, ``N = n + 1``."""
    top = max(g.labels)
    if top > label_cap:
        raise SizeCapExceeded(f"label {top} exceeds the reduction cap {label_cap}")
    N = len(g) + 1
    rewards = [N**l if l % 2 else -(N**l) for l in g.labels]
    return MeanPayoffGame(
        g.owners,
        tuple(tuple(GraphEdge(w, rewards[u]) for w in out) for u, out in enumerate(g.successors)),
    )


@dataclass(frozen=True, slots=True)
class ParitySolution:
    winners: tuple[int, ...]
    max_strategy: Strategy
    min_strategy: Strategy


@dataclass(frozen=True, slots=True)
class ParityResult:
    winner: int
    strategy: Strategy


def parity_solve(g: ParityGame, label_cap: int = DEFAULT_LIMITS.label_cap) -> ParitySolution:
    """Strategy iteration on the reduced game; value-iteration horizons grow like ``N^l``."""
    solved = mpg_solve(parity_to_mpg(g, label_cap), method="strategy-iteration")
    winners = tuple(1 if v > 0 else 2 for v in solved.values)
    return ParitySolution(winners, solved.max_strategy, solved.min_strategy)


def certify_parity(
    g: ParityGame,
    winners: Sequence[int],
    s1: Mapping[int, int],
    s2: Mapping[int, int],
    label_cap: int = DEFAULT_LIMITS.label_cap,
) -> bool:
    """``s1`` wins every node claimed by player 1 and ``s2`` every node claimed by player 2."""
    if len(winners) != len(g):
        return False
    if set(s1) != set(g.owned(1)) or set(s2) != set(g.owned(2)):
        return False
    if any(w not in g.successors[u] for u, w in (*s1.items(), *s2.items())):
        return False
    reduced = parity_to_mpg(g, label_cap)
    lower = _one_player_values(reduced, s1, minimise=True)
    upper = _one_player_values(reduced, s2, minimise=False)
    return all((lower[v] > 0) if w == 1 else (upper[v] < 0) for v, w in enumerate(winners))


def parity_winner(g: ParityGame, v: int, label_cap: int = DEFAULT_LIMITS.label_cap) -> ParityResult:
    solved = parity_solve(g, label_cap)
    winner = solved.winners[v]
    return ParityResult(winner, solved.max_strategy if winner == 1 else solved.min_strategy)


# Brute force


def _strategies(successors: Sequence[Sequence[int]], owned: Sequence[int]) -> Iterator[Strategy]:
    for choice in product(*(successors[u] for u in owned)):
        yield dict(zip(owned, choice))


def _lasso(start: int, step: Mapping[int, int]) -> list[int]:
    """The cycle a deterministic play from ``start`` ends in."""
    seen: dict[int, int] = {}
    path: list[int] = []
    u = start
    while u not in seen:
        seen[u] = len(path)
        path.append(u)
        u = step[u]
    return path[seen[u] :]


def _check_cap(successors: Sequence[Sequence[int]], cap: int) -> None:
    pairs = math.prod(len(s) for s in successors)
    if pairs > cap:
        raise SizeCapExceeded(f"{pairs} strategy pairs exceed the brute-force cap {cap}")


def _max_min(
    successors: Sequence[Sequence[int]],
    owners: Sequence[int],
    score: Callable[[list[int]], Fraction],
) -> list[Fraction]:
    n = len(owners)
    ones = [u for u in range(n) if owners[u] == 1]
    twos = [u for u in range(n) if owners[u] == 2]
    best: list[Fraction] | None = None
    for s1 in _strategies(successors, ones):
        worst: list[Fraction] | None = None
        for s2 in _strategies(successors, twos):
            step = {**s1, **s2}
            values = [score(_lasso(u, step)) for u in range(n)]
            worst = values if worst is None else [min(a, b) for a, b in zip(worst, values)]
        assert worst is not None
        best = worst if best is None else [max(a, b) for a, b in zip(best, worst)]
    assert best is not None
    return best


def brute_force_mpg(g: MeanPayoffGame, cap: int = DEFAULT_LIMITS.brute_force_cap) -> Vector:
    successors = [[e.target for e in out] for out in g.edges]
    _check_cap(successors, cap)
    # parallel edges: keep the one each owner prefers
    reward: dict[tuple[int, int], int] = {}
    for u, out in enumerate(g.edges):
        pick = max if g.owners[u] == 1 else min
        for e in out:
            key = (u, e.target)
            reward[key] = pick(reward[key], e.reward) if key in reward else e.reward

    def mean(cycle: list[int]) -> Fraction:
        total = sum(reward[(a, cycle[(i + 1) % len(cycle)])] for i, a in enumerate(cycle))
        return Fraction(total, len(cycle))

    return tuple(_max_min([sorted(set(s)) for s in successors], g.owners, mean))


def brute_force_parity(g: ParityGame, cap: int = DEFAULT_LIMITS.brute_force_cap) -> tuple[int, ...]:
    _check_cap(g.successors, cap)

    def odd_wins(cycle: list[int]) -> Fraction:
        return Fraction(max(g.labels[u] for u in cycle) % 2)

    return tuple(1 if v else 2 for v in _max_min(g.successors, g.owners, odd_wins))


def brute_force_positional(
    g: SimpleStochasticGame | MeanPayoffGame | ParityGame, cap: int = DEFAULT_LIMITS.brute_force_cap
) -> Vector | tuple[int, ...]:
    """Exhaustive positional max-min: SSG values, MPG values or parity winners."""
    if isinstance(g, SimpleStochasticGame):
        return brute_force_ssg(g, cap)
    if isinstance(g, MeanPayoffGame):
        return brute_force_mpg(g, cap)
    return brute_force_parity(g, cap)
