"""
Simplicial path following: Sperner's lemma on a triangulated simplex and
Scarf-style weak approximate fixed points of circuit-defined maps.

Grid points of resolution ``N`` in a simplex with ``d`` coordinates are
integer vectors ``a >= 0`` summing to ``N``. The walker works in cumulative
coordinates ``y_k = a_0 + ... + a_{k-1}`` (``1 <= k < d``), where the simplex
becomes the ordered region ``0 <= y_1 <= ... <= y_{d-1} <= N`` and the
Freudenthal triangulation of the integer lattice tiles it.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .circuits import AlgebraicCircuit, CircuitBuilder, DomainSpec, circuit_eval
from .config import DEFAULT_LIMITS
from .core import RationalLike, Vector, linf_distance, parse_rational
from .errors import (
    DimensionMismatch,
    OracleViolation,
    ResidualNotMet,
    SizeCapExceeded,
    StepCapExceeded,
)

logger = logging.getLogger(__name__)

GridPoint = tuple[int, ...]
Labeling = Callable[[GridPoint], int]


@dataclass(frozen=True, slots=True)
class KuhnCell:
    """Vertices ``base``, then one unit step along each axis in ``perm`` order."""

    base: tuple[int, ...]
    perm: tuple[int, ...]

    def vertices(self) -> list[tuple[int, ...]]:
        out = [self.base]
        current = list(self.base)
        for axis in self.perm:
            current[axis] += 1
            out.append(tuple(current))
        return out

    def pivot(self, t: int) -> tuple[KuhnCell, int]:
        """Replace vertex ``t``; return the neighbouring cell and the index of its new vertex."""
        c = len(self.perm)
        base, perm = list(self.base), list(self.perm)
        if t == 0:
            base[perm[0]] += 1
            return KuhnCell(tuple(base), (*perm[1:], perm[0])), c
        if t == c:
            base[perm[-1]] -= 1
            return KuhnCell(tuple(base), (perm[-1], *perm[:-1])), 0
        perm[t - 1], perm[t] = perm[t], perm[t - 1]
        return KuhnCell(tuple(base), tuple(perm)), t


@dataclass(frozen=True, slots=True)
class PathResult:
    vertices: tuple[GridPoint, ...]
    labels: tuple[int, ...]
    steps: int

    def barycenter(self, resolution: int) -> Vector:
        d = len(self.vertices[0])
        k = len(self.vertices)
        return tuple(
            Fraction(sum(v[i] for v in self.vertices), k * resolution) for i in range(d)
        )


@dataclass(frozen=True, slots=True)
class SimplicialGrid:
    """Freudenthal subdivision of the simplex with ``dimension`` coordinates at pitch ``1/resolution``."""

    dimension: int
    resolution: int

    def __post_init__(self) -> None:
        if self.dimension < 1 or self.resolution < 1:
            raise DimensionMismatch("grid dimension and resolution must be >= 1")

    @property
    def pitch(self) -> Fraction:
        return Fraction(1, self.resolution)

    def barycentric(self, y: Sequence[int]) -> GridPoint:
        N = self.resolution
        full = (*y, *((N,) * (self.dimension - 1 - len(y))))
        a, prev = [], 0
        for v in full:
            a.append(v - prev)
            prev = v
        a.append(N - prev)
        return tuple(a)

    def point(self, a: GridPoint) -> Vector:
        return tuple(Fraction(v, self.resolution) for v in a)

    def follow(self, label: Labeling, step_cap: int = DEFAULT_LIMITS.step_cap) -> PathResult:
        """Walk from the corner ``e_0`` to a cell carrying every label.

        Level ``j`` is the face spanned by the first ``j`` corners. A cell of
        that face whose labels are exactly ``0..j-1`` climbs to level ``j+1``;
        otherwise the walk leaves through the facet opposite the older copy of
        the repeated label, dropping back a level when that facet lies on the
        lower face.
        """
        d, N = self.dimension, self.resolution
        cache: dict[GridPoint, int] = {}

        def lab(a: GridPoint) -> int:
            if a not in cache:
                value = label(a)
                if not 0 <= value < d or a[value] == 0:
                    raise OracleViolation(f"label {value} at {a} is not a positive coordinate")
                cache[a] = value
            return cache[a]

        start = self.barycentric(())
        if d == 1:
            return PathResult((start,), (lab(start),), 0)
        lab(start)

        def climb(cell: KuhnCell, level: int) -> KuhnCell:
            return KuhnCell((*cell.base, N - 1), (level - 1, *cell.perm))

        level = 2
        cell = climb(KuhnCell((), ()), 1)
        new = 0
        visited: set[tuple[int, KuhnCell]] = set()
        steps = 0
        while True:
            steps += 1
            if steps > step_cap:
                raise StepCapExceeded(f"simplicial walk exceeded {step_cap} cells")
            assert (level, cell) not in visited, "path revisited a cell"
            visited.add((level, cell))
            verts = [self.barycentric(y) for y in cell.vertices()]
            labels = [lab(a) for a in verts]
            repeated = [t for t in range(level) if t != new and labels[t] == labels[new]]
            if not repeated:
                if level == d:
                    logger.info(f"simplicial walk: panchromatic cell after {steps} cells (N={N})")
                    return PathResult(tuple(verts), tuple(labels), steps)
                cell, level, new = climb(cell, level), level + 1, 0
                continue
            out = repeated[0]
            c = level - 1
            # facet opposite vertex 0 lies on y_c = N: continue on the lower face
            while out == 0 and cell.perm[0] == c - 1 and cell.base[c - 1] == N - 1:
                cell = KuhnCell(cell.base[: c - 1], cell.perm[1:])
                level -= 1
                c -= 1
                assert level >= 2, "walk returned to the start corner"
                assert (level, cell) not in visited, "path revisited a cell"
                visited.add((level, cell))
                labels = [lab(self.barycentric(y)) for y in cell.vertices()]
                out = labels.index(level - 1)
            cell, new = cell.pivot(out)
            assert all(v >= 0 for v in self.barycentric(cell.vertices()[new])), "walk left the simplex"


# Sperner


def smallest_index_coloring(v: GridPoint) -> int:
    """Color ``1 + `` the first nonzero coordinate."""
    return 1 + next(i for i, c in enumerate(v) if c)


@dataclass(frozen=True, slots=True)
class SpernerInstance:
    """Resolution ``n`` with a coloring of ``(i1, i2, i3)``, ``i1 + i2 + i3 = n``, into ``{1, 2, 3}``."""

    n: int
    coloring: Callable[[GridPoint], int]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionMismatch("Sperner resolution must be >= 1")

    @classmethod
    def from_circuit(cls, n: int, circuit: AlgebraicCircuit) -> SpernerInstance:
        """The chosen color is 1 + the index of the largest of the circuit's three outputs."""
        if circuit.arity != 3 or circuit.output_arity != 3:
            raise DimensionMismatch("a coloring circuit maps (i1, i2, i3) to three scores")

        def coloring(v: GridPoint) -> int:
            scores = circuit_eval(circuit, v)
            return 1 + max(range(3), key=lambda c: (scores[c], -c))

        return cls(n, coloring)

    def color(self, v: GridPoint) -> int:
        c = self.coloring(v)
        if c not in (1, 2, 3) or v[c - 1] == 0:
            raise OracleViolation(f"color {c} at {v} violates the boundary condition")
        return c


@dataclass(frozen=True, slots=True)
class SpernerCell:
    vertices: tuple[GridPoint, ...]
    colors: tuple[int, ...]

    @classmethod
    def of(cls, inst: SpernerInstance, vertices: Sequence[GridPoint]) -> SpernerCell:
        ordered = tuple(sorted(vertices))
        return cls(ordered, tuple(inst.color(v) for v in ordered))

    @property
    def panchromatic(self) -> bool:
        return sorted(self.colors) == [1, 2, 3]


def sperner_solve(inst: SpernerInstance, step_cap: int = DEFAULT_LIMITS.step_cap) -> SpernerCell:
    grid = SimplicialGrid(3, inst.n)
    path = grid.follow(lambda a: inst.color(a) - 1, step_cap=step_cap)
    cell = SpernerCell.of(inst, path.vertices)
    if not cell.panchromatic:
        raise OracleViolation(f"re-queried colors {cell.colors} are not panchromatic")
    return cell


def _triangles(n: int) -> list[tuple[GridPoint, GridPoint, GridPoint]]:
    cells = []
    for a in range(n):
        for b in range(n - a):
            c = n - 1 - a - b
            cells.append(((a + 1, b, c), (a, b + 1, c), (a, b, c + 1)))
    for a in range(n - 1):
        for b in range(n - 1 - a):
            c = n - 2 - a - b
            cells.append(((a + 1, b + 1, c), (a + 1, b, c + 1), (a, b + 1, c + 1)))
    return cells


def brute_force_sperner(inst: SpernerInstance, cap: int = DEFAULT_LIMITS.sperner_cap) -> list[SpernerCell]:
    """Every panchromatic cell of the ``n*n``-cell subdivision."""
    if inst.n > cap:
        raise SizeCapExceeded(f"resolution {inst.n} exceeds brute-force cap {cap}")
    found = []
    for tri in _triangles(inst.n):
        cell = SpernerCell.of(inst, tri)
        if cell.panchromatic:
            found.append(cell)
    return found


def sperner_orientation(cell: SpernerCell) -> int:
    """+1 when colors 1, 2, 3 run counterclockwise in the (i1, i2) plane, as at the corners."""
    by_color = dict(zip(cell.colors, cell.vertices))
    p1, p2, p3 = by_color[1], by_color[2], by_color[3]
    det = (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p2[1] - p1[1]) * (p3[0] - p1[0])
    return 1 if det > 0 else -1


# Scarf


def retract_product_point(z: Sequence[Fraction], blocks: Sequence[int]) -> Vector:
    """Map a point of one simplex onto the product of simplexes with ``blocks`` sizes.

    Each block is topped up with uniform slack until it holds at least ``1/k``
    of the mass, then normalised.
    """
    k = len(blocks)
    out: list[Fraction] = []
    start = 0
    for m in blocks:
        part = z[start : start + m]
        total = sum(part, Fraction(0))
        den = max(total, Fraction(1, k))
        slack = (den - total) / m
        out.extend((v + slack) / den for v in part)
        start += m
    return tuple(out)


def embed_product_map(circuit: AlgebraicCircuit, blocks: Sequence[int]) -> AlgebraicCircuit:
    """Self-map of one simplex whose fixed points retract onto fixed points of ``circuit``."""
    k = len(blocks)
    b = CircuitBuilder(sum(blocks))
    floor = b.const(Fraction(1, k))
    retracted: list[int] = []
    start = 0
    for m in blocks:
        zs = [b.input(start + j) for j in range(m)]
        total = b.sum(zs)
        den = b.max(total, floor)
        slack = b.scale(b.sub(den, total), Fraction(1, m))
        retracted.extend(b.div(b.add(z, slack), den) for z in zs)
        start += m
    outs = b.inline(circuit, retracted)
    return b.build([b.scale(o, Fraction(1, k)) for o in outs])


def _cube_as_product(circuit: AlgebraicCircuit) -> AlgebraicCircuit:
    """Cube coordinate ``x_i`` becomes the two-point block ``(x_i, 1 - x_i)``."""
    n = circuit.arity
    b = CircuitBuilder(2 * n)
    one = b.const(1)
    outs = b.inline(circuit, [b.input(2 * i) for i in range(n)])
    flat: list[int] = []
    for o in outs:
        flat.extend((o, b.sub(one, o)))
    return b.build(flat)


def scarf_label(circuit: AlgebraicCircuit, x: Sequence[Fraction]) -> int:
    """First ``i`` with ``x_i > F_i(x)``; at a fixed point, the first largest coordinate."""
    fx = circuit_eval(circuit, x)
    for i, (a, b) in enumerate(zip(x, fx)):
        if a > b:
            return i
    return max(range(len(x)), key=lambda i: (x[i], -i))


@dataclass(frozen=True, slots=True)
class ScarfResult:
    point: Vector
    residual: Fraction
    pitch: Fraction
    cells: int
    refinements: int


def scarf_weak_fixpoint(
    circuit: AlgebraicCircuit,
    epsilon: RationalLike,
    pitch: RationalLike | None = None,
    domain: DomainSpec | None = None,
    retries: int = DEFAULT_LIMITS.retries,
    step_cap: int = DEFAULT_LIMITS.step_cap,
) -> ScarfResult:
    """A point ``x`` with ``|F(x) - x| <= epsilon``, checked by direct evaluation.

    Without ``pitch`` the grid starts at ``epsilon / 4`` and halves after
    every miss. Cube and product domains are embedded into a single simplex.
    """
    eps = parse_rational(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    domain = domain or DomainSpec.simplex(circuit.arity)
    if circuit.arity != domain.dimension or circuit.output_arity != domain.dimension:
        raise DimensionMismatch(
            f"circuit is {circuit.arity}->{circuit.output_arity}, domain dimension {domain.dimension}"
        )

    to_domain: Callable[[Vector], Vector]
    match domain.kind:
        case "simplex":
            walked = circuit
            to_domain = lambda z: z  # noqa: E731
        case "cube":
            blocks = (2,) * domain.dimension
            walked = embed_product_map(_cube_as_product(circuit), blocks)
            to_domain = lambda z: retract_product_point(z, blocks)[::2]  # noqa: E731
        case _:
            walked = embed_product_map(circuit, domain.blocks)
            to_domain = lambda z: retract_product_point(z, domain.blocks)  # noqa: E731

    delta = parse_rational(pitch) if pitch is not None else eps / 4
    if delta <= 0:
        raise ValueError("pitch must be positive")
    best: ScarfResult | None = None
    for attempt in range(retries + 1):
        grid = SimplicialGrid(walked.arity, math.ceil(1 / delta))
        path = grid.follow(lambda a: scarf_label(walked, grid.point(a)), step_cap=step_cap)
        x = to_domain(path.barycenter(grid.resolution))
        residual = linf_distance(circuit_eval(circuit, x), x)
        result = ScarfResult(x, residual, grid.pitch, path.steps, attempt)
        if residual <= eps:
            logger.info(f"scarf_weak_fixpoint: residual {residual} at pitch {grid.pitch}")
            return result
        logger.warning(f"scarf_weak_fixpoint: residual {float(residual):.3g} > {eps} at pitch {grid.pitch}, refining")
        best = result if best is None or residual < best.residual else best
        delta /= 2
    raise ResidualNotMet(f"residual still above {eps} after {retries} refinements", partial=best)
