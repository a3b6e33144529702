"""
Instance documents.

Every instance file is a JSON object tagged by ``kind``. Numbers are
integers or ``"num/den"`` strings; circuits are embedded in the textual
circuit format. Each document validates by building the solver-side
object, so structural problems (probabilities not summing to one, edges
out of range) surface as schema errors that name the offending part.
"""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from typing import Annotated, Any, Literal

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    PositiveInt,
    TypeAdapter,
    ValidationError,
    model_validator,
)

from .circuits import AlgebraicCircuit, DomainSpec, parse_circuit
from .core import RationalMatrix, format_rational, parse_rational
from .decide import SLPCircuit
from .errors import BadRational, DimensionMismatch, SchemaError, UnknownKind
from .lfp import SCFG, BranchingProcess
from .local_search import CongestionGame, HopfieldNet
from .market import ExchangeEconomy
from .mean_payoff import MeanPayoffGame, ParityGame
from .normal_form import NormalFormGame
from .shapley import ShapleyGame
from .simplicial import SpernerInstance, smallest_index_coloring
from .ssg import NodeKind, SimpleStochasticGame

logger = logging.getLogger(__name__)

def _rational(value: Any) -> Fraction:
    try:
        return parse_rational(value)
    except BadRational as exc:
        raise ValueError(str(exc)) from None


Rational = Annotated[
    Fraction,
    BeforeValidator(_rational),
    PlainSerializer(format_rational, return_type=str),
]


class Document(BaseModel):
    """Base for instance documents: ``build()`` returns the solver-side object."""

    model_config = ConfigDict(extra="forbid")

    def build(self) -> Any:
        raise NotImplementedError

    @model_validator(mode="after")
    def check_builds(self) -> Document:
        try:
            self.build()
        except DimensionMismatch as exc:
            raise ValueError(str(exc)) from None
        return self


class HopfieldDocument(Document):
    kind: Literal["hopfield"]
    nodes: PositiveInt
    edges: list[tuple[int, int, Rational]] = []
    thresholds: list[Rational] | None = None
    initial: list[Literal[1, -1]] | None = None

    def build(self) -> HopfieldNet:
        return HopfieldNet.build(self.nodes, self.edges, self.thresholds)


class CongestionDocument(Document):
    """``strategies[i]`` lists player i's resource sets; ``costs[r][j-1]`` is r's cost at j users."""

    kind: Literal["congestion"]
    strategies: list[list[list[str]]]
    costs: dict[str, list[int]]
    initial: list[int] | None = None

    def build(self) -> CongestionGame:
        return CongestionGame.build(self.strategies, self.costs)


class NfgDocument(Document):
    """Flat payoff lists per player, profiles in row-major order (last player fastest)."""

    kind: Literal["nfg"]
    strategy_counts: list[PositiveInt]
    payoffs: list[list[Rational]]

    def build(self) -> NormalFormGame:
        return NormalFormGame(tuple(self.strategy_counts), tuple(tuple(p) for p in self.payoffs))


class BimatrixDocument(Document):
    kind: Literal["bimatrix"]
    A: list[list[Rational]]
    B: list[list[Rational]]

    def build(self) -> NormalFormGame:
        return NormalFormGame.from_bimatrix(RationalMatrix.from_rows(self.A), RationalMatrix.from_rows(self.B))


class SpernerDocument(Document):
    """Without ``circuit`` the grid is colored by the smallest nonzero coordinate index."""

    kind: Literal["sperner"]
    n: PositiveInt
    circuit: str | None = None

    def build(self) -> SpernerInstance:
        if self.circuit is None:
            return SpernerInstance(self.n, smallest_index_coloring)
        return SpernerInstance.from_circuit(self.n, parse_circuit(self.circuit).circuit)


class MarketDocument(Document):
    kind: Literal["market"]
    commodities: PositiveInt
    excess: str
    eta: Rational | None = None

    def build(self) -> ExchangeEconomy:
        return ExchangeEconomy(self.commodities, parse_circuit(self.excess).circuit, self.eta)


class ShapleyStateDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rewards: list[list[Rational]]
    stop: list[list[Rational]]
    transitions: list[list[list[Rational]]]


class ShapleyDocument(Document):
    kind: Literal["shapley"]
    states: list[ShapleyStateDocument] = Field(min_length=1)

    def build(self) -> ShapleyGame:
        return ShapleyGame.build([dict(s) for s in self.states])


class SSGNodeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: NodeKind
    successors: list[int] = []
    probabilities: list[Rational] = []


class SSGDocument(Document):
    kind: Literal["ssg"]
    nodes: list[SSGNodeDocument] = Field(min_length=1)

    def build(self) -> SimpleStochasticGame:
        return SimpleStochasticGame.build([(n.kind, n.successors, n.probabilities) for n in self.nodes])


class MPGDocument(Document):
    """``edges[u]`` lists ``(target, reward)`` pairs."""

    kind: Literal["mpg"]
    owners: list[Literal[1, 2]]
    edges: list[list[tuple[int, int]]]

    def build(self) -> MeanPayoffGame:
        return MeanPayoffGame.build(self.owners, self.edges)


class ParityDocument(Document):
    kind: Literal["parity"]
    owners: list[Literal[1, 2]]
    successors: list[list[int]]
    labels: list[int]

    def build(self) -> ParityGame:
        return ParityGame(tuple(self.owners), tuple(tuple(s) for s in self.successors), tuple(self.labels))


class BranchingRuleDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    probability: Rational
    offspring: list[int]


class BranchingDocument(Document):
    kind: Literal["bp"]
    rules: list[list[BranchingRuleDocument]] = Field(min_length=1)

    def build(self) -> BranchingProcess:
        return BranchingProcess.build([[(r.probability, r.offspring) for r in rules] for rules in self.rules])


class ProductionDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lhs: str
    rhs: list[str]
    probability: Rational


class SCFGDocument(Document):
    kind: Literal["scfg"]
    nonterminals: list[str] = Field(min_length=1)
    rules: list[ProductionDocument]
    start: str

    def build(self) -> SCFG:
        return SCFG.build(self.nonterminals, [(r.lhs, r.rhs, r.probability) for r in self.rules], self.start)


class CircuitDocument(Document):
    """The circuit text; a ``domain`` header line is required."""

    kind: Literal["circuit"]
    text: str

    def build(self) -> tuple[AlgebraicCircuit, DomainSpec]:
        parsed = parse_circuit(self.text)
        if parsed.domain is None:
            raise SchemaError("circuit documents need a 'domain' header", fields={"text": "missing domain header"})
        if parsed.domain.dimension != parsed.circuit.arity:
            raise DimensionMismatch(
                f"domain dimension {parsed.domain.dimension} differs from circuit arity {parsed.circuit.arity}"
            )
        return parsed.circuit, parsed.domain


class SqrtSumDocument(Document):
    kind: Literal["sqrtsum"]
    d: list[PositiveInt] = Field(min_length=1)
    k: PositiveInt

    def build(self) -> tuple[list[int], int]:
        return self.d, self.k


class PosSLPDocument(Document):
    kind: Literal["posslp"]
    text: str

    def build(self) -> SLPCircuit:
        return SLPCircuit.parse(self.text)


InstanceDocument = Annotated[
    HopfieldDocument
    | CongestionDocument
    | NfgDocument
    | BimatrixDocument
    | SpernerDocument
    | MarketDocument
    | ShapleyDocument
    | SSGDocument
    | MPGDocument
    | ParityDocument
    | BranchingDocument
    | SCFGDocument
    | CircuitDocument
    | SqrtSumDocument
    | PosSLPDocument,
    Field(discriminator="kind"),
]

KINDS = (
    "hopfield",
    "congestion",
    "nfg",
    "bimatrix",
    "sperner",
    "market",
    "shapley",
    "ssg",
    "mpg",
    "parity",
    "bp",
    "scfg",
    "circuit",
    "sqrtsum",
    "posslp",
)

_adapter: TypeAdapter[Document] = TypeAdapter(InstanceDocument)


def parse_errors(error: ValidationError) -> dict[str, str]:
    """Convert a pydantic ValidationError to a ``dotted.location -> message`` dict."""
    errors = {}
    for err in error.errors():
        loc = ".".join(str(part) for part in err["loc"][1:]) or "document"
        errors[loc] = err["msg"].removeprefix("Value error, ")
    return errors


def load_instance(data: Any) -> Document:
    if not isinstance(data, dict):
        raise SchemaError("an instance document must be a JSON object")
    kind = data.get("kind")
    if kind is None:
        raise SchemaError("missing 'kind'", fields={"kind": "Field required"})
    if kind not in KINDS:
        raise UnknownKind(f"unknown instance kind {kind!r}", fields={"kind": f"expected one of {', '.join(KINDS)}"})
    try:
        return _adapter.validate_python(data)
    except ValidationError as exc:
        fields = parse_errors(exc)
        logger.debug(f"load_instance: {kind} document rejected: {fields}")
        summary = "; ".join(f"{k}: {v}" for k, v in fields.items())
        raise SchemaError(f"invalid {kind} document: {summary}", fields=fields) from None


def parse_instance(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", line=exc.lineno) from None
    return load_instance(data)


def emit_instance(doc: Document) -> str:
    return doc.model_dump_json(indent=2)
