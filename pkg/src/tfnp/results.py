"""Result documents and their JSON / tsv-summary renderings."""

from __future__ import annotations

import dataclasses
import json
from collections.abc import Mapping
from fractions import Fraction
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict

from .core import format_rational
from .instances import Rational

OutputFormat = Literal["json", "tsv-summary"]


def jsonable(value: Any) -> Any:
    """Fractions become ``"num/den"`` strings, tuples lists, dataclasses dicts, keys strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, float):
        return value
    raise TypeError(f"cannot serialize {type(value).__name__}")


class ResultDocument(BaseModel):
    """What a solver produced, plus the certificate the owning module re-checks.

    ``exact`` is false for weak approximations (``epsilon`` then records the
    tolerance). ``counts`` holds steps, pivots or iterations. ``wall_clock``
    is only filled when timing was requested, keeping runs byte-identical.
    """

    model_config = ConfigDict(extra="forbid")

    solver: str
    version: str
    kind: str
    command: str
    exact: bool
    epsilon: Rational | None = None
    seed: int = 0
    solution: dict[str, Any]
    certificate: dict[str, Any] = {}
    counts: dict[str, int] = {}
    wall_clock: float | None = None


def parse_result(text: str) -> ResultDocument:
    return ResultDocument.model_validate_json(text)


def _cell(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"))
    if isinstance(value, bool):
        return str(value).lower()
    return "" if value is None else str(value)


def _tsv_rows(r: ResultDocument) -> list[tuple[str, str, str]]:
    rows = [
        ("solver", "-", r.solver),
        ("version", "-", r.version),
        ("command", "-", r.command),
        ("exact", "-", _cell(r.exact)),
    ]
    if r.epsilon is not None:
        rows.append(("epsilon", "-", format_rational(r.epsilon)))
    for name, value in r.solution.items():
        if isinstance(value, list):
            rows.extend((name, str(i), _cell(v)) for i, v in enumerate(value))
        elif isinstance(value, dict):
            rows.extend((name, str(k), _cell(v)) for k, v in value.items())
        else:
            rows.append((name, "-", _cell(value)))
    rows.extend((f"count.{name}", "-", str(v)) for name, v in r.counts.items())
    if r.wall_clock is not None:
        rows.append(("wall_clock", "-", f"{r.wall_clock:.6f}"))
    return rows


def emit_result(r: ResultDocument, format: OutputFormat = "json") -> str:
    """``json`` is the canonical form; ``tsv-summary`` is ``field<TAB>index<TAB>value`` per line."""
    if format == "json":
        return r.model_dump_json(indent=2)
    return "\n".join("\t".join(row) for row in _tsv_rows(r)) + "\n"
