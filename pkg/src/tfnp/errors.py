"""Exception hierarchy shared by every solver module and the CLI."""

from __future__ import annotations

from typing import Any


class TfnpError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for this failure."""

    exit_code: int = 3

    def __init__(self, message: str = "", *, partial: Any = None) -> None:
        super().__init__(message)
        self.partial = partial


# Schema / input document errors


class SchemaError(TfnpError):
    exit_code = 2

    def __init__(
        self, message: str = "", *, fields: dict[str, str] | None = None, line: int | None = None
    ) -> None:
        super().__init__(message)
        self.fields = fields or {}
        self.line = line


class UnknownKind(SchemaError):
    pass


class BadRational(SchemaError):
    pass


# Solver errors


class DimensionMismatch(TfnpError):
    pass


class SingularMatrix(TfnpError):
    pass


class Infeasible(TfnpError):
    pass


class Unbounded(TfnpError):
    pass


class OracleViolation(TfnpError):
    pass


class DivisionByZero(TfnpError):
    def __init__(self, gate: int) -> None:
        super().__init__(f"division by zero at gate g{gate}")
        self.gate = gate


class ResidualNotMet(TfnpError):
    pass


class ValidationFailed(TfnpError):
    pass


class UnsupportedCommand(TfnpError):
    pass


class CertificationFailed(TfnpError):
    exit_code = 4


# Caps


class CapExceeded(TfnpError):
    exit_code = 5


class StepCapExceeded(CapExceeded):
    pass


class SizeCapExceeded(CapExceeded):
    pass


class IterCapExceeded(CapExceeded):
    pass


class PivotLimitExceeded(CapExceeded):
    pass


class BitCapExceeded(CapExceeded):
    pass
