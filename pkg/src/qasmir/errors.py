"""Exception types and diagnostics shared across the compiler and runtime."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """A located message produced by a checker instead of an exception."""

    code: str
    message: str
    line: int = 0
    column: int = 0
    severity: str = "error"  # error | warning
    filename: str = "<input>"

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        return f"{self.filename}:{self.line}:{self.column}: {self.severity}: [{self.code}] {self.message}"


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)


class QasmirError(Exception):
    """Base class for every error raised by this package."""


# --- frontend -------------------------------------------------------------


class LexError(QasmirError):
    def __init__(self, message: str, line: int, column: int, filename: str = "<input>"):
        super().__init__(f"{filename}:{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.filename = filename


class ParseError(QasmirError):
    def __init__(
        self,
        line: int,
        column: int,
        expected: str,
        found: str,
        filename: str = "<input>",
    ):
        super().__init__(f"{filename}:{line}:{column}: expected {expected}, found {found}")
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        self.filename = filename


class VersionError(ParseError):
    pass


class IncludeError(QasmirError):
    def __init__(self, name: str, line: int = 0, column: int = 0, filename: str = "<input>"):
        super().__init__(f"{filename}:{line}:{column}: cannot resolve include {name!r}")
        self.name = name
        self.line = line
        self.column = column
        self.filename = filename


class GateRecursionError(QasmirError, RecursionError):
    pass


class FrontendError(QasmirError):
    """Raised when a program fails validation; carries every diagnostic."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        super().__init__("\n".join(str(d) for d in errors) or "frontend failure")


# --- IR / generation ------------------------------------------------------


class SignatureError(QasmirError):
    pass


class StateError(QasmirError):
    pass


class UnknownRegister(QasmirError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class VerificationError(QasmirError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics if d.is_error))


# --- lowering / QIR text --------------------------------------------------


class LoweringError(QasmirError):
    def __init__(self, op, message: str = "no conversion pattern"):
        super().__init__(f"{message}: {op.full_name}")
        self.op = op


class LegalityError(QasmirError):
    def __init__(self, ops):
        self.ops = list(ops)
        names = ", ".join(sorted({op.full_name for op in self.ops}))
        super().__init__(f"{len(self.ops)} illegal op(s) survived lowering: {names}")


class QirParseError(QasmirError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


# --- runtime --------------------------------------------------------------


class QirRuntimeError(QasmirError):
    pass


class ConfigError(QirRuntimeError):
    pass


class CapacityError(QirRuntimeError):
    pass


class QubitIndexError(QirRuntimeError, IndexError):
    pass


class UseAfterRelease(QirRuntimeError):
    pass


class DoubleRelease(QirRuntimeError):
    pass


class UnknownGate(QirRuntimeError):
    pass


class ArityError(QirRuntimeError):
    pass


class RuntimeStateError(StateError, QirRuntimeError):
    pass


class ExecutionError(QirRuntimeError):
    """A runtime failure tagged with the position of the offending op."""

    def __init__(self, function: str, position: int, op_text: str, cause: Exception):
        super().__init__(f"@{function} op #{position} ({op_text}): {type(cause).__name__}: {cause}")
        self.function = function
        self.position = position
        self.cause = cause
