"""OpenQASM 2.0 syntax tree.

Source positions are carried on every node but excluded from equality, so two
programs compare equal when they have the same structure regardless of layout.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from typing import Union

# --- parameter expressions -----------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class ParamRef:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True)
class FuncCall:
    func: str  # sin cos tan exp ln sqrt
    arg: Expr


Expr = Union[Num, Pi, ParamRef, Neg, BinOp, FuncCall]

_BINOPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
    "^": operator.pow,
}
FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


def evaluate(expr: Expr, env: dict[str, float] | None = None) -> float:
    """Evaluate a parameter expression to a 64-bit float.

    Raises ``KeyError`` for an unbound parameter and ``ArithmeticError`` /
    ``ValueError`` for undefined arithmetic.
    """
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Pi):
        return math.pi
    if isinstance(expr, ParamRef):
        return (env or {})[expr.name]
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, env)
    if isinstance(expr, BinOp):
        return float(_BINOPS[expr.op](evaluate(expr.left, env), evaluate(expr.right, env)))
    if isinstance(expr, FuncCall):
        return FUNCTIONS[expr.func](evaluate(expr.arg, env))
    raise TypeError(f"not an expression: {expr!r}")


def substitute(expr: Expr, env: dict[str, Expr]) -> Expr:
    if isinstance(expr, ParamRef):
        return env[expr.name]
    if isinstance(expr, Neg):
        return Neg(substitute(expr.operand, env))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, substitute(expr.left, env), substitute(expr.right, env))
    if isinstance(expr, FuncCall):
        return FuncCall(expr.func, substitute(expr.arg, env))
    return expr


def free_params(expr: Expr) -> set[str]:
    if isinstance(expr, ParamRef):
        return {expr.name}
    if isinstance(expr, Neg):
        return free_params(expr.operand)
    if isinstance(expr, BinOp):
        return free_params(expr.left) | free_params(expr.right)
    if isinstance(expr, FuncCall):
        return free_params(expr.arg)
    return set()


def format_expr(expr: Expr) -> str:
    # Fully parenthesized so re-parsing rebuilds the identical tree.
    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, Pi):
        return "pi"
    if isinstance(expr, ParamRef):
        return expr.name
    if isinstance(expr, Neg):
        return f"-({format_expr(expr.operand)})"
    if isinstance(expr, BinOp):
        return f"({format_expr(expr.left)} {expr.op} {format_expr(expr.right)})"
    if isinstance(expr, FuncCall):
        return f"{expr.func}({format_expr(expr.arg)})"
    raise TypeError(f"not an expression: {expr!r}")


# --- program structure ---------------------------------------------------


@dataclass(frozen=True)
class QubitRef:
    """``register[index]``; ``index`` is None only for an unresolved register."""

    register: str
    index: int | None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return self.register if self.index is None else f"{self.register}[{self.index}]"


@dataclass(frozen=True)
class RegisterDecl:
    name: str
    size: int
    quantum: bool
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class GateCall:
    gate_name: str
    params: tuple[float, ...]
    targets: tuple[QubitRef, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class UGate:
    theta: float
    phi: float
    lam: float
    target: QubitRef
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CNOTGate:
    control: QubitRef
    target: QubitRef
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MeasureStmt:
    qubit: QubitRef
    bit: QubitRef
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ResetStmt:
    qubit: QubitRef
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BarrierStmt:
    qubits: tuple[QubitRef, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BodyGate:
    """One statement inside a ``gate`` body: ``U``, ``CX`` or a named call."""

    name: str
    params: tuple[Expr, ...]
    qubits: tuple[str, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class GateDef:
    name: str
    formal_params: tuple[str, ...]
    formal_qubits: tuple[str, ...]
    body: tuple[BodyGate, ...]
    origin: str | None = None  # include file name, None when defined in the main source
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Statement = Union[GateCall, UGate, CNOTGate, MeasureStmt, ResetStmt, BarrierStmt]
Declaration = Union[RegisterDecl, GateDef]


@dataclass(frozen=True)
class Program:
    version: str = "2.0"
    declarations: tuple[Declaration, ...] = ()
    statements: tuple[Statement, ...] = ()
    includes: tuple[str, ...] = ()
    filename: str = field(default="<input>", compare=False)

    @property
    def registers(self) -> list[RegisterDecl]:
        return [d for d in self.declarations if isinstance(d, RegisterDecl)]

    @property
    def qregs(self) -> list[RegisterDecl]:
        return [d for d in self.declarations if isinstance(d, RegisterDecl) and d.quantum]

    @property
    def gate_defs(self) -> dict[str, GateDef]:
        return {d.name: d for d in self.declarations if isinstance(d, GateDef)}


def format_program(program: Program) -> str:
    """Print ``program`` in canonical OpenQASM form (re-parses to an equal Program)."""
    out = [f"OPENQASM {program.version};"]
    out += [f'include "{name}";' for name in program.includes]
    for decl in program.declarations:
        if isinstance(decl, RegisterDecl):
            kind = "qreg" if decl.quantum else "creg"
            out.append(f"{kind} {decl.name}[{decl.size}];")
        elif decl.origin is None:
            params = f"({', '.join(decl.formal_params)})" if decl.formal_params else ""
            out.append(f"gate {decl.name}{params} {', '.join(decl.formal_qubits)} {{")
            for g in decl.body:
                args = f"({', '.join(format_expr(p) for p in g.params)})" if g.params else ""
                out.append(f"  {g.name}{args} {', '.join(g.qubits)};")
            out.append("}")
    for stmt in program.statements:
        out.append(format_statement(stmt))
    return "\n".join(out) + "\n"


def format_statement(stmt: Statement) -> str:
    if isinstance(stmt, GateCall):
        args = f"({', '.join(repr(p) for p in stmt.params)})" if stmt.params else ""
        return f"{stmt.gate_name}{args} {', '.join(map(str, stmt.targets))};"
    if isinstance(stmt, UGate):
        return f"U({stmt.theta!r}, {stmt.phi!r}, {stmt.lam!r}) {stmt.target};"
    if isinstance(stmt, CNOTGate):
        return f"CX {stmt.control}, {stmt.target};"
    if isinstance(stmt, MeasureStmt):
        return f"measure {stmt.qubit} -> {stmt.bit};"
    if isinstance(stmt, ResetStmt):
        return f"reset {stmt.qubit};"
    if isinstance(stmt, BarrierStmt):
        return f"barrier {', '.join(map(str, stmt.qubits))};"
    raise TypeError(f"not a statement: {stmt!r}")
