from __future__ import annotations

from dataclasses import replace

from qasmir.errors import GateRecursionError
from qasmir.frontend import ast
from qasmir.frontend.gates import BUILTIN_GATES

MAX_INLINE_DEPTH = 128


def inline_user_gates(program: ast.Program) -> ast.Program:
    """Replace every call to a user-defined gate by its substituted body.

    Calls to native gates stay named. The program is assumed to be valid.
    """
    defs = {name: d for name, d in program.gate_defs.items() if name not in BUILTIN_GATES}
    if not defs:
        return program
    out: list[ast.Statement] = []
    for stmt in program.statements:
        if isinstance(stmt, ast.GateCall) and stmt.gate_name in defs:
            _expand(defs[stmt.gate_name], stmt.params, stmt.targets, defs, stmt, out, depth=1)
        else:
            out.append(stmt)
    return replace(program, statements=tuple(out))


def _expand(gate, params, targets, defs, site, out, depth) -> None:
    if depth > MAX_INLINE_DEPTH:
        raise GateRecursionError(f"gate expansion of {gate.name!r} exceeds depth {MAX_INLINE_DEPTH}")
    env = dict(zip(gate.formal_params, params))
    qubits = dict(zip(gate.formal_qubits, targets))
    pos = {"line": site.line, "column": site.column}
    for body in gate.body:
        values = tuple(ast.evaluate(p, env) for p in body.params)
        refs = tuple(qubits[q] for q in body.qubits)
        if body.name == "U":
            out.append(ast.UGate(*values, refs[0], **pos))
        elif body.name == "CX":
            out.append(ast.CNOTGate(refs[0], refs[1], **pos))
        elif body.name in defs:
            _expand(defs[body.name], values, refs, defs, site, out, depth + 1)
        else:
            out.append(ast.GateCall(body.name, values, refs, **pos))
