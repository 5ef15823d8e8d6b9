"""Static checks over a parsed Program.

Problems are reported as :class:`~qasmir.errors.Diagnostic` values rather
than raised, so a driver can print all of them at once.
"""

from __future__ import annotations

from qasmir.errors import Diagnostic
from qasmir.frontend import ast
from qasmir.frontend.gates import BUILTIN_GATES, PRIMITIVE_GATES


def _gate_signature(name: str, defs: dict[str, ast.GateDef]) -> tuple[int, int] | None:
    if name in BUILTIN_GATES:
        return BUILTIN_GATES[name]
    if name in defs:
        d = defs[name]
        return len(d.formal_params), len(d.formal_qubits)
    return None


class _Checker:
    def __init__(self, program: ast.Program):
        self.program = program
        self.diagnostics: list[Diagnostic] = []
        self.registers: dict[str, ast.RegisterDecl] = {}
        self.defs: dict[str, ast.GateDef] = {}

    def report(self, code: str, message: str, node, severity: str = "error", filename: str | None = None) -> None:
        self.diagnostics.append(
            Diagnostic(
                code,
                message,
                max(getattr(node, "line", 1), 1),
                max(getattr(node, "column", 1), 1),
                severity,
                filename or self.program.filename,
            )
        )

    def run(self) -> list[Diagnostic]:
        for decl in self.program.declarations:
            if isinstance(decl, ast.RegisterDecl):
                self.check_register(decl)
            else:
                self.check_gate_def(decl)
        for stmt in self.program.statements:
            self.check_statement(stmt)
        return self.diagnostics

    def check_register(self, decl: ast.RegisterDecl) -> None:
        if decl.name in self.registers:
            self.report("DuplicateName", f"register {decl.name!r} is already declared", decl)
            return
        if decl.size < 1:
            self.report("InvalidSize", f"register {decl.name!r} must have at least one element", decl)
        self.registers[decl.name] = decl

    def check_gate_def(self, gate: ast.GateDef) -> None:
        filename = gate.origin
        if gate.name in BUILTIN_GATES:
            if (len(gate.formal_params), len(gate.formal_qubits)) != BUILTIN_GATES[gate.name]:
                self.report(
                    "DuplicateName",
                    f"gate {gate.name!r} conflicts with the native gate of the same name",
                    gate,
                    filename=filename,
                )
            else:
                self.report(
                    "Redefinition",
                    f"definition of native gate {gate.name!r} is ignored",
                    gate,
                    severity="warning",
                    filename=filename,
                )
            return
        if gate.name in self.defs or gate.name in PRIMITIVE_GATES:
            self.report("DuplicateName", f"gate {gate.name!r} is already defined", gate, filename=filename)
            return
        for group, kind in ((gate.formal_params, "parameter"), (gate.formal_qubits, "qubit argument")):
            if len(set(group)) != len(group):
                self.report("DuplicateName", f"repeated {kind} name in gate {gate.name!r}", gate, filename=filename)
        for body in gate.body:
            if body.name == gate.name:
                self.report("Recursion", f"gate {gate.name!r} calls itself", body, filename=filename)
                continue
            sig = PRIMITIVE_GATES.get(body.name) or _gate_signature(body.name, self.defs)
            if sig is None:
                self.report("UnknownGate", f"gate {body.name!r} is not defined", body, filename=filename)
                continue
            self.check_arity(body.name, sig, len(body.params), len(body.qubits), body, filename)
            for q in body.qubits:
                if q not in gate.formal_qubits:
                    self.report("UnknownQubit", f"{q!r} is not an argument of gate {gate.name!r}", body, filename=filename)
            if len(set(body.qubits)) != len(body.qubits):
                self.report("DuplicateOperand", f"repeated qubit in call to {body.name!r}", body, filename=filename)
            for p in body.params:
                for name in ast.free_params(p) - set(gate.formal_params):
                    self.report("UnknownParameter", f"{name!r} is not a parameter of gate {gate.name!r}", body, filename=filename)
        self.defs[gate.name] = gate

    def check_arity(self, name, sig, nparams, nqubits, node, filename=None) -> None:
        want_p, want_q = sig
        if nparams != want_p:
            self.report("ArityError", f"gate {name!r} takes {want_p} parameter(s), got {nparams}", node, filename=filename)
        if nqubits != want_q:
            self.report("ArityError", f"gate {name!r} takes {want_q} qubit(s), got {nqubits}", node, filename=filename)

    def check_ref(self, ref: ast.QubitRef, quantum: bool) -> bool:
        decl = self.registers.get(ref.register)
        if decl is None:
            self.report("UnknownRegister", f"register {ref.register!r} is not declared", ref)
            return False
        if decl.quantum != quantum:
            want = "quantum" if quantum else "classical"
            self.report("TypeMismatch", f"{ref.register!r} is not a {want} register", ref)
            return False
        if ref.index is None or not 0 <= ref.index < decl.size:
            self.report("OutOfBounds", f"index {ref.index} is out of range for {ref.register}[{decl.size}]", ref)
            return False
        return True

    def check_qubits(self, refs, node) -> None:
        for ref in refs:
            self.check_ref(ref, quantum=True)
        keys = [(r.register, r.index) for r in refs]
        if len(set(keys)) != len(keys):
            self.report("DuplicateOperand", "the same qubit is used twice in one gate", node)

    def check_statement(self, stmt: ast.Statement) -> None:
        if isinstance(stmt, ast.GateCall):
            sig = _gate_signature(stmt.gate_name, self.defs)
            if sig is None:
                self.report("UnknownGate", f"gate {stmt.gate_name!r} is not defined", stmt)
            else:
                self.check_arity(stmt.gate_name, sig, len(stmt.params), len(stmt.targets), stmt)
            self.check_qubits(stmt.targets, stmt)
        elif isinstance(stmt, ast.UGate):
            self.check_qubits([stmt.target], stmt)
        elif isinstance(stmt, ast.CNOTGate):
            self.check_qubits([stmt.control, stmt.target], stmt)
        elif isinstance(stmt, ast.MeasureStmt):
            self.check_ref(stmt.qubit, quantum=True)
            self.check_ref(stmt.bit, quantum=False)
        elif isinstance(stmt, ast.ResetStmt):
            self.check_ref(stmt.qubit, quantum=True)
        elif isinstance(stmt, ast.BarrierStmt):
            for ref in stmt.qubits:
                self.check_ref(ref, quantum=True)


def validate(program: ast.Program) -> list[Diagnostic]:
    """Return every diagnostic for ``program``; an empty list means it is valid."""
    return _Checker(program).run()
