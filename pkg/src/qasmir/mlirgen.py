"""Source-language generators that build quantum-dialect modules.

:class:`QuantumMLIRGenerator` is the extension point: a language implements
``mlirgen`` (source text to ops) and ``finalize_mlirgen``; the base class owns
the module, the entry-point or library function, and the lifecycle checks.
"""

from __future__ import annotations

import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from qasmir import ir
from qasmir.errors import FrontendError, StateError, UnknownRegister, VerificationError, has_errors
from qasmir.frontend import ast
from qasmir.frontend.inline import inline_user_gates
from qasmir.frontend.parser import IncludeResolver, parse_program
from qasmir.frontend.validate import validate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorConfig:
    add_entry_point: bool = True
    file_name: str = ""

    def __post_init__(self):
        if not self.add_entry_point and not self.file_name:
            raise ValueError("file_name is required when no entry point is generated")

    @property
    def function_name(self) -> str:
        if self.add_entry_point:
            return "main"
        return function_name_for(self.file_name)


def function_name_for(file_name: str) -> str:
    stem = Path(file_name).stem or "kernel"
    name = re.sub(r"[^A-Za-z0-9_]", "_", stem)
    return f"_{name}" if name[0].isdigit() else name


class QuantumMLIRGenerator(ABC):
    def __init__(self):
        self.config: Optional[GeneratorConfig] = None
        self.builder: Optional[ir.ModuleBuilder] = None
        self.function: Optional[ir.IrFunction] = None
        self._stage = "new"  # new -> initialized -> generated -> finalized
        self._module: Optional[ir.IrModule] = None

    def initialize_mlirgen(self, add_entry_point: bool = True, file_name: str = "") -> None:
        if self._stage != "new":
            raise StateError("initialize_mlirgen may only be called once")
        self.config = GeneratorConfig(add_entry_point, file_name)
        self.builder = ir.ModuleBuilder()
        if add_entry_point:
            self.function = self.builder.create_function("main", [ir.I32, ir.ARGV], ir.I32)
            argc, argv = self.function.arguments
            self.builder.build_op("quantum.init", {}, [argc, argv])
        else:
            self.function = self.builder.create_function(self.config.function_name, [ir.QREG], ir.VOID)
            self.builder.build_op("quantum.set_qreg", {}, [self.function.arguments[0]])
        self._stage = "initialized"

    @abstractmethod
    def mlirgen(self, src: str) -> None:
        """Translate ``src`` into ops appended to the open function."""

    @abstractmethod
    def finalize_mlirgen(self) -> None:
        """Release resources and terminate the function."""

    def get_module(self) -> ir.IrModule:
        if self._stage != "finalized":
            raise StateError("get_module requires finalize_mlirgen")
        if self._module is None:
            diags = ir.verify_module(self.builder.module)
            if has_errors(diags):
                raise VerificationError(diags)
            self._module = self.builder.module
        return self._module

    # -- helpers for subclasses ---------------------------------------------

    def _require(self, *stages: str, action: str) -> None:
        if self._stage not in stages:
            raise StateError(f"{action} is not allowed after stage {self._stage!r}")

    def _emit_epilogue(self, registers: list[ir.IrValue]) -> None:
        for reg in registers:
            self.builder.build_op("quantum.dealloc", {}, [reg])
        if self.config.add_entry_point:
            self.builder.build_op("quantum.finalize")
            self.builder.build_op("std.return", {"value": 0})
        else:
            self.builder.build_op("std.return")
        self._stage = "finalized"


class OpenQasmMLIRGenerator(QuantumMLIRGenerator):
    """OpenQASM 2.0 to the quantum dialect."""

    def __init__(self, include_resolver: IncludeResolver = None, filename: str = "<input>"):
        super().__init__()
        self.include_resolver = include_resolver
        self.filename = filename
        self.symbol_table: dict[str, ir.IrValue] = {}
        self._qubits: dict[tuple[str, int], ir.IrValue] = {}
        self.warnings: list = []

    def mlirgen(self, src: str) -> None:
        self._require("initialized", "generated", action="mlirgen")
        program = parse_program(src, self.include_resolver, self.filename)
        diags = validate(program)
        if has_errors(diags):
            raise FrontendError(diags)
        for d in diags:
            logger.warning("%s", d)
        self.warnings.extend(diags)
        self.mlirgen_program(inline_user_gates(program))

    def mlirgen_program(self, program: ast.Program) -> None:
        """Emit ops for an already validated and inlined program."""
        self._require("initialized", "generated", action="mlirgen")
        build = self.builder.build_op
        for decl in program.qregs:
            op = build("quantum.qalloc", {"name": decl.name, "size": decl.size})
            self.symbol_table[decl.name] = op.result
        for stmt in program.statements:
            if isinstance(stmt, ast.GateCall):
                qubits = [self._qubit(t) for t in stmt.targets]
                build("quantum.inst", {"name": stmt.gate_name, "params": [float(p) for p in stmt.params]}, qubits)
            elif isinstance(stmt, ast.UGate):
                q = self._qubit(stmt.target)
                build("quantum.inst", {"name": "u3", "params": [stmt.theta, stmt.phi, stmt.lam]}, [q])
            elif isinstance(stmt, ast.CNOTGate):
                qubits = [self._qubit(stmt.control), self._qubit(stmt.target)]
                build("quantum.inst", {"name": "cx", "params": []}, qubits)
            elif isinstance(stmt, ast.MeasureStmt):
                build("quantum.inst", {"name": "mz", "params": []}, [self._qubit(stmt.qubit)])
            elif isinstance(stmt, ast.ResetStmt):
                build("quantum.inst", {"name": "reset", "params": []}, [self._qubit(stmt.qubit)])
            elif isinstance(stmt, ast.BarrierStmt):
                logger.warning("%s:%d:%d: barrier ignored", program.filename, stmt.line, stmt.column)
        self._stage = "generated"

    def _qubit(self, ref: ast.QubitRef) -> ir.IrValue:
        key = (ref.register, ref.index)
        cached = self._qubits.get(key)
        if cached is not None:
            return cached
        array = self.symbol_table.get(ref.register)
        if array is None:
            raise UnknownRegister(f"quantum register {ref.register!r} was never allocated")
        index = self.builder.build_op("std.constant", {"value": ref.index}, result_types=[ir.I64]).result
        qubit = self.builder.build_op("quantum.qextract", {}, [array, index]).result
        self._qubits[key] = qubit
        return qubit

    def finalize_mlirgen(self) -> None:
        self._require("generated", action="finalize_mlirgen")
        self._emit_epilogue(list(self.symbol_table.values()))


def generate_module(
    program: ast.Program | str,
    add_entry_point: bool = True,
    file_name: str = "",
    include_resolver: IncludeResolver = None,
) -> ir.IrModule:
    """Run the whole OpenQASM generator on source text or a validated Program."""
    gen = OpenQasmMLIRGenerator(include_resolver, file_name or "<input>")
    gen.initialize_mlirgen(add_entry_point, file_name)
    if isinstance(program, str):
        gen.mlirgen(program)
    else:
        gen.mlirgen_program(inline_user_gates(program))
    gen.finalize_mlirgen()
    return gen.get_module()
