"""Quantum dialect to LLVM dialect lowering.

Each quantum op has one :class:`ConversionPattern` that erases it and emits
the QIR runtime call sequence in its place. The pass rebuilds the module op
by op, so program order is preserved and every result is remapped through
one value map.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from qasmir import ir
from qasmir.errors import LegalityError, LoweringError

logger = logging.getLogger(__name__)

RT = "__quantum__rt__"
QIS = "__quantum__qis__"

# Frontend gate names whose QIR instruction name differs.
QIS_NAMES = {"cx": "cnot", "measure": "mz"}


def qis_name(gate: str) -> str:
    gate = gate.lower()
    return QIS + QIS_NAMES.get(gate, gate)


Declaration = tuple[str, ir.ExternSignature]


class Rewriter:
    """Builds replacement ops into the target function and tracks value remapping."""

    def __init__(self, builder: ir.ModuleBuilder):
        self.builder = builder
        self.value_map: dict[int, ir.IrValue] = {}
        self.created: list[ir.IrOp] = []

    def lookup(self, value: ir.IrValue) -> ir.IrValue:
        try:
            return self.value_map[id(value)]
        except KeyError:
            raise LoweringError(value.defining_op or ir.IrOp("?", "argument"), "operand was never lowered") from None

    def map(self, old: ir.IrValue, new: ir.IrValue) -> None:
        self.value_map[id(old)] = new

    def create(self, full_name: str, attributes=None, operands: Sequence[ir.IrValue] = (), result_types=None) -> ir.IrOp:
        op = self.builder.build_op(full_name, attributes, operands, result_types)
        self.created.append(op)
        return op

    def constant(self, value, type_: ir.IrType) -> ir.IrValue:
        return self.create("llvm.mlir.constant", {"value": value}, result_types=[type_]).result

    def call(self, callee: str, operands: Sequence[ir.IrValue], result: ir.IrType = ir.VOID) -> ir.IrOp:
        sig = self.builder.module.declared_externals.get(callee)
        if sig is None:
            raise LoweringError(ir.IrOp("llvm", "call", {"callee": callee}), "callee was not declared")
        return self.create("llvm.call", {"callee": callee}, operands, [] if result == ir.VOID else [result])

    def replace_op(self, op: ir.IrOp, new_results: Sequence[ir.IrValue]) -> None:
        if len(new_results) != len(op.results):
            raise LoweringError(op, f"replacement provides {len(new_results)} results for {len(op.results)}")
        for old, new in zip(op.results, new_results):
            self.map(old, new)


@dataclass(frozen=True)
class ConversionPattern:
    matches: str
    rewrite: Callable[[ir.IrOp, Rewriter], None]
    declares: Callable[[ir.IrOp], list[Declaration]]

    def apply(self, op: ir.IrOp, rewriter: Rewriter) -> list[ir.IrOp]:
        for name, sig in self.declares(op):
            rewriter.builder.declare_external(name, sig.result, sig.args)
        start = len(rewriter.created)
        self.rewrite(op, rewriter)
        return rewriter.created[start:]


def _sig(result: ir.IrType, *args: ir.IrType) -> ir.ExternSignature:
    return ir.ExternSignature(result, tuple(args))


RUNTIME_SIGNATURES: dict[str, ir.ExternSignature] = {
    RT + "initialize": _sig(ir.I32, ir.I32, ir.ARGV),
    RT + "qubit_allocate_array": _sig(ir.ARRAY, ir.I64),
    RT + "array_get_element_ptr_1d": _sig(ir.I8_PTR, ir.ARRAY, ir.I64),
    RT + "qubit_release_array": _sig(ir.VOID, ir.ARRAY),
    RT + "finalize": _sig(ir.VOID),
    RT + "set_qreg": _sig(ir.VOID, ir.QREG),
}


def _fixed(*names: str) -> Callable[[ir.IrOp], list[Declaration]]:
    decls = [(RT + n, RUNTIME_SIGNATURES[RT + n]) for n in names]
    return lambda op: decls


def inst_signature(op: ir.IrOp) -> ir.ExternSignature:
    params = [ir.F64] * len(op.attributes["params"])
    qubits = [ir.QUBIT] * len(op.operands)
    result = ir.RESULT if op.attributes["name"] in ir.MEASURE_NAMES else ir.VOID
    return ir.ExternSignature(result, tuple(params + qubits))


def _lower_init(op, rw: Rewriter) -> None:
    rw.call(RT + "initialize", [rw.lookup(v) for v in op.operands], ir.I32)


def _lower_qalloc(op, rw: Rewriter) -> None:
    size = rw.constant(op.attributes["size"], ir.I64)
    array = rw.call(RT + "qubit_allocate_array", [size], ir.ARRAY).result
    rw.replace_op(op, [array])


def _lower_qextract(op, rw: Rewriter) -> None:
    array, index = (rw.lookup(v) for v in op.operands)
    raw = rw.call(RT + "array_get_element_ptr_1d", [array, index], ir.I8_PTR).result
    cast = rw.create("llvm.bitcast", {}, [raw], [ir.QUBIT_PTR_PTR]).result
    qubit = rw.create("llvm.load", {}, [cast]).result
    rw.replace_op(op, [qubit])


def _lower_inst(op, rw: Rewriter) -> None:
    params = [rw.constant(float(p), ir.F64) for p in op.attributes["params"]]
    qubits = [rw.lookup(v) for v in op.operands]
    sig = inst_signature(op)
    call = rw.call(qis_name(op.attributes["name"]), params + qubits, sig.result)
    rw.replace_op(op, call.results)


def _lower_dealloc(op, rw: Rewriter) -> None:
    rw.call(RT + "qubit_release_array", [rw.lookup(op.operands[0])])


def _lower_finalize(op, rw: Rewriter) -> None:
    rw.call(RT + "finalize", [])


def _lower_set_qreg(op, rw: Rewriter) -> None:
    rw.call(RT + "set_qreg", [rw.lookup(op.operands[0])])


QUANTUM_TO_LLVM_PATTERNS: tuple[ConversionPattern, ...] = (
    ConversionPattern("quantum.init", _lower_init, _fixed("initialize")),
    ConversionPattern("quantum.qalloc", _lower_qalloc, _fixed("qubit_allocate_array")),
    ConversionPattern("quantum.qextract", _lower_qextract, _fixed("array_get_element_ptr_1d")),
    ConversionPattern("quantum.inst", _lower_inst, lambda op: [(qis_name(op.attributes["name"]), inst_signature(op))]),
    ConversionPattern("quantum.dealloc", _lower_dealloc, _fixed("qubit_release_array")),
    ConversionPattern("quantum.finalize", _lower_finalize, _fixed("finalize")),
    ConversionPattern("quantum.set_qreg", _lower_set_qreg, _fixed("set_qreg")),
)


@dataclass(frozen=True)
class LegalityTarget:
    legal_dialects: frozenset[str] = frozenset({"llvm"})

    def is_legal(self, op: ir.IrOp) -> bool:
        return op.dialect in self.legal_dialects

    def illegal_ops(self, module: ir.IrModule) -> list[ir.IrOp]:
        return [op for op in module.ops() if not self.is_legal(op)]

    def check(self, module: ir.IrModule) -> None:
        bad = self.illegal_ops(module)
        if bad:
            raise LegalityError(bad)


LLVM_TARGET = LegalityTarget()


class Pass(ABC):
    name = "pass"

    @abstractmethod
    def run(self, module: ir.IrModule) -> ir.IrModule: ...


class QuantumToLLVMLoweringPass(Pass):
    name = "quantum-to-llvm"

    def __init__(self, patterns: Iterable[ConversionPattern] = QUANTUM_TO_LLVM_PATTERNS, target: LegalityTarget = LLVM_TARGET):
        self.patterns = {p.matches: p for p in patterns}
        self.target = target

    def run(self, module: ir.IrModule) -> ir.IrModule:
        builder = ir.ModuleBuilder(ir.IrModule(level="llvm"))
        # Functions may call each other, so register all signatures first.
        for name, sig in module.declared_externals.items():
            builder.declare_external(name, sig.result, sig.args)
        for func in module.functions:
            new = builder.create_function(func.name, [a.type for a in func.arguments], func.result_type)
            rw = Rewriter(builder)
            for old, arg in zip(func.arguments, new.arguments):
                rw.map(old, arg)
            for op in func.body:
                self._lower_op(op, rw)
        lowered = builder.module
        self.target.check(lowered)
        return lowered

    def _lower_op(self, op: ir.IrOp, rw: Rewriter) -> None:
        if op.dialect == "quantum":
            pattern = self.patterns.get(op.full_name)
            if pattern is None:
                raise LoweringError(op)
            pattern.apply(op, rw)
        elif op.full_name == "std.constant":
            new = rw.constant(op.attributes["value"], op.results[0].type)
            rw.replace_op(op, [new])
        elif op.full_name == "std.return":
            rw.create("llvm.return", op.attributes, [rw.lookup(v) for v in op.operands])
        elif op.dialect == "llvm":
            clone = rw.create(op.full_name, op.attributes, [rw.lookup(v) for v in op.operands], [r.type for r in op.results])
            rw.replace_op(op, clone.results)
        else:
            raise LoweringError(op)


@dataclass
class PassManager:
    passes: list[Pass] = field(default_factory=list)

    def add_pass(self, p: Pass) -> "PassManager":
        self.passes.append(p)
        return self

    def run(self, module: ir.IrModule) -> ir.IrModule:
        for p in self.passes:
            logger.debug("running pass %s", p.name)
            module = p.run(module)
        return module


def run_lowering(module: ir.IrModule) -> ir.IrModule:
    """Lower a verified quantum-dialect module to a legal LLVM-dialect module."""
    return PassManager().add_pass(QuantumToLLVMLoweringPass()).run(module)
