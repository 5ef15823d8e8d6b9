"""Drive the runtime API from a legal LLVM-dialect module or ``.ll`` text."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from qasmir import ir
from qasmir.errors import ExecutionError, QirRuntimeError
from qasmir.lowering import LLVM_TARGET, QIS, RT
from qasmir.qir import parse_qir_text
from qasmir.runtime.runtime import (
    AcceleratorBuffer,
    ExecutionConfig,
    ExecutionReport,
    QubitArray,
    QuantumRuntime,
    parse_runtime_args,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _QubitPtr:
    """What ``array_get_element_ptr_1d`` yields: an opaque pointer to a qubit slot."""

    qubit: int


@dataclass(frozen=True)
class _Step:
    op: ir.IrOp
    kind: str
    operands: tuple[int, ...]
    result: Optional[int]
    arg_kinds: tuple[str, ...] = ()


def _op_text(op: ir.IrOp) -> str:
    if op.full_name == "llvm.call":
        return f"call @{op.attributes['callee']}"
    return op.full_name


class Interpreter:
    def __init__(self, module: ir.IrModule, runtime: QuantumRuntime, argv: Sequence[str] = ()):
        LLVM_TARGET.check(module)
        self.module = module
        self.runtime = runtime
        self.argv = list(argv)
        self.functions = {f.name: f for f in module.functions}
        self._plans: dict[str, list[_Step]] = {}

    def _plan(self, func: ir.IrFunction) -> list[_Step]:
        plan = self._plans.get(func.name)
        if plan is None:
            plan = []
            for op in func.body:
                kind = op.full_name
                if kind == "llvm.call":
                    kind = op.attributes["callee"]
                plan.append(
                    _Step(
                        op,
                        kind,
                        tuple(id(v) for v in op.operands),
                        id(op.results[0]) if op.results else None,
                        tuple(v.type.kind for v in op.operands),
                    )
                )
            self._plans[func.name] = plan
        return plan

    def call(self, name: str, args: Sequence[object]):
        func = self.functions[name]
        env = {id(a): v for a, v in zip(func.arguments, args)}
        for position, step in enumerate(self._plan(func)):
            try:
                if step.kind == "llvm.return":
                    if step.operands:
                        return env[step.operands[0]]
                    return step.op.attributes.get("value")
                value = self._execute(step, [env[i] for i in step.operands])
            except ExecutionError:
                raise
            except (QirRuntimeError, ArithmeticError, KeyError, TypeError, ValueError) as exc:
                raise ExecutionError(name, position, _op_text(step.op), exc) from exc
            if step.result is not None:
                env[step.result] = value
        raise ExecutionError(name, len(func.body), "<end>", QirRuntimeError("function has no return"))

    def _execute(self, step: _Step, args: list):
        rt = self.runtime
        kind = step.kind
        if kind == "llvm.mlir.constant":
            return step.op.attributes["value"]
        if kind == "llvm.bitcast":
            return args[0]
        if kind == "llvm.load":
            ptr = args[0]
            if not isinstance(ptr, _QubitPtr):
                raise QirRuntimeError("load from a pointer that is not a qubit slot")
            return ptr.qubit
        if kind.startswith(QIS):
            gate = kind[len(QIS):]
            params = [float(a) for a, k in zip(args, step.arg_kinds) if k == "Float64"]
            qubits = [a for a, k in zip(args, step.arg_kinds) if k == "Qubit"]
            return rt.apply(gate, params, qubits)
        if kind == RT + "initialize":
            return 0
        if kind == RT + "qubit_allocate_array":
            return rt.qubit_allocate_array(int(args[0]))
        if kind == RT + "array_get_element_ptr_1d":
            arr = args[0]
            if not isinstance(arr, QubitArray):
                raise QirRuntimeError("array operand is not a qubit array")
            return _QubitPtr(rt.array_get_element(arr, int(args[1])))
        if kind == RT + "qubit_release_array":
            rt.qubit_release_array(args[0])
            return None
        if kind == RT + "set_qreg":
            buffer = args[0]
            if not isinstance(buffer, AcceleratorBuffer):
                raise QirRuntimeError("set_qreg operand is not a buffer")
            rt.set_qreg(buffer)
            return None
        if kind == RT + "finalize":
            # Per-shot state release happens at the end of each shot.
            return None
        if kind in self.functions:
            return self.call(kind, args)
        raise QirRuntimeError(f"unsupported external function @{kind}")


def _entry_function(module: ir.IrModule, entry: Optional[str]) -> ir.IrFunction:
    if entry is not None:
        if entry not in {f.name for f in module.functions}:
            raise QirRuntimeError(f"no function named @{entry}")
        return module.function(entry)
    if "main" in {f.name for f in module.functions}:
        return module.function("main")
    kernels = [f for f in module.functions if [a.type for a in f.arguments] == [ir.QREG]]
    if len(kernels) == 1:
        return kernels[0]
    raise QirRuntimeError("module has no @main and no unique library kernel; pass entry=")


def interpret(
    module: ir.IrModule | str,
    config: Optional[ExecutionConfig] = None,
    *,
    entry: Optional[str] = None,
    qreg: Optional[AcceleratorBuffer] = None,
    argv: Sequence[str] = (),
) -> ExecutionReport:
    """Execute an entry point (``main``) or a library kernel taking one ``%qreg*``.

    In nisq mode the entry function is re-run once per shot. ``qreg`` is the
    buffer passed to a library kernel; one is created if omitted.
    """
    if isinstance(module, str):
        module = parse_qir_text(module)
    if config is None:
        config = parse_runtime_args(argv)
    runtime = QuantumRuntime(config)
    interp = Interpreter(module, runtime, argv)
    func = _entry_function(module, entry)

    types = [a.type for a in func.arguments]
    if types == [ir.I32, ir.ARGV]:
        args: list = [len(argv), list(argv)]
    elif types == [ir.QREG]:
        args = [qreg if qreg is not None else AcceleratorBuffer()]
    elif not types:
        args = []
    else:
        raise QirRuntimeError(f"cannot supply arguments of types {[t.ll_str() for t in types]} to @{func.name}")

    start = time.perf_counter()
    for shot in range(config.effective_shots):
        runtime.begin_shot(shot)
        interp.call(func.name, args)
        if shot == 0 and types == [ir.QREG] and not runtime.set_qreg_called:
            logger.warning("@%s never called set_qreg; results go to the internal buffer", func.name)
        runtime.end_shot()
    wall_ms = (time.perf_counter() - start) * 1000.0
    return runtime.finalize(wall_ms)
