"""The compile pipeline as one call, with per-phase timing."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from qasmir import ir
from qasmir.frontend.inline import inline_user_gates
from qasmir.frontend.parser import DirectoryIncludeResolver, parse_program
from qasmir.frontend.validate import validate
from qasmir.errors import FrontendError, has_errors
from qasmir.lowering import run_lowering
from qasmir.mlirgen import OpenQasmMLIRGenerator
from qasmir.qir import emit_llvm_ir

EMIT_KINDS = ("mlir", "mlir-llvm", "llvm")
PHASES = ("parse", "mlirgen", "lower", "emit")


@dataclass
class CompileResult:
    text: str
    quantum: ir.IrModule
    llvm: Optional[ir.IrModule]
    timings_ms: dict[str, float] = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def total_ms(self) -> float:
        return sum(self.timings_ms.values())


def compile_source(
    source: str,
    *,
    filename: str = "<input>",
    emit: str = "llvm",
    add_entry_point: bool = True,
    include_dirs: Sequence[str | Path] = (),
) -> CompileResult:
    """Compile OpenQASM text to quantum-dialect, llvm-dialect or ``.ll`` text."""
    if emit not in EMIT_KINDS:
        raise ValueError(f"emit must be one of {EMIT_KINDS}, got {emit!r}")
    timings: dict[str, float] = {}
    clock = time.perf_counter

    t = clock()
    resolver = DirectoryIncludeResolver(list(include_dirs)) if include_dirs else None
    program = parse_program(source, resolver, filename)
    diags = validate(program)
    if has_errors(diags):
        raise FrontendError(diags)
    program = inline_user_gates(program)
    timings["parse"] = (clock() - t) * 1000

    t = clock()
    gen = OpenQasmMLIRGenerator(resolver, filename)
    gen.initialize_mlirgen(add_entry_point, filename if not add_entry_point else "")
    gen.mlirgen_program(program)
    gen.finalize_mlirgen()
    quantum = gen.get_module()
    timings["mlirgen"] = (clock() - t) * 1000
    if emit == "mlir":
        return CompileResult(ir.print_module(quantum), quantum, None, timings, diags)

    t = clock()
    llvm = run_lowering(quantum)
    timings["lower"] = (clock() - t) * 1000
    if emit == "mlir-llvm":
        return CompileResult(ir.print_module(llvm), quantum, llvm, timings, diags)

    t = clock()
    text = emit_llvm_ir(llvm)
    timings["emit"] = (clock() - t) * 1000
    return CompileResult(text, quantum, llvm, timings, diags)


def compile_file(path: str | Path, **kwargs) -> CompileResult:
    path = Path(path)
    dirs = list(kwargs.pop("include_dirs", ())) + [path.parent]
    return compile_source(path.read_text(), filename=str(path), include_dirs=dirs, **kwargs)
