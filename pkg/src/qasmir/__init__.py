"""OpenQASM 2.0 to a quantum SSA dialect, QIR ``.ll`` text, and a statevector runtime."""

from qasmir.lowering import run_lowering
from qasmir.mlirgen import OpenQasmMLIRGenerator, generate_module
from qasmir.pipeline import compile_file, compile_source
from qasmir.qir import emit_llvm_ir, parse_qir_text
from qasmir.runtime import AcceleratorBuffer, ExecutionConfig, interpret

__version__ = "0.1.0"

__all__ = [
    "AcceleratorBuffer",
    "ExecutionConfig",
    "OpenQasmMLIRGenerator",
    "compile_file",
    "compile_source",
    "emit_llvm_ir",
    "generate_module",
    "interpret",
    "parse_qir_text",
    "run_lowering",
]
