"""Statevector-backed QIR runtime and interpreter."""

from qasmir.runtime.interpreter import Interpreter, interpret
from qasmir.runtime.runtime import (
    AcceleratorBuffer,
    ExecutionConfig,
    ExecutionReport,
    QuantumRuntime,
    QubitArray,
    format_counts,
    parse_runtime_args,
    rt_initialize,
)
from qasmir.runtime.statevector import SUPPORTED_GATES, StateVector, gate_matrix

__all__ = [
    "AcceleratorBuffer",
    "ExecutionConfig",
    "ExecutionReport",
    "Interpreter",
    "QuantumRuntime",
    "QubitArray",
    "SUPPORTED_GATES",
    "StateVector",
    "format_counts",
    "gate_matrix",
    "interpret",
    "parse_runtime_args",
    "rt_initialize",
]
