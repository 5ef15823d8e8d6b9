"""Invariants checked over generated programs and circuits."""

import math
import random

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracle
import programs
from qasmir import ir
from qasmir.errors import has_errors
from qasmir.frontend import format_program, inline_user_gates, parse_program
from qasmir.lowering import LLVM_TARGET
from qasmir.mlirgen import generate_module
from qasmir.pipeline import compile_source
from qasmir.qir import emit_llvm_ir, parse_qir_text
from qasmir.runtime import ExecutionConfig, StateVector, interpret

PROPS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def program(seed, **kw):
    return programs.random_program(random.Random(seed), **kw)[0]


@PROPS
@given(seeds)
def test_format_parse_round_trip(seed):
    prog = parse_program(program(seed))
    assert parse_program(format_program(prog)) == prog


@PROPS
@given(seeds)
def test_inlining_is_idempotent(seed):
    once = inline_user_gates(parse_program(program(seed)))
    assert inline_user_gates(once) == once


@PROPS
@given(seeds)
def test_generation_is_deterministic(seed):
    src = program(seed)
    assert ir.print_module(generate_module(src)) == ir.print_module(generate_module(src))


@PROPS
@given(seeds, st.booleans())
def test_generated_ir_verifies_and_lowers(seed, entry):
    result = compile_source(program(seed), emit="mlir-llvm", add_entry_point=entry, filename="k.qasm")
    assert not has_errors(ir.verify_module(result.quantum))
    assert not has_errors(ir.verify_module(result.llvm))
    assert LLVM_TARGET.illegal_ops(result.llvm) == []


@PROPS
@given(seeds)
def test_gate_count_preserved_by_lowering(seed):
    result = compile_source(program(seed), emit="mlir-llvm")
    insts = sum(op.full_name == "quantum.inst" for op in result.quantum.ops())
    calls = sum(op.attributes.get("callee", "").startswith("__quantum__qis__") for op in result.llvm.ops())
    assert insts == calls


@PROPS
@given(seeds, st.booleans())
def test_ll_round_trip(seed, entry):
    result = compile_source(program(seed), add_entry_point=entry, filename="k.qasm")
    reparsed = parse_qir_text(result.text)
    assert ir.structurally_equal(reparsed, result.llvm)
    assert emit_llvm_ir(reparsed) == result.text


@PROPS
@given(seeds)
def test_norm_preserved(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    state = StateVector(n)
    for name, params, qubits in oracle.random_circuit(rng, n, 25):
        state.apply(name, params, qubits)
    assert math.isclose(state.norm(), 1.0, abs_tol=1e-10)


@PROPS
@given(seeds)
def test_circuit_unitary_columns(seed):
    # Running the circuit from each basis state reproduces the dense unitary.
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    circuit = oracle.random_circuit(rng, n, 10)
    expected = oracle.circuit_unitary(circuit, n)
    for col in range(1 << n):
        state = StateVector(n)
        state.amplitudes[:] = 0
        state.amplitudes[col] = 1
        for name, params, qubits in circuit:
            state.apply(name, params, qubits)
        assert np.allclose(state.amplitudes, expected[:, col], atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=60))
def test_shots_conserved_and_seeded(seed, shots):
    llvm = compile_source(program(seed, max_registers=2, max_gates=10)).llvm
    cfg = ExecutionConfig("nisq", shots, seed=seed)
    a = interpret(llvm, cfg)
    measures = sum(op.attributes.get("callee") == "__quantum__qis__mz" for op in llvm.ops())
    # Shots that record nothing are not counted.
    assert sum(a.counts.values()) == (shots if measures else 0)
    assert all(len(bits) == measures for bits in a.counts)
    assert a.same_outcome(interpret(llvm, cfg))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_measurement_probabilities_match_oracle(seed):
    # A collapsed qubit's outcome always has nonzero probability in the oracle state.
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    circuit = oracle.random_circuit(rng, n, 8)
    state = StateVector(n)
    for name, params, qubits in circuit:
        state.apply(name, params, qubits)
    expected = oracle.final_state(circuit, n)
    q = rng.randrange(n)
    p1 = sum(abs(expected[i]) ** 2 for i in range(1 << n) if (i >> q) & 1)
    assert math.isclose(state.probability_one(q), p1, abs_tol=1e-9)
    bit = state.measure(q, np.random.default_rng(seed))
    assert (p1 if bit else 1 - p1) > 1e-12
