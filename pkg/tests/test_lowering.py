import pytest

from qasmir import ir
from qasmir.errors import LegalityError, LoweringError
from qasmir.lowering import (
    LLVM_TARGET,
    QIS_NAMES,
    PassManager,
    QuantumToLLVMLoweringPass,
    qis_name,
    run_lowering,
)
from qasmir.mlirgen import generate_module
from qasmir.pipeline import compile_source


def lowered_body(src, **kw):
    m = run_lowering(generate_module(src, **kw))
    out = []
    for op in m.functions[0].body:
        if op.full_name == "llvm.call":
            out.append("call " + op.attributes["callee"].replace("__quantum__", ""))
        elif op.full_name == "llvm.mlir.constant":
            out.append(f"const {op.attributes['value']}")
        else:
            out.append(op.name)
    return m, out


def test_hadamard_lowering_sequence(hadamard_source):
    m, body = lowered_body(hadamard_source)
    assert body == [
        "call rt__initialize",
        "const 1",
        "call rt__qubit_allocate_array",
        "const 0",
        "call rt__array_get_element_ptr_1d",
        "bitcast",
        "load",
        "call qis__h",
        "call rt__qubit_release_array",
        "call rt__finalize",
        "return",
    ]
    assert m.level == "llvm"
    assert LLVM_TARGET.illegal_ops(m) == []


def test_empty_main():
    m, body = lowered_body("OPENQASM 2.0;")
    assert body == ["call rt__initialize", "call rt__finalize", "return"]
    assert list(m.declared_externals) == ["__quantum__rt__initialize", "__quantum__rt__finalize"]


def test_bell_declarations(bell_source):
    m, _ = lowered_body(bell_source)
    assert list(m.declared_externals) == [
        "__quantum__rt__initialize",
        "__quantum__rt__qubit_allocate_array",
        "__quantum__rt__array_get_element_ptr_1d",
        "__quantum__qis__h",
        "__quantum__qis__cnot",
        "__quantum__qis__mz",
        "__quantum__rt__qubit_release_array",
        "__quantum__rt__finalize",
    ]
    assert m.declared_externals["__quantum__qis__mz"] == ir.ExternSignature(ir.RESULT, (ir.QUBIT,))


def test_parameters_precede_qubits():
    m, _ = lowered_body('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];\nu3(0.1, 0.2, 0.3) q[0];')
    sig = m.declared_externals["__quantum__qis__u3"]
    assert sig.args == (ir.F64, ir.F64, ir.F64, ir.QUBIT)
    call = next(op for op in m.ops() if op.attributes.get("callee") == "__quantum__qis__u3")
    values = [v.defining_op.attributes["value"] for v in call.operands[:3]]
    assert values == [0.1, 0.2, 0.3]


def test_library_mode_lowering(bell_source):
    m, body = lowered_body(bell_source, add_entry_point=False, file_name="bell")
    assert body[0] == "call rt__set_qreg"
    assert "call rt__initialize" not in body and "call rt__finalize" not in body
    assert m.declared_externals["__quantum__rt__set_qreg"] == ir.ExternSignature(ir.VOID, (ir.QREG,))


def test_qis_names():
    assert qis_name("cx") == "__quantum__qis__cnot"
    assert qis_name("measure") == "__quantum__qis__mz"
    assert qis_name("H") == "__quantum__qis__h"
    assert qis_name("rzz") == "__quantum__qis__rzz"
    assert QIS_NAMES == {"cx": "cnot", "measure": "mz"}


def test_results_are_remapped(bell_source):
    q = generate_module(bell_source)
    m = run_lowering(q)
    assert ir.verify_module(m) == []
    load_results = {id(op.results[0]) for op in m.ops() if op.full_name == "llvm.load"}
    for op in m.ops():
        if op.attributes.get("callee", "").startswith("__quantum__qis__"):
            assert all(id(v) in load_results for v in op.operands)


def test_order_preservation(corpus):
    src = (corpus / "user_gates.qasm").read_text()
    q = generate_module(src)
    m = run_lowering(q)
    expected = [qis_name(op.attributes["name"]) for op in q.ops() if op.full_name == "quantum.inst"]
    got = [op.attributes["callee"] for op in m.ops() if op.attributes.get("callee", "").startswith("__quantum__qis__")]
    assert got == expected


def test_declaration_uniqueness(corpus):
    text = compile_source((corpus / "ghz.qasm").read_text()).text
    declares = [line.split("@")[1].split("(")[0] for line in text.splitlines() if line.startswith("declare")]
    assert len(declares) == len(set(declares))
    assert text.count("call void @__quantum__qis__cnot") == 4


def test_pattern_locality():
    base = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\nh q[0];\nx q[0];\ncx q[0], q[1];\n'
    removed = base.replace("x q[0];\n", "")
    a = compile_source(base).text.splitlines()
    b = compile_source(removed).text.splitlines()
    import difflib

    diff = [l for l in difflib.unified_diff(b, a, lineterm="", n=0) if l[:1] in "+-" and not l.startswith(("+++", "---"))]
    assert sorted(diff) == sorted(["+declare void @__quantum__qis__x(%Qubit*)", "+  call void @__quantum__qis__x(%Qubit* %4)"])


def test_unknown_quantum_op_raises():
    b = ir.ModuleBuilder()
    f = b.create_function("main", [], ir.VOID)
    f.body.append(ir.IrOp("quantum", "teleport"))
    f.body.append(ir.IrOp("std", "return"))
    with pytest.raises(LoweringError):
        run_lowering(b.module)


def test_legality_check_rejects_quantum_ops(hadamard_source):
    with pytest.raises(LegalityError):
        LLVM_TARGET.check(generate_module(hadamard_source))


def test_pass_manager_runs_passes_in_order(hadamard_source):
    seen = []

    class Probe(QuantumToLLVMLoweringPass):
        name = "probe"

        def run(self, module):
            seen.append(module.level)
            return super().run(module) if module.level == "quantum" else module

    pm = PassManager().add_pass(Probe()).add_pass(Probe())
    out = pm.run(generate_module(hadamard_source))
    assert seen == ["quantum", "llvm"]
    assert out.level == "llvm"
