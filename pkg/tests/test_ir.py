import pytest

from qasmir import ir
from qasmir.errors import SignatureError
from qasmir.mlirgen import generate_module


def entry_builder():
    b = ir.ModuleBuilder()
    f = b.create_function("main", [ir.I32, ir.ARGV], ir.I32)
    return b, f


def hadamard_module(dealloc=True):
    b, f = entry_builder()
    b.build_op("quantum.init", {}, f.arguments)
    arr = b.build_op("quantum.qalloc", {"name": "qreg0", "size": 1}).result
    idx = b.build_op("std.constant", {"value": 0}, result_types=[ir.I64]).result
    qubit = b.build_op("quantum.qextract", {}, [arr, idx]).result
    b.build_op("quantum.inst", {"name": "h", "params": []}, [qubit])
    if dealloc:
        b.build_op("quantum.dealloc", {}, [arr])
    b.build_op("quantum.finalize")
    b.build_op("std.return", {"value": 0})
    return b.module


def codes(module):
    return [d.code for d in ir.verify_module(module)]


# --- build_op ---------------------------------------------------------------


def test_qalloc_has_one_array_result():
    b, _ = entry_builder()
    op = b.build_op("quantum.qalloc", {"name": "q", "size": 2})
    assert [r.type for r in op.results] == [ir.ARRAY]


def test_gate_inst_has_no_results_and_measure_has_one():
    b, _ = entry_builder()
    arr = b.build_op("quantum.qalloc", {"name": "q", "size": 1}).result
    idx = b.build_op("std.constant", {"value": 0}).result
    qubit = b.build_op("quantum.qextract", {}, [arr, idx]).result
    assert b.build_op("quantum.inst", {"name": "h", "params": []}, [qubit]).results == []
    mz = b.build_op("quantum.inst", {"name": "mz", "params": []}, [qubit])
    assert [r.type for r in mz.results] == [ir.RESULT]


def test_result_ids_are_fresh():
    b, f = entry_builder()
    a = b.build_op("quantum.qalloc", {"name": "a", "size": 1}).result
    c = b.build_op("quantum.qalloc", {"name": "c", "size": 1}).result
    assert len({v.id for v in [*f.arguments, a, c]}) == 4


@pytest.mark.parametrize(
    "name, attrs, operand_kinds",
    [
        ("quantum.qalloc", {"name": "q"}, []),
        ("quantum.qalloc", {"name": "q", "size": 2, "extra": 1}, []),
        ("quantum.qalloc", {"name": "q", "size": 0}, []),
        ("quantum.qalloc", {"name": 3, "size": 2}, []),
        ("quantum.qextract", {}, ["array"]),
        ("quantum.qextract", {}, ["array", "array"]),
        ("quantum.inst", {"name": "h", "params": []}, []),
        ("quantum.inst", {"name": "h", "params": [1]}, ["qubit"]),
        ("quantum.inst", {"name": "rx", "params": [float("inf")]}, ["qubit"]),
        ("quantum.inst", {"name": "h", "params": []}, ["array"]),
        ("quantum.inst", {"name": "mz", "params": []}, ["qubit", "qubit"]),
        ("quantum.dealloc", {}, ["qubit"]),
        ("quantum.init", {}, []),
        ("quantum.teleport", {}, []),
        ("std.constant", {"value": True}, []),
        ("llvm.frobnicate", {}, []),
    ],
)
def test_signature_errors(name, attrs, operand_kinds):
    b, _ = entry_builder()
    arr = b.build_op("quantum.qalloc", {"name": "r", "size": 2}).result
    idx = b.build_op("std.constant", {"value": 0}).result
    qubit = b.build_op("quantum.qextract", {}, [arr, idx]).result
    pool = {"array": arr, "qubit": qubit}
    with pytest.raises(SignatureError):
        b.build_op(name, attrs, [pool[k] for k in operand_kinds])


def test_every_quantum_op_is_buildable_or_rejected():
    assert set(ir.QUANTUM_OPS) == {"init", "finalize", "qalloc", "qextract", "inst", "dealloc", "set_qreg"}


def test_module_level_build_op():
    b, _ = entry_builder()
    op = ir.build_op(b, "quantum.qalloc", {"name": "q", "size": 3})
    assert op.full_name == "quantum.qalloc"
    assert b.current.body[-1] is op


# --- verify_module ----------------------------------------------------------


def test_verify_hadamard_module():
    assert ir.verify_module(hadamard_module()) == []


def test_verify_dominance_error():
    m = hadamard_module()
    body = m.functions[0].body
    body[2], body[3] = body[3], body[2]  # qextract before its index constant
    assert codes(m) == ["DominanceError"]


def test_verify_leak_is_warning():
    diags = ir.verify_module(hadamard_module(dealloc=False))
    assert [(d.code, d.severity) for d in diags] == [("LeakDiagnostic", "warning")]


def test_verify_double_dealloc():
    m = hadamard_module()
    f = m.functions[0]
    arr = f.body[1].results[0]
    f.body.insert(6, ir.IrOp("quantum", "dealloc", {}, [arr]))
    assert codes(m) == ["DoubleDealloc"]


def test_verify_use_after_dealloc():
    m = hadamard_module()
    f = m.functions[0]
    arr, idx = f.body[1].results[0], f.body[2].results[0]
    late = ir.IrOp("quantum", "qextract", {}, [arr, idx])
    late.results = [f.fresh_value(ir.QUBIT, late)]
    f.body.insert(6, late)
    assert codes(m) == ["UseAfterDealloc"]


def test_verify_missing_and_misplaced_terminator():
    m = hadamard_module()
    f = m.functions[0]
    ret = f.body.pop()
    assert codes(m) == ["MissingTerminator"]
    f.body.insert(0, ret)
    assert "MisplacedTerminator" in codes(m)


def test_verify_return_type():
    m = hadamard_module()
    m.functions[0].body[-1].attributes.clear()
    assert codes(m) == ["ReturnTypeError"]


def test_verify_unresolved_call():
    b = ir.ModuleBuilder(ir.IrModule(level="llvm"))
    b.create_function("main", [], ir.VOID)
    b.build_op("llvm.call", {"callee": "__quantum__rt__finalize"})
    b.build_op("llvm.return")
    assert codes(b.module) == ["UnresolvedCall"]
    b.declare_external("__quantum__rt__finalize", ir.VOID, [])
    assert codes(b.module) == []


def test_verify_duplicate_function():
    m = hadamard_module()
    m.functions.append(m.functions[0])
    assert "DuplicateFunction" in codes(m)


def test_verify_bad_signature_in_mutated_op():
    m = hadamard_module()
    m.functions[0].body[1].attributes["size"] = -1
    assert "SignatureError" in codes(m)


# --- printing ---------------------------------------------------------------


def test_print_hadamard_module():
    text = ir.print_module(hadamard_module())
    assert '"quantum.init"' in text
    assert '{name = "qreg0", size = 1}' in text
    assert '"quantum.dealloc"' in text
    assert '"quantum.finalize"() : () -> ()' in text
    assert text.startswith("module {\n  func @main(%0: i32, %1: !quantum.ArgvType) -> i32 {\n")


def test_print_empty_module():
    assert ir.print_module(ir.IrModule()) == "module {\n}\n"


def test_print_is_deterministic(bell_source):
    m = generate_module(bell_source)
    assert ir.print_module(m) == ir.print_module(m)
    assert ir.print_module(m) == ir.print_module(generate_module(bell_source))


def test_print_numbers_values_in_definition_order():
    text = ir.print_module(hadamard_module())
    defined = [line.split(" = ", 1)[0].strip() for line in text.splitlines() if line.strip().startswith("%")]
    assert defined == ["%2", "%3", "%4"]


@pytest.mark.parametrize("value", [0.1, 1 / 3, 1e-300, -2.5e17, 3.0])
def test_float_attributes_round_trip(value):
    text = ir.format_attr(value)
    assert float(text) == value


def test_format_attr_list_and_string():
    assert ir.format_attr([1.0, 0.5]) == "[1.0, 0.5]"
    assert ir.format_attr('a"b') == '"a\\"b"'


# --- structural equality ----------------------------------------------------


def test_structural_equality_ignores_numbering(bell_source):
    a = generate_module(bell_source)
    b = generate_module(bell_source)
    assert ir.structurally_equal(a, b)
    b.functions[0].body[4].attributes["name"] = "x"
    assert not ir.structurally_equal(a, b)


def test_use_def_closure(bell_source):
    m = generate_module(bell_source)
    f = m.functions[0]
    defined = {id(a) for a in f.arguments} | {id(r) for op in f.body for r in op.results}
    used = {id(v) for op in f.body for v in op.operands}
    assert used <= defined
