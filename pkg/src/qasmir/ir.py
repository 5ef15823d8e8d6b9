"""SSA intermediate representation: the ``quantum`` dialect plus the small
``std``/``llvm`` op sets it is lowered to.

A module holds functions; a function holds a flat list of ops ending in a
single return. Quantum ops are only constructible through
:meth:`ModuleBuilder.build_op`, which enforces the signature table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence, Union

from qasmir.errors import Diagnostic, SignatureError

# --- types ---------------------------------------------------------------


@dataclass(frozen=True)
class IrType:
    kind: str  # Array Qubit Result qreg Argv Int Float64 Void BytePtr QubitPtrPtr
    width: Optional[int] = None

    def __post_init__(self):
        if self.kind == "Int" and self.width not in (1, 8, 32, 64):
            raise ValueError(f"unsupported integer width {self.width}")

    @property
    def is_opaque(self) -> bool:
        return self.kind in _OPAQUE

    def quantum_str(self) -> str:
        if self.kind == "Int":
            return f"i{self.width}"
        return _QUANTUM_SPELLING[self.kind]

    def llvm_dialect_str(self) -> str:
        if self.kind == "Int":
            return f"i{self.width}"
        return _LLVM_DIALECT_SPELLING[self.kind]

    def ll_str(self) -> str:
        if self.kind == "Int":
            return f"i{self.width}"
        return _LL_SPELLING[self.kind]

    def __str__(self) -> str:
        return self.quantum_str()


_OPAQUE = {"Array", "Qubit", "Result", "qreg", "Argv"}
_QUANTUM_SPELLING = {
    "Array": "!quantum.Array",
    "Qubit": "!quantum.Qubit",
    "Result": "!quantum.Result",
    "qreg": "!quantum.qreg",
    "Argv": "!quantum.ArgvType",
    "Float64": "f64",
    "Void": "none",
    "BytePtr": "!llvm.ptr<i8>",
    "QubitPtrPtr": '!llvm.ptr<ptr<struct<"Qubit", opaque>>>',
}
_LLVM_DIALECT_SPELLING = {
    "Array": '!llvm.ptr<struct<"Array", opaque>>',
    "Qubit": '!llvm.ptr<struct<"Qubit", opaque>>',
    "Result": '!llvm.ptr<struct<"Result", opaque>>',
    "qreg": '!llvm.ptr<struct<"qreg", opaque>>',
    "Argv": "!llvm.ptr<ptr<i8>>",
    "Float64": "f64",
    "Void": "!llvm.void",
    "BytePtr": "!llvm.ptr<i8>",
    "QubitPtrPtr": '!llvm.ptr<ptr<struct<"Qubit", opaque>>>',
}
_LL_SPELLING = {
    "Array": "%Array*",
    "Qubit": "%Qubit*",
    "Result": "%Result*",
    "qreg": "%qreg*",
    "Argv": "i8**",
    "Float64": "double",
    "Void": "void",
    "BytePtr": "i8*",
    "QubitPtrPtr": "%Qubit**",
}

ARRAY = IrType("Array")
QUBIT = IrType("Qubit")
RESULT = IrType("Result")
QREG = IrType("qreg")
ARGV = IrType("Argv")
I1 = IrType("Int", 1)
I8 = IrType("Int", 8)
I32 = IrType("Int", 32)
I64 = IrType("Int", 64)
F64 = IrType("Float64")
VOID = IrType("Void")
I8_PTR = IrType("BytePtr")
QUBIT_PTR_PTR = IrType("QubitPtrPtr")

AttrValue = Union[int, float, str, list]

# --- values, ops, containers ---------------------------------------------


@dataclass(eq=False)
class IrValue:
    id: int
    type: IrType
    defining_op: Optional["IrOp"] = None  # None for function arguments

    def __repr__(self) -> str:
        return f"%{self.id}:{self.type}"


@dataclass(eq=False)
class IrOp:
    dialect: str
    name: str
    attributes: dict[str, AttrValue] = field(default_factory=dict)
    operands: list[IrValue] = field(default_factory=list)
    results: list[IrValue] = field(default_factory=list)

    @property
    def full_name(self) -> str:
        return f"{self.dialect}.{self.name}"

    @property
    def result(self) -> IrValue:
        if len(self.results) != 1:
            raise ValueError(f"{self.full_name} has {len(self.results)} results")
        return self.results[0]

    @property
    def is_terminator(self) -> bool:
        return self.full_name in TERMINATORS

    def __repr__(self) -> str:
        return f"<IrOp {self.full_name} {self.attributes}>"


TERMINATORS = frozenset({"std.return", "llvm.return"})


@dataclass(frozen=True)
class ExternSignature:
    result: IrType
    args: tuple[IrType, ...]


@dataclass(eq=False)
class IrFunction:
    name: str
    arguments: list[IrValue]
    result_type: IrType = VOID
    body: list[IrOp] = field(default_factory=list)
    next_id: int = 0

    def fresh_value(self, type_: IrType, op: Optional[IrOp] = None) -> IrValue:
        value = IrValue(self.next_id, type_, op)
        self.next_id += 1
        return value

    @property
    def terminator(self) -> Optional[IrOp]:
        return self.body[-1] if self.body and self.body[-1].is_terminator else None

    @property
    def signature(self) -> ExternSignature:
        return ExternSignature(self.result_type, tuple(a.type for a in self.arguments))


@dataclass(eq=False)
class IrModule:
    functions: list[IrFunction] = field(default_factory=list)
    declared_externals: dict[str, ExternSignature] = field(default_factory=dict)
    level: str = "quantum"  # quantum | llvm

    def function(self, name: str) -> IrFunction:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def ops(self) -> Iterable[IrOp]:
        for f in self.functions:
            yield from f.body


# --- signature table -----------------------------------------------------

MEASURE_NAMES = frozenset({"mz", "measure"})

# name -> (attribute kinds, operand types or None when variadic qubits)
QUANTUM_OPS: dict[str, tuple[dict[str, type], Optional[tuple[IrType, ...]]]] = {
    "init": ({}, (I32, ARGV)),
    "finalize": ({}, ()),
    "qalloc": ({"name": str, "size": int}, ()),
    "qextract": ({}, (ARRAY, I64)),
    "inst": ({"name": str, "params": list}, None),
    "dealloc": ({}, (ARRAY,)),
    "set_qreg": ({}, (QREG,)),
}

OTHER_OPS = frozenset(
    {
        "std.constant",
        "std.return",
        "llvm.mlir.constant",
        "llvm.call",
        "llvm.bitcast",
        "llvm.load",
        "llvm.return",
    }
)


def _check_attributes(full_name: str, attributes: dict, required: dict[str, type]) -> None:
    if set(attributes) != set(required):
        missing = sorted(set(required) - set(attributes))
        extra = sorted(set(attributes) - set(required))
        raise SignatureError(f"{full_name}: attributes mismatch (missing {missing}, unexpected {extra})")
    for key, kind in required.items():
        value = attributes[key]
        ok = isinstance(value, kind) and not (kind is int and isinstance(value, bool))
        if not ok:
            raise SignatureError(f"{full_name}: attribute {key!r} must be {kind.__name__}, got {value!r}")


def quantum_result_types(name: str, attributes: dict, operand_types: Sequence[IrType]) -> list[IrType]:
    """Check a quantum op against the signature table and return its result types."""
    full = f"quantum.{name}"
    if name not in QUANTUM_OPS:
        raise SignatureError(f"unknown quantum op {full!r}")
    attr_spec, operand_spec = QUANTUM_OPS[name]
    _check_attributes(full, attributes, attr_spec)
    if operand_spec is None:
        if not operand_types:
            raise SignatureError(f"{full}: needs at least one qubit operand")
        for i, t in enumerate(operand_types):
            if t != QUBIT:
                raise SignatureError(f"{full}: operand {i} must be {QUBIT}, got {t}")
        params = attributes["params"]
        if not all(isinstance(p, float) for p in params):
            raise SignatureError(f"{full}: params must be a list of floats, got {params!r}")
        if not all(math.isfinite(p) for p in params):
            raise SignatureError(f"{full}: params must be finite")
    else:
        if len(operand_types) != len(operand_spec):
            raise SignatureError(f"{full}: expects {len(operand_spec)} operand(s), got {len(operand_types)}")
        for i, (got, want) in enumerate(zip(operand_types, operand_spec)):
            if got != want:
                raise SignatureError(f"{full}: operand {i} must be {want}, got {got}")
    if name == "qalloc":
        if attributes["size"] < 1:
            raise SignatureError(f"{full}: size must be positive")
        return [ARRAY]
    if name == "qextract":
        return [QUBIT]
    if name == "inst" and attributes["name"] in MEASURE_NAMES:
        if len(operand_types) != 1:
            raise SignatureError(f"{full}: measurement takes exactly one qubit")
        return [RESULT]
    return []


def _check_other(full_name: str, attributes: dict, operand_types: Sequence[IrType], result_types) -> list[IrType]:
    if full_name not in OTHER_OPS:
        raise SignatureError(f"unknown op {full_name!r}")
    if full_name in ("std.constant", "llvm.mlir.constant"):
        if set(attributes) != {"value"} or isinstance(attributes["value"], bool):
            raise SignatureError(f"{full_name}: requires exactly a numeric 'value' attribute")
        value = attributes["value"]
        if operand_types:
            raise SignatureError(f"{full_name}: takes no operands")
        if result_types is None:
            if isinstance(value, int):
                return [I64]
            if isinstance(value, float):
                return [F64]
            raise SignatureError(f"{full_name}: value must be int or float")
        if len(result_types) != 1:
            raise SignatureError(f"{full_name}: produces exactly one result")
        want_int = result_types[0].kind == "Int"
        if want_int != isinstance(value, int):
            raise SignatureError(f"{full_name}: value {value!r} does not match {result_types[0]}")
        return list(result_types)
    if full_name in TERMINATORS:
        if set(attributes) - {"value"}:
            raise SignatureError(f"{full_name}: only a 'value' attribute is allowed")
        if len(operand_types) > 1 or (operand_types and attributes):
            raise SignatureError(f"{full_name}: returns at most one value")
        if result_types:
            raise SignatureError(f"{full_name}: has no results")
        return []
    if full_name == "llvm.call":
        if set(attributes) != {"callee"} or not isinstance(attributes["callee"], str):
            raise SignatureError("llvm.call: requires a string 'callee' attribute")
        return list(result_types or [])
    if full_name == "llvm.bitcast":
        if len(operand_types) != 1 or not result_types or len(result_types) != 1:
            raise SignatureError("llvm.bitcast: one operand, one result")
        return list(result_types)
    if full_name == "llvm.load":
        if len(operand_types) != 1 or operand_types[0] != QUBIT_PTR_PTR:
            raise SignatureError("llvm.load: operand must be a qubit pointer pointer")
        return [QUBIT]
    raise SignatureError(f"unknown op {full_name!r}")  # pragma: no cover


def result_types_for(full_name: str, attributes: dict, operand_types, result_types=None) -> list[IrType]:
    dialect, _, name = full_name.partition(".")
    if dialect == "quantum":
        if result_types is not None:
            expected = quantum_result_types(name, attributes, operand_types)
            if list(result_types) != expected:
                raise SignatureError(f"{full_name}: results must be {expected}")
        return quantum_result_types(name, attributes, operand_types)
    return _check_other(full_name, attributes, operand_types, result_types)


# --- builder -------------------------------------------------------------


class ModuleBuilder:
    """Appends ops to the current function of a module under construction."""

    def __init__(self, module: Optional[IrModule] = None):
        self.module = module or IrModule()
        self.current: Optional[IrFunction] = None

    def create_function(self, name: str, arg_types: Sequence[IrType] = (), result_type: IrType = VOID) -> IrFunction:
        if any(f.name == name for f in self.module.functions):
            raise SignatureError(f"function @{name} already exists")
        func = IrFunction(name, [], result_type)
        func.arguments = [func.fresh_value(t) for t in arg_types]
        self.module.functions.append(func)
        self.current = func
        return func

    def declare_external(self, name: str, result: IrType, args: Sequence[IrType]) -> None:
        sig = ExternSignature(result, tuple(args))
        existing = self.module.declared_externals.get(name)
        if existing is not None and existing != sig:
            raise SignatureError(f"conflicting declarations of @{name}")
        self.module.declared_externals[name] = sig

    def build_op(
        self,
        full_name: str,
        attributes: Optional[dict[str, AttrValue]] = None,
        operands: Sequence[IrValue] = (),
        result_types: Optional[Sequence[IrType]] = None,
    ) -> IrOp:
        if self.current is None:
            raise SignatureError("no function is open")
        attributes = dict(attributes or {})
        operands = list(operands)
        types = result_types_for(full_name, attributes, [v.type for v in operands], result_types)
        dialect, _, name = full_name.partition(".")
        op = IrOp(dialect, name, attributes, operands)
        op.results = [self.current.fresh_value(t, op) for t in types]
        self.current.body.append(op)
        return op


def build_op(builder: ModuleBuilder, full_name: str, attributes=None, operands=(), result_types=None) -> IrOp:
    return builder.build_op(full_name, attributes, operands, result_types)


# --- verifier ------------------------------------------------------------


def verify_module(module: IrModule) -> list[Diagnostic]:
    """Check SSA dominance, op signatures, terminators, call resolution and
    register lifetimes. Returns diagnostics; an empty list means valid."""
    diags: list[Diagnostic] = []

    def report(code, message, severity="error"):
        diags.append(Diagnostic(code, message, severity=severity, filename="<ir>"))

    names = [f.name for f in module.functions]
    for name in sorted({n for n in names if names.count(n) > 1}):
        report("DuplicateFunction", f"function @{name} is defined more than once")
    callables: dict[str, ExternSignature] = dict(module.declared_externals)
    callables.update({f.name: f.signature for f in module.functions})

    for func in module.functions:
        where = f"@{func.name}"
        defined: set[int] = set()
        ids: set[int] = set()
        for arg in func.arguments:
            defined.add(id(arg))
            ids.add(arg.id)
        allocs: dict[int, list] = {}  # id(array value) -> [qalloc op, dealloc positions]
        for pos, op in enumerate(func.body):
            label = f"{where} op #{pos} {op.full_name}"
            for i, v in enumerate(op.operands):
                if id(v) not in defined:
                    report("DominanceError", f"{label}: operand {i} (%{v.id}) is used before its definition")
            try:
                expected = result_types_for(
                    op.full_name,
                    op.attributes,
                    [v.type for v in op.operands],
                    [r.type for r in op.results] if op.dialect != "quantum" else None,
                )
                if op.dialect == "quantum" and expected != [r.type for r in op.results]:
                    raise SignatureError(f"results must be {expected}")
            except SignatureError as exc:
                report("SignatureError", f"{label}: {exc}")
            if op.full_name == "llvm.call":
                callee = op.attributes.get("callee")
                sig = callables.get(callee)
                if sig is None:
                    report("UnresolvedCall", f"{label}: @{callee} is neither defined nor declared")
                else:
                    got_args = tuple(v.type for v in op.operands)
                    got_res = [r.type for r in op.results]
                    want_res = [] if sig.result == VOID else [sig.result]
                    if got_args != sig.args or got_res != want_res:
                        report("SignatureError", f"{label}: call does not match the signature of @{callee}")
            if op.is_terminator and pos != len(func.body) - 1:
                report("MisplacedTerminator", f"{label}: terminator is not the last op")
            if op.is_terminator:
                returned = op.operands[0].type if op.operands else (I32 if "value" in op.attributes else VOID)
                if returned != func.result_type:
                    report("ReturnTypeError", f"{label}: returns {returned}, function returns {func.result_type}")
            if op.full_name == "quantum.qalloc":
                allocs[id(op.results[0])] = [op, []]
            for v in op.operands:
                entry = allocs.get(id(v))
                if entry is None:
                    continue
                if entry[1] and op.full_name != "quantum.dealloc":
                    report("UseAfterDealloc", f"{label}: register %{v.id} is used after quantum.dealloc")
                if op.full_name == "quantum.dealloc":
                    entry[1].append(pos)
            for r in op.results:
                if r.id in ids:
                    report("DuplicateValue", f"{label}: SSA id %{r.id} is defined twice")
                ids.add(r.id)
                defined.add(id(r))
        if func.terminator is None:
            report("MissingTerminator", f"{where}: function does not end with a return")
        for op, deallocs in allocs.values():
            reg = op.attributes.get("name")
            if not deallocs:
                report("LeakDiagnostic", f"{where}: register {reg!r} is never deallocated", "warning")
            elif len(deallocs) > 1:
                report("DoubleDealloc", f"{where}: register {reg!r} is deallocated {len(deallocs)} times")
    return diags


# --- printer -------------------------------------------------------------


def format_attr(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = f"{value:.17g}"
        if not any(c in text for c in ".eEni"):
            text += ".0"
        return text
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_attr(v) for v in value) + "]"
    raise TypeError(f"unsupported attribute value {value!r}")


def print_module(module: IrModule) -> str:
    """Render ``module`` as dialect text, one op per line, SSA values as ``%N``
    numbered in definition order."""
    lowered = module.level == "llvm"
    spell = IrType.llvm_dialect_str if lowered else IrType.quantum_str
    lines = ["module {"]
    if lowered:
        for name, sig in module.declared_externals.items():
            args = ", ".join(spell(t) for t in sig.args)
            ret = "" if sig.result == VOID else f" -> {spell(sig.result)}"
            lines.append(f"  llvm.func @{name}({args}){ret}")
    for func in module.functions:
        numbering: dict[int, int] = {}

        def ref(v: IrValue) -> str:
            return f"%{numbering[id(v)]}" if id(v) in numbering else f"%<undef{v.id}>"

        for arg in func.arguments:
            numbering[id(arg)] = len(numbering)
        params = ", ".join(f"{ref(a)}: {spell(a.type)}" for a in func.arguments)
        keyword = "llvm.func" if lowered else "func"
        ret = "" if func.result_type == VOID else f" -> {spell(func.result_type)}"
        lines.append(f"  {keyword} @{func.name}({params}){ret} {{")
        for op in func.body:
            for r in op.results:
                numbering[id(r)] = len(numbering)
            lhs = ", ".join(ref(r) for r in op.results)
            lhs = f"{lhs} = " if lhs else ""
            attrs = ""
            if op.attributes:
                attrs = " {" + ", ".join(f"{k} = {format_attr(v)}" for k, v in op.attributes.items()) + "}"
            in_types = ", ".join(spell(v.type) for v in op.operands)
            out_types = ", ".join(spell(r.type) for r in op.results)
            operands = ", ".join(ref(v) for v in op.operands)
            lines.append(f'    {lhs}"{op.full_name}"({operands}){attrs} : ({in_types}) -> ({out_types})')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- structural comparison -----------------------------------------------

CONSTANT_OPS = frozenset({"std.constant", "llvm.mlir.constant"})


def canonical_form(module: IrModule) -> tuple:
    """A hashable summary of ``module`` with constants folded into their uses.

    Two modules with equal canonical forms compute the same thing with the
    same op sequence, regardless of SSA numbering or constant placement.
    """
    funcs = []
    for func in module.functions:
        refs: dict[int, tuple] = {}
        for i, arg in enumerate(func.arguments):
            refs[id(arg)] = ("arg", i)
        ops = []
        for op in func.body:
            if op.full_name in CONSTANT_OPS:
                r = op.results[0]
                refs[id(r)] = ("const", r.type, op.attributes["value"])
                continue
            attrs = tuple((k, tuple(v) if isinstance(v, list) else v) for k, v in op.attributes.items())
            operands = tuple(refs.get(id(v), ("undef", v.id)) for v in op.operands)
            ops.append((op.full_name, attrs, operands, tuple(r.type for r in op.results)))
            for j, r in enumerate(op.results):
                refs[id(r)] = ("val", len(ops) - 1, j)
        funcs.append((func.name, tuple(a.type for a in func.arguments), func.result_type, tuple(ops)))
    return (module.level, tuple(funcs), tuple(sorted(module.declared_externals.items())))


def structurally_equal(a: IrModule, b: IrModule) -> bool:
    return canonical_form(a) == canonical_form(b)
