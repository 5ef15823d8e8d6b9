"""Textual LLVM IR (``.ll``) for lowered modules, and a parser for the same subset.

The emitted text uses typed pointers (``%Qubit*``) and inlines integer and
double constants as immediate operands. Value-producing instructions are
numbered ``%0, %1, ...`` per function.
"""

from __future__ import annotations

import re
import struct

from qasmir import ir
from qasmir.errors import LegalityError, QirParseError
from qasmir.lowering import LLVM_TARGET

_TYPE_FROM_LL = {ir.IrType(k).ll_str(): ir.IrType(k) for k in ir._LL_SPELLING}
_TYPE_FROM_LL.update({f"i{w}": ir.IrType("Int", w) for w in (1, 8, 32, 64)})

_OPAQUE_ORDER = ("Array", "Qubit", "Result", "qreg")


def format_double(value: float) -> str:
    # 17 significant digits in exponent form: exact, and always LLVM-lexable.
    return f"{value:.16e}"


def _module_types(module: ir.IrModule) -> set[str]:
    kinds: set[str] = set()
    for sig in module.declared_externals.values():
        kinds.update(t.kind for t in (sig.result, *sig.args))
    for func in module.functions:
        kinds.update(a.type.kind for a in func.arguments)
        kinds.add(func.result_type.kind)
        for op in func.body:
            kinds.update(r.type.kind for r in op.results)
    if "QubitPtrPtr" in kinds:
        kinds.add("Qubit")
    return kinds


def _arg_names(func: ir.IrFunction) -> list[str]:
    types = [a.type for a in func.arguments]
    if func.name == "main" and types == [ir.I32, ir.ARGV]:
        return ["argc", "argv"]
    if types == [ir.QREG]:
        return ["q"]
    return [f"arg{i}" for i in range(len(types))]


def emit_llvm_ir(module: ir.IrModule) -> str:
    """Render a legal LLVM-dialect module as ``.ll`` text."""
    bad = LLVM_TARGET.illegal_ops(module)
    if bad:
        raise LegalityError(bad)
    kinds = _module_types(module)
    lines = [f"%{k} = type opaque" for k in _OPAQUE_ORDER if k in kinds or k in ("Array", "Qubit")]
    lines.append("")
    for name, sig in module.declared_externals.items():
        args = ", ".join(t.ll_str() for t in sig.args)
        lines.append(f"declare {sig.result.ll_str()} @{name}({args})")
    for func in module.functions:
        lines.append("")
        lines.extend(_emit_function(func))
    return "\n".join(lines) + "\n"


def _emit_function(func: ir.IrFunction) -> list[str]:
    names: dict[int, str] = {}
    consts: dict[int, str] = {}
    for arg, name in zip(func.arguments, _arg_names(func)):
        names[id(arg)] = f"%{name}"
    params = ", ".join(f"{a.type.ll_str()} {names[id(a)]}" for a in func.arguments)
    out = [f"define {func.result_type.ll_str()} @{func.name}({params}) {{", "entry:"]
    counter = 0

    def operand(v: ir.IrValue) -> str:
        text = consts.get(id(v)) or names[id(v)]
        return f"{v.type.ll_str()} {text}"

    def fresh(v: ir.IrValue) -> str:
        nonlocal counter
        names[id(v)] = f"%{counter}"
        counter += 1
        return names[id(v)]

    for op in func.body:
        name = op.full_name
        if name == "llvm.mlir.constant":
            value = op.attributes["value"]
            consts[id(op.results[0])] = format_double(value) if isinstance(value, float) else str(value)
        elif name == "llvm.call":
            args = ", ".join(operand(v) for v in op.operands)
            ret = op.results[0].type.ll_str() if op.results else "void"
            call = f"call {ret} @{op.attributes['callee']}({args})"
            out.append(f"  {fresh(op.results[0])} = {call}" if op.results else f"  {call}")
        elif name == "llvm.bitcast":
            src = op.operands[0]
            dst = op.results[0]
            out.append(f"  {fresh(dst)} = bitcast {operand(src)} to {dst.type.ll_str()}")
        elif name == "llvm.load":
            src = op.operands[0]
            dst = op.results[0]
            out.append(f"  {fresh(dst)} = load {dst.type.ll_str()}, {operand(src)}")
        elif name == "llvm.return":
            if op.operands:
                out.append(f"  ret {operand(op.operands[0])}")
            elif "value" in op.attributes:
                out.append(f"  ret {func.result_type.ll_str()} {op.attributes['value']}")
            else:
                out.append("  ret void")
        else:
            raise LegalityError([op])
    out.append("}")
    return out


# --- parsing -------------------------------------------------------------

_NAME = r"[-A-Za-z$._0-9]+"
_TYPE = r"(?:i1|i8|i32|i64|double|void|%[A-Za-z_][A-Za-z0-9_.]*)\**"
_RE_TYPEDEF = re.compile(rf"^%({_NAME})\s*=\s*type\s+opaque$")
_RE_DECLARE = re.compile(rf"^declare\s+({_TYPE})\s+@({_NAME})\s*\((.*)\)$")
_RE_DEFINE = re.compile(rf"^define\s+({_TYPE})\s+@({_NAME})\s*\((.*)\)\s*\{{$")
_RE_LABEL = re.compile(rf"^({_NAME}):$")
_RE_CALL = re.compile(rf"^(?:%({_NAME})\s*=\s*)?call\s+({_TYPE})\s+@({_NAME})\s*\((.*)\)$")
_RE_BITCAST = re.compile(rf"^%({_NAME})\s*=\s*bitcast\s+({_TYPE})\s+(\S+)\s+to\s+({_TYPE})$")
_RE_LOAD = re.compile(rf"^%({_NAME})\s*=\s*load\s+({_TYPE})\s*,\s*({_TYPE})\s+(\S+)$")
_RE_RET = re.compile(rf"^ret\s+({_TYPE})(?:\s+(\S+))?$")
_RE_INT = re.compile(r"^-?\d+$")
_RE_FLOAT = re.compile(r"^[-+]?\d+\.\d*(?:[eE][-+]?\d+)?$")
_RE_HEX = re.compile(r"^0x[0-9A-Fa-f]{16}$")


def _split_args(text: str) -> list[str]:
    text = text.strip()
    return [a.strip() for a in text.split(",")] if text else []


class _QirParser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.builder = ir.ModuleBuilder(ir.IrModule(level="llvm"))
        self.values: dict[str, ir.IrValue] = {}
        self.lineno = 0
        self.calls: list[tuple[int, str]] = []

    def fail(self, message: str) -> QirParseError:
        return QirParseError(self.lineno, message)

    def type_of(self, text: str) -> ir.IrType:
        t = _TYPE_FROM_LL.get(text.strip())
        if t is None:
            raise self.fail(f"unsupported type {text.strip()!r}")
        return t

    def parse(self) -> ir.IrModule:
        in_function = False
        labels = 0
        for self.lineno, raw in enumerate(self.lines, start=1):
            line = raw.split(";", 1)[0].strip()
            if not line:
                continue
            if in_function:
                if line == "}":
                    if self.builder.current.terminator is None:
                        raise self.fail(f"function @{self.builder.current.name} has no ret")
                    in_function = False
                elif _RE_LABEL.match(line):
                    labels += 1
                    if labels > 1:
                        raise self.fail("only single-block functions are supported")
                else:
                    if self.builder.current.terminator is not None:
                        raise self.fail("instruction after ret")
                    self.parse_instruction(line)
                continue
            if _RE_TYPEDEF.match(line):
                continue
            m = _RE_DECLARE.match(line)
            if m:
                ret, name, args = m.groups()
                arg_types = [self.type_of(a) for a in _split_args(args)]
                self.builder.declare_external(name, self.type_of(ret), arg_types)
                continue
            m = _RE_DEFINE.match(line)
            if m:
                self.start_function(*m.groups())
                in_function = True
                labels = 0
                continue
            raise self.fail(f"unsupported top-level line {line!r}")
        if in_function:
            raise self.fail("unterminated function body")
        module = self.builder.module
        known = set(module.declared_externals) | {f.name for f in module.functions}
        for lineno, callee in self.calls:
            if callee not in known:
                raise QirParseError(lineno, f"call to undeclared function @{callee}")
        return module

    def start_function(self, ret: str, name: str, params: str) -> None:
        types, names = [], []
        for p in _split_args(params):
            parts = p.rsplit(None, 1)
            if len(parts) != 2 or not parts[1].startswith("%"):
                raise self.fail(f"malformed parameter {p!r}")
            types.append(self.type_of(parts[0]))
            names.append(parts[1][1:])
        func = self.builder.create_function(name, types, self.type_of(ret))
        self.values = dict(zip(names, func.arguments))

    def define(self, name: str, value: ir.IrValue) -> None:
        if name in self.values:
            raise self.fail(f"%{name} is defined twice")
        self.values[name] = value

    def operand(self, type_text: str, token: str) -> ir.IrValue:
        type_ = self.type_of(type_text)
        if token.startswith("%"):
            value = self.values.get(token[1:])
            if value is None:
                raise self.fail(f"use of undefined value {token}")
            if value.type != type_:
                raise self.fail(f"{token} has type {value.type.ll_str()}, used as {type_text}")
            return value
        if type_.kind == "Int" and _RE_INT.match(token):
            return self.builder.build_op("llvm.mlir.constant", {"value": int(token)}, result_types=[type_]).result
        if type_ == ir.F64 and (_RE_FLOAT.match(token) or _RE_HEX.match(token)):
            if token.startswith("0x"):
                value = struct.unpack(">d", bytes.fromhex(token[2:]))[0]
            else:
                value = float(token)
            return self.builder.build_op("llvm.mlir.constant", {"value": value}, result_types=[type_]).result
        raise self.fail(f"malformed operand {type_text} {token}")

    def parse_instruction(self, line: str) -> None:
        build = self.builder.build_op
        m = _RE_CALL.match(line)
        if m:
            target, ret, callee, args = m.groups()
            operands = []
            for a in _split_args(args):
                parts = a.rsplit(None, 1)
                if len(parts) != 2:
                    raise self.fail(f"malformed call argument {a!r}")
                operands.append(self.operand(*parts))
            ret_type = self.type_of(ret)
            if (ret_type == ir.VOID) != (target is None):
                raise self.fail("void calls cannot be named and non-void calls must be")
            op = build("llvm.call", {"callee": callee}, operands, [] if ret_type == ir.VOID else [ret_type])
            self.calls.append((self.lineno, callee))
            if target is not None:
                self.define(target, op.result)
            return
        m = _RE_BITCAST.match(line)
        if m:
            target, src_type, src, dst_type = m.groups()
            op = build("llvm.bitcast", {}, [self.operand(src_type, src)], [self.type_of(dst_type)])
            self.define(target, op.result)
            return
        m = _RE_LOAD.match(line)
        if m:
            target, val_type, ptr_type, src = m.groups()
            if self.type_of(val_type) != ir.QUBIT or self.type_of(ptr_type) != ir.QUBIT_PTR_PTR:
                raise self.fail("only %Qubit* loads are supported")
            op = build("llvm.load", {}, [self.operand(ptr_type, src)])
            self.define(target, op.result)
            return
        m = _RE_RET.match(line)
        if m:
            ret_type, value = m.groups()
            func = self.builder.current
            if self.type_of(ret_type) != func.result_type:
                raise self.fail(f"ret {ret_type} in a function returning {func.result_type.ll_str()}")
            if value is None:
                if func.result_type != ir.VOID:
                    raise self.fail("missing return value")
                build("llvm.return")
            elif _RE_INT.match(value) and func.result_type == ir.I32:
                build("llvm.return", {"value": int(value)})
            else:
                build("llvm.return", {}, [self.operand(ret_type, value)])
            return
        opcode = line.split("=", 1)[-1].split()[0] if line else line
        raise self.fail(f"unsupported instruction {opcode!r}")


def parse_qir_text(text: str) -> ir.IrModule:
    """Parse ``.ll`` text in the subset produced by :func:`emit_llvm_ir`."""
    return _QirParser(text).parse()
