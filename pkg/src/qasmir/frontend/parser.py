"""Recursive-descent parser for the supported OpenQASM 2.0 subset.

Whole-register arguments are broadcast at parse time, so every statement in
the resulting :class:`Program` addresses individual qubits and bits.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

from qasmir.errors import IncludeError, ParseError, VersionError
from qasmir.frontend import ast
from qasmir.frontend.gates import builtin_include_text
from qasmir.frontend.lexer import Token, tokenize

IncludeResolver = Union[Mapping, Callable[[str], Optional[str]], None]


class DirectoryIncludeResolver(Mapping):
    """Look up include names in an ordered list of directories."""

    def __init__(self, dirs: Iterable[str | Path]):
        self.dirs = [Path(d) for d in dirs]

    def _find(self, name: str) -> Path | None:
        for d in self.dirs:
            candidate = d / name
            if candidate.is_file():
                return candidate
        return None

    def __getitem__(self, name: str) -> str:
        path = self._find(name)
        if path is None:
            raise KeyError(name)
        return path.read_text(encoding="utf-8")

    def __contains__(self, name: object) -> bool:
        return isinstance(name, str) and self._find(name) is not None

    def __iter__(self):
        seen = set()
        for d in self.dirs:
            if d.is_dir():
                for p in sorted(d.iterdir()):
                    if p.is_file() and p.name not in seen:
                        seen.add(p.name)
                        yield p.name

    def __len__(self) -> int:
        return sum(1 for _ in self)


def _resolve(resolver: IncludeResolver, name: str) -> str | None:
    if name == "qelib1.inc":
        return builtin_include_text()
    if resolver is None:
        return None
    if isinstance(resolver, Mapping):
        return resolver.get(name)
    return resolver(name)


class _Parser:
    def __init__(self, tokens: list[Token], filename: str, resolver: IncludeResolver, state: dict):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename
        self.resolver = resolver
        # Shared across the main file and its includes.
        self.state = state
        self.origin: str | None = None

    # -- token helpers -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _location(self) -> tuple[int, int]:
        tok = self.peek()
        if tok is not None:
            return tok.line, tok.column
        if self.tokens:
            last = self.tokens[-1]
            return last.line, last.column + len(last.text)
        return 1, 1

    def error(self, expected: str, found: str | None = None) -> ParseError:
        line, col = self._location()
        if found is None:
            tok = self.peek()
            found = "end of input" if tok is None else f"{tok.kind} {tok.text!r}"
        return ParseError(line, col, expected, found, self.filename)

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text and tok.kind in ("symbol", "keyword")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(repr(text))
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_kind(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.error(what or kind)
        self.pos += 1
        return tok

    # -- top level ---------------------------------------------------------

    def parse_header(self) -> str:
        tok = self.peek()
        # Mixed-case spellings such as "OpenQASM" circulate widely; accept them.
        if tok is None or tok.text.upper() != "OPENQASM":
            raise self.error("'OPENQASM'")
        self.pos += 1
        ver = self.peek()
        if ver is None or ver.kind not in ("real", "integer"):
            raise self.error("version number")
        if float(ver.text) != 2.0:
            raise VersionError(ver.line, ver.column, "version 2.0", ver.text, self.filename)
        self.pos += 1
        self.expect(";")
        return "2.0"

    def parse_body(self, header_only: bool) -> None:
        while self.peek() is not None:
            tok = self.peek()
            if tok.text == "include" and tok.kind == "keyword":
                self.parse_include()
            elif tok.text == "gate" and tok.kind == "keyword":
                self.state["declarations"].append(self.parse_gate_def())
            elif header_only:
                raise self.error("gate definition (include files may only define gates)")
            elif tok.text in ("qreg", "creg"):
                self.parse_register()
            else:
                self.state["statements"].extend(self.parse_statement())

    def parse_include(self) -> None:
        start = self.expect("include")
        name_tok = self.expect_kind("string", "include file name")
        self.expect(";")
        name = name_tok.text[1:-1]
        if name in self.state["included"]:
            return
        text = _resolve(self.resolver, name)
        if text is None:
            raise IncludeError(name, start.line, start.column, self.filename)
        self.state["included"].add(name)
        if self.filename == self.state["root"]:
            self.state["includes"].append(name)
        sub = _Parser(tokenize(text, name), name, self.resolver, self.state)
        sub.origin = name
        sub.parse_body(header_only=True)

    def parse_register(self) -> None:
        kind = self.tokens[self.pos]
        self.pos += 1
        name = self.expect_kind("identifier", "register name")
        self.expect("[")
        size_tok = self.expect_kind("integer", "register size")
        self.expect("]")
        self.expect(";")
        size = int(size_tok.text)
        if size < 1:
            raise ParseError(size_tok.line, size_tok.column, "positive register size", size_tok.text, self.filename)
        decl = ast.RegisterDecl(name.text, size, kind.text == "qreg", kind.line, kind.column)
        self.state["declarations"].append(decl)
        self.state["registers"].setdefault(name.text, decl)

    # -- gate definitions --------------------------------------------------

    def parse_identifier_list(self, what: str) -> list[str]:
        names = [self.expect_kind("identifier", what).text]
        while self.at(","):
            self.pos += 1
            names.append(self.expect_kind("identifier", what).text)
        return names

    def parse_gate_def(self) -> ast.GateDef:
        start = self.expect("gate")
        name = self.expect_kind("identifier", "gate name")
        params: list[str] = []
        if self.at("("):
            self.pos += 1
            if not self.at(")"):
                params = self.parse_identifier_list("parameter name")
            self.expect(")")
        qubits = self.parse_identifier_list("qubit argument name")
        self.expect("{")
        body: list[ast.BodyGate] = []
        while not self.at("}"):
            if self.peek() is None:
                raise self.error("'}'")
            body.extend(self.parse_body_statement())
        self.expect("}")
        return ast.GateDef(
            name.text, tuple(params), tuple(qubits), tuple(body), self.origin, start.line, start.column
        )

    def parse_body_statement(self) -> list[ast.BodyGate]:
        tok = self.peek()
        if tok.text == "barrier" and tok.kind == "keyword":
            self.pos += 1
            self.parse_identifier_list("qubit argument name")
            self.expect(";")
            return []
        if tok.kind == "keyword" and tok.text in ("U", "CX"):
            self.pos += 1
            name = tok.text
        elif tok.kind == "identifier":
            self.pos += 1
            name = tok.text
        else:
            raise self.error("gate statement", self._describe_unsupported(tok))
        params: list[ast.Expr] = []
        if self.at("("):
            self.pos += 1
            if not self.at(")"):
                params = self.parse_expr_list()
            self.expect(")")
        qubits = self.parse_identifier_list("qubit argument name")
        self.expect(";")
        return [ast.BodyGate(name, tuple(params), tuple(qubits), tok.line, tok.column)]

    # -- statements --------------------------------------------------------

    def _describe_unsupported(self, tok: Token) -> str:
        if tok.text == "if" and tok.kind == "keyword":
            return "'if' (classically controlled gates are not supported)"
        if tok.text == "opaque" and tok.kind == "keyword":
            return "'opaque' (opaque gates are not supported)"
        return f"{tok.kind} {tok.text!r}"

    def parse_statement(self) -> list[ast.Statement]:
        tok = self.peek()
        if tok.kind == "keyword":
            if tok.text == "measure":
                return self.parse_measure()
            if tok.text == "reset":
                self.pos += 1
                targets = self.parse_argument()
                self.expect(";")
                return [ast.ResetStmt(q, tok.line, tok.column) for q in targets]
            if tok.text == "barrier":
                self.pos += 1
                args = [q for group in self.parse_argument_list() for q in group]
                self.expect(";")
                return [ast.BarrierStmt(tuple(args), tok.line, tok.column)]
            if tok.text == "U":
                self.pos += 1
                self.expect("(")
                params = [self.eval_const(e) for e in self.parse_expr_list()]
                self.expect(")")
                if len(params) != 3:
                    raise ParseError(tok.line, tok.column, "3 parameters for U", str(len(params)), self.filename)
                targets = self.parse_argument()
                self.expect(";")
                return [ast.UGate(*params, q, tok.line, tok.column) for q in targets]
            if tok.text == "CX":
                self.pos += 1
                groups = self.parse_argument_list()
                self.expect(";")
                if len(groups) != 2:
                    raise ParseError(tok.line, tok.column, "2 arguments for CX", str(len(groups)), self.filename)
                return [ast.CNOTGate(c, t, tok.line, tok.column) for c, t in self.broadcast(groups, tok)]
            raise self.error("quantum statement", self._describe_unsupported(tok))
        if tok.kind != "identifier":
            raise self.error("statement")
        self.pos += 1
        params: list[float] = []
        if self.at("("):
            self.pos += 1
            if not self.at(")"):
                params = [self.eval_const(e) for e in self.parse_expr_list()]
            self.expect(")")
        groups = self.parse_argument_list()
        self.expect(";")
        return [
            ast.GateCall(tok.text, tuple(params), tuple(targets), tok.line, tok.column)
            for targets in self.broadcast(groups, tok)
        ]

    def parse_measure(self) -> list[ast.Statement]:
        tok = self.expect("measure")
        qubits = self.parse_argument()
        self.expect("->")
        bits = self.parse_argument()
        self.expect(";")
        if len(qubits) != len(bits):
            raise ParseError(
                tok.line, tok.column, f"{len(qubits)} classical bit(s) to match the qubits", str(len(bits)), self.filename
            )
        return [ast.MeasureStmt(q, b, tok.line, tok.column) for q, b in zip(qubits, bits)]

    def parse_argument(self) -> list[ast.QubitRef]:
        """Parse ``reg`` or ``reg[i]``; a whole known register expands to each index."""
        name = self.expect_kind("identifier", "register name")
        if self.at("["):
            self.pos += 1
            index = self.expect_kind("integer", "index")
            self.expect("]")
            return [ast.QubitRef(name.text, int(index.text), name.line, name.column)]
        decl = self.state["registers"].get(name.text)
        if decl is None:
            return [ast.QubitRef(name.text, None, name.line, name.column)]
        return [ast.QubitRef(name.text, i, name.line, name.column) for i in range(decl.size)]

    def parse_argument_list(self) -> list[list[ast.QubitRef]]:
        groups = [self.parse_argument()]
        while self.at(","):
            self.pos += 1
            groups.append(self.parse_argument())
        return groups

    def broadcast(self, groups: list[list[ast.QubitRef]], tok: Token) -> list[tuple[ast.QubitRef, ...]]:
        sizes = {len(g) for g in groups if len(g) != 1}
        if len(sizes) > 1:
            raise ParseError(tok.line, tok.column, "registers of equal size", f"sizes {sorted(sizes)}", self.filename)
        n = sizes.pop() if sizes else 1
        return [tuple(g[i] if len(g) > 1 else g[0] for g in groups) for i in range(n)]

    # -- expressions -------------------------------------------------------

    def parse_expr_list(self) -> list[ast.Expr]:
        exprs = [self.parse_expr()]
        while self.at(","):
            self.pos += 1
            exprs.append(self.parse_expr())
        return exprs

    def parse_expr(self) -> ast.Expr:
        left = self.parse_term()
        while self.at("+") or self.at("-"):
            op = self.tokens[self.pos].text
            self.pos += 1
            left = ast.BinOp(op, left, self.parse_term())
        return left

    def parse_term(self) -> ast.Expr:
        left = self.parse_unary()
        while self.at("*") or self.at("/"):
            op = self.tokens[self.pos].text
            self.pos += 1
            left = ast.BinOp(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> ast.Expr:
        if self.at("-"):
            self.pos += 1
            return ast.Neg(self.parse_unary())
        if self.at("+"):
            self.pos += 1
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> ast.Expr:
        base = self.parse_primary()
        if self.at("^"):
            self.pos += 1
            return ast.BinOp("^", base, self.parse_unary())
        return base

    def parse_primary(self) -> ast.Expr:
        tok = self.peek()
        if tok is None:
            raise self.error("expression")
        if tok.kind in ("integer", "real"):
            self.pos += 1
            return ast.Num(float(tok.text))
        if tok.kind == "identifier":
            self.pos += 1
            if tok.text == "pi":
                return ast.Pi()
            if tok.text in ast.FUNCTIONS and self.at("("):
                self.pos += 1
                arg = self.parse_expr()
                self.expect(")")
                return ast.FuncCall(tok.text, arg)
            return ast.ParamRef(tok.text)
        if self.at("("):
            self.pos += 1
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise self.error("expression")

    def eval_const(self, expr: ast.Expr) -> float:
        line, col = self._location()
        try:
            value = ast.evaluate(expr)
        except KeyError as exc:
            raise ParseError(line, col, "constant expression", f"unknown parameter {exc.args[0]!r}", self.filename)
        except (ArithmeticError, ValueError) as exc:
            raise ParseError(line, col, "finite constant expression", str(exc), self.filename)
        if not math.isfinite(value):
            raise ParseError(line, col, "finite constant expression", repr(value), self.filename)
        return value


def parse_program(
    source: str,
    include_resolver: IncludeResolver = None,
    filename: str = "<input>",
) -> ast.Program:
    """Parse OpenQASM 2.0 ``source`` into a :class:`~qasmir.frontend.ast.Program`.

    ``include_resolver`` maps include names to file text (a mapping or a
    callable returning None when unknown). ``qelib1.inc`` is always built in.
    """
    state = {
        "root": filename,
        "declarations": [],
        "statements": [],
        "includes": [],
        "included": set(),
        "registers": {},
    }
    parser = _Parser(tokenize(source, filename), filename, include_resolver, state)
    version = parser.parse_header()
    parser.parse_body(header_only=False)
    return ast.Program(
        version=version,
        declarations=tuple(state["declarations"]),
        statements=tuple(state["statements"]),
        includes=tuple(state["includes"]),
        filename=filename,
    )


def parse_file(path: str | Path, include_dirs: Iterable[str | Path] = ()) -> ast.Program:
    path = Path(path)
    resolver = DirectoryIncludeResolver([*include_dirs, path.parent])
    return parse_program(path.read_text(encoding="utf-8"), resolver, filename=str(path))
