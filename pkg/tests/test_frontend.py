import math

import pytest

from qasmir.errors import GateRecursionError, IncludeError, LexError, ParseError, VersionError
from qasmir.frontend import ast, format_program, inline_user_gates, parse_file, parse_program, tokenize, validate
from qasmir.frontend.parser import DirectoryIncludeResolver

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def q(reg, idx):
    return ast.QubitRef(reg, idx)


# --- tokenize ---------------------------------------------------------------


def test_tokenize_register_declaration():
    toks = tokenize("qreg q[2];")
    assert [(t.kind, t.text) for t in toks] == [
        ("keyword", "qreg"),
        ("identifier", "q"),
        ("symbol", "["),
        ("integer", "2"),
        ("symbol", "]"),
        ("symbol", ";"),
    ]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_parameterized_call():
    # Hand count: rx ( pi / 2 ) q [ 0 ] ;
    toks = tokenize("rx(pi/2) q[0];")
    assert [t.text for t in toks] == ["rx", "(", "pi", "/", "2", ")", "q", "[", "0", "]", ";"]
    assert toks[2].kind == "identifier"
    assert toks[3].kind == "symbol"


def test_tokenize_positions_and_comments():
    src = "// header\nqreg q[1]; /* block\ncomment */ h q[0];"
    toks = tokenize(src)
    assert (toks[0].text, toks[0].line, toks[0].column) == ("qreg", 2, 1)
    h = next(t for t in toks if t.text == "h")
    assert (h.line, h.column) == (3, 12)
    lines = src.splitlines()
    for t in toks:
        assert lines[t.line - 1][t.column - 1 :].startswith(t.text)


def test_tokenize_reals_and_arrow():
    toks = tokenize("1.5e-3 .25 3 -> ==")
    assert [(t.kind, t.text) for t in toks] == [
        ("real", "1.5e-3"),
        ("real", ".25"),
        ("integer", "3"),
        ("symbol", "->"),
        ("symbol", "=="),
    ]


@pytest.mark.parametrize("src, col", [("qreg q[2]; @", 12), ("h q[0]; $", 9)])
def test_tokenize_rejects_stray_characters(src, col):
    with pytest.raises(LexError) as info:
        tokenize(src)
    assert (info.value.line, info.value.column) == (1, col)


def test_tokenize_unterminated_block_comment():
    with pytest.raises(LexError, match="unterminated"):
        tokenize("qreg q[1]; /* never closed")


# --- parse_program ----------------------------------------------------------


def test_parse_bell(bell_source):
    p = parse_program(bell_source)
    assert p.registers == [ast.RegisterDecl("q", 2, True), ast.RegisterDecl("c", 2, False)]
    assert p.statements == (
        ast.GateCall("h", (), (q("q", 0),)),
        ast.GateCall("cx", (), (q("q", 0), q("q", 1))),
        ast.MeasureStmt(q("q", 0), q("c", 0)),
        ast.MeasureStmt(q("q", 1), q("c", 1)),
    )
    assert p.includes == ("qelib1.inc",)


def test_parse_header_only():
    p = parse_program("OPENQASM 2.0;")
    assert p.declarations == () and p.statements == ()


def test_parse_mixed_case_header():
    assert parse_program("OpenQASM 2.0;\nqreg q[1];").qregs[0].name == "q"


def test_parse_user_gate():
    p = parse_program("OPENQASM 2.0;\nqreg q[1];\ngate foo a { h a; }\nfoo q[0];")
    defs = [d for d in p.declarations if isinstance(d, ast.GateDef)]
    assert len(defs) == 1 and defs[0].name == "foo" and defs[0].formal_qubits == ("a",)
    assert p.statements == (ast.GateCall("foo", (), (q("q", 0),)),)


def test_parse_evaluates_parameters():
    p = parse_program(HEADER + "qreg q[1];\nrx(pi/2) q[0];\nu3(-pi, 2*pi/3 + 1, 2^3) q[0];\nrz(cos(0) - sqrt(4)) q[0];")
    assert p.statements[0].params == (math.pi / 2,)
    assert p.statements[1].params == (-math.pi, 2 * math.pi / 3 + 1, 8.0)
    assert p.statements[2].params == (-1.0,)


def test_parse_primitive_gates():
    p = parse_program("OPENQASM 2.0;\nqreg q[2];\nU(0.1, 0.2, 0.3) q[0];\nCX q[0], q[1];")
    assert p.statements == (ast.UGate(0.1, 0.2, 0.3, q("q", 0)), ast.CNOTGate(q("q", 0), q("q", 1)))


def test_parse_broadcast_expands_in_index_order():
    p = parse_program(HEADER + "qreg a[3];\nqreg b[3];\ncreg c[3];\nh a;\ncx a, b;\nmeasure b -> c;")
    hs = [s for s in p.statements if isinstance(s, ast.GateCall) and s.gate_name == "h"]
    assert [s.targets[0].index for s in hs] == [0, 1, 2]
    cxs = [s.targets for s in p.statements if isinstance(s, ast.GateCall) and s.gate_name == "cx"]
    assert cxs == [(q("a", i), q("b", i)) for i in range(3)]
    assert [s.bit.index for s in p.statements if isinstance(s, ast.MeasureStmt)] == [0, 1, 2]


def test_parse_reset_and_barrier():
    p = parse_program("OPENQASM 2.0;\nqreg q[2];\nreset q[1];\nbarrier q[0], q[1];")
    assert isinstance(p.statements[0], ast.ResetStmt)
    assert isinstance(p.statements[1], ast.BarrierStmt)


@pytest.mark.parametrize(
    "src",
    [
        "OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nif (c == 1) x q[0];",
        "OPENQASM 2.0;\nopaque magic a;",
    ],
)
def test_parse_rejects_unsupported_constructs(src):
    with pytest.raises(ParseError):
        parse_program(src)


def test_parse_error_carries_location():
    with pytest.raises(ParseError) as info:
        parse_program("OPENQASM 2.0;\nqreg q[2]\nh q[0];")
    err = info.value
    assert (err.line, err.column) == (3, 1)
    assert "';'" in err.expected


def test_parse_version_error():
    with pytest.raises(VersionError):
        parse_program("OPENQASM 3.0;")


def test_parse_missing_header():
    with pytest.raises(ParseError):
        parse_program("qreg q[1];")


def test_include_resolution():
    lib = "gate mine a { x a; }"
    p = parse_program('OPENQASM 2.0;\ninclude "lib.inc";\nqreg q[1];\nmine q[0];', {"lib.inc": lib})
    assert "mine" in p.gate_defs
    with pytest.raises(IncludeError):
        parse_program('OPENQASM 2.0;\ninclude "missing.inc";')


def test_include_from_directory(tmp_path):
    (tmp_path / "extra.inc").write_text("gate twice a { x a; x a; }")
    src = tmp_path / "prog.qasm"
    src.write_text('OPENQASM 2.0;\ninclude "extra.inc";\nqreg q[1];\ntwice q[0];')
    p = parse_file(src)
    assert "twice" in p.gate_defs
    resolver = DirectoryIncludeResolver([tmp_path])
    assert "extra.inc" in resolver and "nope.inc" not in resolver


def test_builtins_available_without_include():
    p = parse_program("OPENQASM 2.0;\nqreg q[2];\nh q[0];\ncx q[0], q[1];")
    assert validate(p) == []


# --- validate ---------------------------------------------------------------


def codes(src):
    return [d.code for d in validate(parse_program(src)) if d.is_error]


def test_validate_bell(bell_source):
    assert validate(parse_program(bell_source)) == []


def test_validate_out_of_bounds():
    diags = validate(parse_program(HEADER + "qreg q[2];\nh q[5];"))
    assert [d.code for d in diags] == ["OutOfBounds"]
    assert (diags[0].line, diags[0].column) == (4, 3)


def test_validate_duplicate_name():
    assert codes("OPENQASM 2.0;\nqreg q[2];\ncreg q[2];") == ["DuplicateName"]


@pytest.mark.parametrize(
    "body, code",
    [
        ("qreg q[1];\nfrob q[0];", "UnknownGate"),
        ("qreg q[1];\nrx q[0];", "ArityError"),
        ("qreg q[2];\ncx q[0];", "ArityError"),
        ("qreg q[2];\ncx q[1], q[1];", "DuplicateOperand"),
        ("qreg q[1];\nh r[0];", "UnknownRegister"),
        ("qreg q[1];\ncreg c[1];\nh c[0];", "TypeMismatch"),
        ("qreg q[1];\ncreg c[1];\nmeasure c[0] -> c[0];", "TypeMismatch"),
        ("gate g a { h b; }", "UnknownQubit"),
        ("gate g a { rx(theta) a; }", "UnknownParameter"),
        ("gate g a { g a; }", "Recursion"),
        # gates must be defined before use, so a forward reference is unknown
        ("gate g1 a { g2 a; }\ngate g2 a { x a; }", "UnknownGate"),
    ],
)
def test_validate_diagnostics(body, code):
    assert code in codes(HEADER + body)


@pytest.mark.parametrize("body", ["qreg q[0];", "qreg q[2];\ncreg c[1];\nmeasure q -> c;"])
def test_parse_rejects_bad_sizes(body):
    with pytest.raises(ParseError):
        parse_program(HEADER + body)


def test_validate_invalid_size_on_constructed_program():
    p = ast.Program(declarations=(ast.RegisterDecl("q", 0, True, line=1, column=1),))
    assert [d.code for d in validate(p)] == ["InvalidSize"]


def test_validate_positions_inside_source():
    src = HEADER + "qreg q[2];\ncreg q[1];\nh q[9];\nfoo q[0];\n"
    lines = src.splitlines()
    for d in validate(parse_program(src)):
        assert 1 <= d.line <= len(lines)
        assert 1 <= d.column <= len(lines[d.line - 1]) + 1


def test_validate_redefinition_is_warning():
    diags = validate(parse_program(HEADER + "gate h a { x a; }"))
    assert diags and all(not d.is_error for d in diags)


# --- inline -----------------------------------------------------------------


def test_inline_single_level():
    p = inline_user_gates(parse_program("OPENQASM 2.0;\nqreg q[1];\ngate foo a { h a; }\nfoo q[0];"))
    assert p.statements == (ast.GateCall("h", (), (q("q", 0),)),)


def test_inline_two_qubit_body():
    p = inline_user_gates(parse_program("OPENQASM 2.0;\nqreg q[2];\ngate g2 a,b { cx a,b; h b; }\ng2 q[0],q[1];"))
    assert p.statements == (
        ast.GateCall("cx", (), (q("q", 0), q("q", 1))),
        ast.GateCall("h", (), (q("q", 1),)),
    )


def test_inline_builtins_are_fixpoint(bell_source):
    p = parse_program(bell_source)
    assert inline_user_gates(p) == p


def test_inline_substitutes_parameters():
    src = "OPENQASM 2.0;\nqreg q[1];\ngate tw(t) a { rz(t/2) a; U(t, 0, -t) a; }\ntw(pi) q[0];"
    p = inline_user_gates(parse_program(src))
    assert p.statements == (
        ast.GateCall("rz", (math.pi / 2,), (q("q", 0),)),
        ast.UGate(math.pi, 0.0, -math.pi, q("q", 0)),
    )


def test_inline_library_gate():
    p = inline_user_gates(parse_program(HEADER + "qreg q[3];\nccx q[0], q[1], q[2];"))
    names = {s.gate_name for s in p.statements if isinstance(s, ast.GateCall)}
    assert names <= {"h", "t", "tdg", "cx"}
    assert len(p.statements) == 15


def test_inline_depth_limit():
    chain = "\n".join(f"gate g{i} a {{ g{i - 1} a; }}" for i in range(1, 140))
    src = f"OPENQASM 2.0;\nqreg q[1];\ngate g0 a {{ x a; }}\n{chain}\ng139 q[0];"
    with pytest.raises(GateRecursionError):
        inline_user_gates(parse_program(src))
    assert issubclass(GateRecursionError, RecursionError)


# --- canonical printing -----------------------------------------------------


@pytest.mark.parametrize("name", ["bell", "ghz", "rotations", "user_gates", "registers", "adder", "empty"])
def test_format_program_round_trip(corpus, name):
    p = parse_program((corpus / f"{name}.qasm").read_text())
    text = format_program(p)
    assert parse_program(text) == p
    assert format_program(parse_program(text)) == text
