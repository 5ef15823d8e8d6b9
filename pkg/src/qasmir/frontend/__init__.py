"""OpenQASM 2.0 frontend: lexing, parsing, validation and gate inlining."""

from qasmir.frontend.ast import Program, format_program
from qasmir.frontend.gates import BUILTIN_GATES
from qasmir.frontend.inline import inline_user_gates
from qasmir.frontend.lexer import Token, tokenize
from qasmir.frontend.parser import DirectoryIncludeResolver, parse_file, parse_program
from qasmir.frontend.validate import validate

__all__ = [
    "BUILTIN_GATES",
    "DirectoryIncludeResolver",
    "Program",
    "Token",
    "format_program",
    "inline_user_gates",
    "parse_file",
    "parse_program",
    "tokenize",
    "validate",
]
