"""Tokenizer for OpenQASM 2.0 source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from qasmir.errors import LexError

KEYWORDS = frozenset(
    {
        "OPENQASM",
        "include",
        "qreg",
        "creg",
        "gate",
        "opaque",
        "measure",
        "reset",
        "barrier",
        "if",
        "U",
        "CX",
    }
)

# Order matters: reals before integers, two-char symbols before one-char.
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
  | (?P<integer>\d+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<symbol>->|==|[\[\](){};,+\-*/^])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | integer | real | symbol | string
    text: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.kind} {self.text!r}"


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    end = len(source)
    while pos < end:
        m = _TOKEN_RE.match(source, pos)
        if m is not None and m.lastgroup == "symbol" and source.startswith("/*", pos):
            m = None  # an unclosed comment would otherwise lex as '/' '*'
        if m is None:
            col = pos - line_start + 1
            if source.startswith("/*", pos):
                raise LexError("unterminated block comment", line, col, filename)
            if source[pos] == '"':
                raise LexError("unterminated string literal", line, col, filename)
            raise LexError(f"unexpected character {source[pos]!r}", line, col, filename)
        group = m.lastgroup
        text = m.group()
        if group == "word":
            kind = "keyword" if text in KEYWORDS else "identifier"
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        elif group not in ("ws", "line_comment", "block_comment"):
            tokens.append(Token(group, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    return tokens
