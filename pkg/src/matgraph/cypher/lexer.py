from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import CypherSyntaxError

KEYWORDS = frozenset({"MATCH", "CREATE", "WHERE", "RETURN", "LIMIT", "AND", "TRUE", "FALSE"})

PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    "{": "LBRACE",
    "}": "RBRACE",
    ":": "COLON",
    ",": "COMMA",
    ".": "DOT",
    "..": "DOTDOT",
    "*": "STAR",
    "-": "DASH",
    "<": "LT",
    ">": "GT",
    "<=": "LE",
    ">=": "GE",
    "=": "EQ",
    "<>": "NE",
}

_TOKEN_RE = re.compile(
    r"""
     (?P<ws>[ \t\r\n]+)
    |(?P<float>[0-9]+\.[0-9]+)
    |(?P<int>[0-9]+)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<string>'(?:[^']|'')*')
    |(?P<punct>\.\.|<=|>=|<>|[()\[\]{}:,.*\-<>=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int

    def __repr__(self) -> str:
        if self.kind in ("IDENT", "INT", "FLOAT", "STRING"):
            return f"[{self.kind} {self.text}]"
        return f"[{self.kind}]"


def byte_offsets(text: str):
    """Map from character index to UTF-8 byte offset (len(text)+1 entries)."""
    if text.isascii():
        return range(len(text) + 1)
    out = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        out.append(total)
    return out


def tokenize(text: str) -> list[Token]:
    """Split a query into tokens; the list always ends with an EOF token."""
    boff = byte_offsets(text)
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == "'":
                raise CypherSyntaxError("unterminated string", boff[pos])
            raise CypherSyntaxError(f"illegal character {text[pos]!r}", boff[pos])
        kind = m.lastgroup
        lexeme = m.group()
        off = boff[pos]
        pos = m.end()
        if kind == "ws":
            continue
        if kind == "ident":
            upper = lexeme.upper()
            tokens.append(Token(upper, lexeme, off) if upper in KEYWORDS else Token("IDENT", lexeme, off))
        elif kind == "int":
            tokens.append(Token("INT", lexeme, off))
        elif kind == "float":
            tokens.append(Token("FLOAT", lexeme, off))
        elif kind == "string":
            tokens.append(Token("STRING", lexeme[1:-1].replace("''", "'"), off))
        else:
            tokens.append(Token(PUNCT[lexeme], lexeme, off))
    tokens.append(Token("EOF", "", boff[n]))
    return tokens
