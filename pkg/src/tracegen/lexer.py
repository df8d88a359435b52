"""Tokenizer for the skeleton language."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast_nodes import Loc
from .errors import LexError

KEYWORDS = {
    "boolean", "byte", "short", "int", "long", "char", "String", "void",
    "if", "else", "while", "do", "for", "return", "break", "continue",
    "true", "false", "new", "static", "final",
    # unsupported Java keywords we still want to recognize for better errors
    "class", "float", "double", "switch", "case", "default", "try", "catch",
    "throw", "throws", "public", "private", "protected", "import", "package",
    "null", "this", "super", "instanceof", "enum", "interface", "extends",
    "implements", "synchronized", "volatile", "transient", "native", "goto",
    "abstract", "assert",
}

# multi-char operators first so the regex prefers them
OPERATORS = [
    "++", "--", "+=", "-=", "*=", "/=", "%=", "<=", ">=", "==", "!=",
    "&&", "||", "+", "-", "*", "/", "%", "<", ">", "=", "!", "?", ":",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
]

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<linecomment>//[^\n]*)
    | (?P<blockcomment>/\*.*?\*/)
    | (?P<number>\d+[lL]?)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<char>'(?:[^'\\\n]|\\.)')
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<op>""" + "|".join(re.escape(o) for o in OPERATORS) + r""")
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
            "0": "\0", "\\": "\\", "'": "'", '"': '"'}


@dataclass
class Token:
    kind: str     # number, string, char, ident, keyword, op, eof
    text: str
    loc: Loc

    def __repr__(self) -> str:
        return f"Token({self.kind},{self.text!r}@{self.loc})"


def _unescape(body: str, loc: Loc) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            i += 1
            if i >= len(body):
                raise LexError("dangling escape", loc)
            e = body[i]
            if e == "u":
                if i + 4 >= len(body):
                    raise LexError("truncated unicode escape", loc)
                out.append(chr(int(body[i + 1:i + 5], 16)))
                i += 4
            elif e in _ESCAPES:
                out.append(_ESCAPES[e])
            else:
                raise LexError(f"unknown escape '\\{e}'", loc)
        else:
            out.append(c)
        i += 1
    return "".join(out)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError(f"unexpected character {source[pos]!r}", Loc(line, col))
        text = m.group()
        kind = m.lastgroup
        loc = Loc(line, col)
        if kind == "ident":
            tokens.append(Token("keyword" if text in KEYWORDS else "ident", text, loc))
        elif kind == "number":
            tokens.append(Token("number", text, loc))
        elif kind == "string":
            tokens.append(Token("string", _unescape(text[1:-1], loc), loc))
        elif kind == "char":
            body = _unescape(text[1:-1], loc)
            if len(body) != 1:
                raise LexError("character literal must contain one character", loc)
            tokens.append(Token("char", body, loc))
        elif kind == "op":
            tokens.append(Token("op", text, loc))
        # whitespace and comments fall through

        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", Loc(line, col)))
    return tokens
