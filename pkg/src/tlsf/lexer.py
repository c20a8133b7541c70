"""Tokenizer for TLSF sources.

Comments (``//`` and nestable ``/* */``) are dropped.  Word-form operators are
mapped onto their symbolic spelling in ``Token.value`` while ``lexeme`` keeps
the source text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import Span
from .errors import ParseError

SECTION_KEYWORDS = frozenset(
    {
        "INFO", "GLOBAL", "MAIN", "PARAMETERS", "DEFINITIONS",
        "INPUTS", "OUTPUTS", "INITIALLY", "PRESET", "REQUIRE", "ASSERT",
        "ASSUME", "GUARANTEE", "INVARIANTS", "ASSUMPTIONS", "GUARANTEES",
        "TITLE", "DESCRIPTION", "SEMANTICS", "TARGET", "TAGS",
    }
)

TEMPORAL_KEYWORDS = frozenset({"X", "F", "G", "U", "R", "W"})

OTHER_KEYWORDS = frozenset({"enum", "otherwise", "true", "false"})

# word spelling -> canonical operator
WORD_OPERATORS = {
    "MUL": "*",
    "DIV": "/",
    "MOD": "%",
    "PLUS": "+",
    "MINUS": "-",
    "CAP": "(*)",
    "CUP": "(+)",
    "SETMINUS": "(\\)",
    "EQ": "==",
    "NEQ": "!=",
    "LE": "<",
    "LEQ": "<=",
    "GE": ">",
    "GEQ": ">=",
    "GEG": ">=",
    "IN": "IN",
    "ELEM": "IN",
    "NOT": "!",
    "AND": "&&",
    "OR": "||",
    "IMPLIES": "->",
    "EQUIV": "<->",
    "SIZE": "SIZE",
    "MIN": "MIN",
    "MAX": "MAX",
    "SIZEOF": "SIZEOF",
}

# word spelling directly followed by '[' -> canonical big operator
WORD_BIG_OPERATORS = {
    "SUM": "+[",
    "PROD": "*[",
    "CAP": "(*)[",
    "CUP": "(+)[",
    "AND": "&&[",
    "OR": "||[",
    "FORALL": "&&[",
    "EXISTS": "||[",
}

KEYWORDS = (
    SECTION_KEYWORDS
    | TEMPORAL_KEYWORDS
    | OTHER_KEYWORDS
    | frozenset(WORD_OPERATORS)
    | frozenset(WORD_BIG_OPERATORS)
)

# longest first
SYMBOLS = [
    ("(\\)", "(\\)"),
    ("(-)", "(\\)"),
    ("(+)[", "(+)["),
    ("(*)[", "(*)["),
    ("(+)", "(+)"),
    ("(*)", "(*)"),
    ("<->", "<->"),
    ("&&[", "&&["),
    ("||[", "||["),
    ("<-", "IN"),
    ("->", "->"),
    ("&&", "&&"),
    ("||", "||"),
    ("==", "=="),
    ("!=", "!="),
    ("/=", "!="),
    ("<=", "<="),
    (">=", ">="),
    ("..", ".."),
    ("+[", "+["),
    ("*[", "*["),
    ("<", "<"),
    (">", ">"),
    ("+", "+"),
    ("-", "-"),
    ("*", "*"),
    ("/", "/"),
    ("%", "%"),
    ("!", "!"),
    ("~", "~"),
    ("&", "&"),
    ("|", "|"),
]

PUNCTUATION = frozenset("()[]{};,:=")

IDENT_RE = re.compile(r"[A-Za-z_@][A-Za-z0-9_'@]*")
NUMBER_RE = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | ident | number | op | punct | string | eof
    lexeme: str
    span: Span
    value: str = ""

    def is_(self, *values):
        return self.value in values and self.kind in ("op", "punct", "keyword")


class _Cursor:
    def __init__(self, source):
        self.source = source
        self.pos = 0
        self.line = 1
        self.col = 1

    def advance(self, n):
        for ch in self.source[self.pos:self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def span_from(self, start, line, col):
        return Span(start, self.pos, line, col)


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens; the last token has kind ``eof``."""
    cur = _Cursor(source)
    tokens = []
    src = source
    n = len(src)
    while cur.pos < n:
        ch = src[cur.pos]
        if ch.isspace():
            cur.advance(1)
            continue
        start, line, col = cur.pos, cur.line, cur.col
        if src.startswith("//", cur.pos):
            end = src.find("\n", cur.pos)
            cur.advance((n if end < 0 else end) - cur.pos)
            continue
        if src.startswith("/*", cur.pos):
            _skip_block_comment(cur)
            continue
        if ch == '"':
            lexeme, value = _read_string(cur)
            tokens.append(Token("string", lexeme, cur.span_from(start, line, col), value))
            continue
        m = NUMBER_RE.match(src, cur.pos)
        if m:
            cur.advance(m.end() - m.start())
            tokens.append(Token("number", m.group(), cur.span_from(start, line, col), m.group()))
            continue
        m = IDENT_RE.match(src, cur.pos)
        if m:
            word = m.group()
            cur.advance(len(word))
            nxt = src[cur.pos:cur.pos + 3]
            if word == "X" and nxt == "[!]":
                cur.advance(3)
                tokens.append(Token("op", "X[!]", cur.span_from(start, line, col), "X[!]"))
            elif word in WORD_BIG_OPERATORS and nxt[:1] == "[":
                cur.advance(1)
                tokens.append(
                    Token("op", word + "[", cur.span_from(start, line, col), WORD_BIG_OPERATORS[word])
                )
            elif word in WORD_OPERATORS:
                tokens.append(Token("op", word, cur.span_from(start, line, col), WORD_OPERATORS[word]))
            elif word in KEYWORDS:
                tokens.append(Token("keyword", word, cur.span_from(start, line, col), word))
            else:
                tokens.append(Token("ident", word, cur.span_from(start, line, col), word))
            continue
        for sym, canonical in SYMBOLS:
            if src.startswith(sym, cur.pos):
                cur.advance(len(sym))
                tokens.append(Token("op", sym, cur.span_from(start, line, col), canonical))
                break
        else:
            if ch in PUNCTUATION:
                cur.advance(1)
                tokens.append(Token("punct", ch, cur.span_from(start, line, col), ch))
            else:
                cur.advance(1)
                raise ParseError(f"illegal character {ch!r}", cur.span_from(start, line, col))
    tokens.append(Token("eof", "", Span(n, n, cur.line, cur.col), ""))
    return tokens


def _skip_block_comment(cur):
    src = cur.source
    start, line, col = cur.pos, cur.line, cur.col
    depth = 0
    while cur.pos < len(src):
        if src.startswith("/*", cur.pos):
            depth += 1
            cur.advance(2)
        elif src.startswith("*/", cur.pos):
            depth -= 1
            cur.advance(2)
            if depth == 0:
                return
        else:
            cur.advance(1)
    raise ParseError("unterminated comment", Span(start, start + 2, line, col))


def _read_string(cur):
    src = cur.source
    start, line, col = cur.pos, cur.line, cur.col
    i = cur.pos + 1
    chars = []
    while i < len(src):
        ch = src[i]
        if ch == "\\" and i + 1 < len(src) and src[i + 1] in '"\\':
            chars.append(src[i + 1])
            i += 2
            continue
        if ch == '"':
            lexeme = src[start:i + 1]
            cur.advance(i + 1 - start)
            return lexeme, "".join(chars)
        if ch == "\n":
            break
        chars.append(ch)
        i += 1
    raise ParseError("unterminated string literal", Span(start, start + 1, line, col))


def detokenize(tokens) -> str:
    return " ".join(t.lexeme for t in tokens if t.kind != "eof")


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'
