"""Recursive-descent parser for basic and full TLSF.

Operator precedence follows the format's table: a smaller level binds
tighter.  Prefix operators parse their operand at their own level, so
``! a && b`` is ``(!a) && b`` and ``SIZEOF b - 1`` is ``(SIZEOF b) - 1``.

Three grammars are supported:

``full``
    the complete format with GLOBAL, buses, sets, functions and sugar.
``basic``
    fully parenthesized formulas over boolean signals; ``name[k]`` is read as
    a single atomic signal so elaborated output reparses.
``flat``
    the single-line formula dialect written by the flat exporter
    (``&``/``|`` for conjunction/disjunction).
"""

from __future__ import annotations

from .ast import (
    BigKind,
    BigOp,
    Binder,
    BinaryKind,
    BinaryOp,
    Binding,
    BoolLiteral,
    BusAccess,
    Case,
    EnumCompare,
    Expr,
    EnumDecl,
    FunctionApp,
    FunctionDecl,
    Guarded,
    IdentRef,
    Info,
    Model,
    NumLiteral,
    Otherwise,
    PatternMatch,
    Polarity,
    RangeBinder,
    Semantics,
    SetLiteral,
    SetRange,
    SignalDecl,
    SignalRef,
    Span,
    Specification,
    SugarKind,
    SugarTemporal,
    UnaryKind,
    UnaryOp,
    Variant,
)
from .errors import ParseError
from .lexer import Token, tokenize

LEFT, RIGHT = "left", "right"

BINARY = {
    "*": (2, LEFT, BinaryKind.MUL),
    "/": (3, RIGHT, BinaryKind.DIV),
    "%": (3, RIGHT, BinaryKind.MOD),
    "+": (4, LEFT, BinaryKind.ADD),
    "-": (4, LEFT, BinaryKind.SUB),
    "(\\)": (6, RIGHT, BinaryKind.SETMINUS),
    "(*)": (7, LEFT, BinaryKind.CAP),
    "(+)": (8, LEFT, BinaryKind.CUP),
    "==": (9, LEFT, BinaryKind.EQ),
    "!=": (9, LEFT, BinaryKind.NEQ),
    "<": (9, LEFT, BinaryKind.LT),
    "<=": (9, LEFT, BinaryKind.LE),
    ">": (9, LEFT, BinaryKind.GT),
    ">=": (9, LEFT, BinaryKind.GE),
    "IN": (10, LEFT, BinaryKind.IN),
    "&&": (12, LEFT, BinaryKind.AND),
    "||": (13, LEFT, BinaryKind.OR),
    "->": (14, RIGHT, BinaryKind.IMPLIES),
    "<->": (14, RIGHT, BinaryKind.EQUIV),
    "W": (15, RIGHT, BinaryKind.WEAK_UNTIL),
    "U": (16, RIGHT, BinaryKind.UNTIL),
    "R": (17, LEFT, BinaryKind.RELEASE),
}

PREFIX = {
    "SIZE": (1, UnaryKind.SIZE),
    "MIN": (1, UnaryKind.MIN),
    "MAX": (1, UnaryKind.MAX),
    "SIZEOF": (1, UnaryKind.SIZEOF),
    "!": (11, UnaryKind.NOT),
    "X": (11, UnaryKind.NEXT),
    "X[!]": (11, UnaryKind.STRONG_NEXT),
    "F": (11, UnaryKind.FINALLY),
    "G": (11, UnaryKind.GLOBALLY),
}

BIG_PREFIX = {
    "+[": (1, BigKind.SUM),
    "*[": (1, BigKind.PROD),
    "(+)[": (5, BigKind.CUP),
    "(*)[": (5, BigKind.CAP),
    "&&[": (11, BigKind.AND),
    "||[": (11, BigKind.OR),
}

SUGAR = {"X": SugarKind.NEXT, "F": SugarKind.FINALLY, "G": SugarKind.GLOBALLY}

BASIC_UNARY = {"!", "X", "X[!]", "F", "G"}
BASIC_BINARY = {"&&", "||", "->", "<->", "U", "R", "W"}
FLAT_ALIASES = {"&": "&&", "|": "||"}

TOP = 17  # loosest level usable in a plain expression

SECTION_ALIASES = {
    "INITIALLY": "initially",
    "PRESET": "preset",
    "REQUIRE": "require",
    "ASSERT": "assert_",
    "INVARIANTS": "assert_",
    "ASSUME": "assume",
    "ASSUMPTIONS": "assume",
    "GUARANTEE": "guarantee",
    "GUARANTEES": "guarantee",
}

MODES = ("full", "basic", "flat")


class Parser:
    def __init__(self, tokens, mode="full", enum_idents=(), signals=(), atomic=False):
        if mode not in MODES:
            raise ValueError(f"unknown parser mode {mode!r}")
        self.atomic = atomic
        self.tokens = tokens
        self.pos = 0
        self.mode = mode
        self.enum_idents = set(enum_idents)
        self.signals = set(signals)

    # -- token helpers ----------------------------------------------------

    def peek(self, offset=0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, *values):
        return self.peek().is_(*values)

    def accept(self, *values):
        if self.at(*values):
            return self.next()
        return None

    def expect(self, value, what=None):
        tok = self.peek()
        if not tok.is_(value):
            raise self.error(f"expected {what or repr(value)}, found {_describe(tok)}", tok, value)
        return self.next()

    def expect_ident(self, what="identifier"):
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected {what}, found {_describe(tok)}", tok, what)
        return self.next()

    def error(self, message, tok=None, expected=None):
        tok = tok or self.peek()
        return ParseError(message, tok.span, expected)

    def span_from(self, start_tok):
        prev = self.tokens[max(self.pos - 1, 0)]
        s = start_tok.span
        return Span(s.start, max(prev.span.end, s.end), s.line, s.column)

    # -- expressions ------------------------------------------------------

    def expression(self):
        if self.mode == "full":
            return self.level(TOP)
        return self.basic_inner()

    def level(self, limit):
        start = self.peek()
        left = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind not in ("op", "keyword") or tok.value not in BINARY:
                return left
            lvl, assoc, kind = BINARY[tok.value]
            if lvl > limit:
                return left
            self.next()
            right = self.level(lvl - 1 if assoc == LEFT else lvl)
            left = self.make_binary(kind, left, right, self.span_from(start))

    def make_binary(self, kind, left, right, span):
        if kind in (BinaryKind.EQ, BinaryKind.NEQ):
            names = [_bare_name(left), _bare_name(right)]
            if None not in names:
                if names[1] in self.enum_idents and names[0] not in self.enum_idents:
                    return EnumCompare(kind is BinaryKind.EQ, names[0], names[1], span)
                if names[0] in self.enum_idents and names[1] not in self.enum_idents:
                    return EnumCompare(kind is BinaryKind.EQ, names[1], names[0], span)
        return BinaryOp(kind, left, right, span)

    def prefix(self):
        tok = self.peek()
        if tok.kind in ("op", "keyword"):
            if tok.value in SUGAR and self.peek(1).is_("["):
                return self.sugar()
            if tok.value in PREFIX:
                lvl, kind = PREFIX[tok.value]
                self.next()
                operand = self.level(lvl)
                return UnaryOp(kind, operand, self.span_from(tok))
            if tok.value in BIG_PREFIX:
                lvl, kind = BIG_PREFIX[tok.value]
                self.next()
                binders = self.binders()
                body = self.level(lvl)
                return BigOp(kind, binders, body, self.span_from(tok))
        return self.primary()

    def sugar(self):
        tok = self.next()
        kind = SUGAR[tok.value]
        self.expect("[")
        strong = bool(self.accept("!"))
        lower = self.level(8)
        upper = None
        if kind is not SugarKind.NEXT:
            self.expect(":")
            upper = self.level(8)
        if self.accept("!"):
            strong = True
        self.expect("]")
        body = self.level(11)
        return SugarTemporal(kind, lower, upper, strong, body, self.span_from(tok))

    def binders(self):
        out = []
        while True:
            start = self.peek()
            if start.kind == "ident" and self.peek(1).is_("IN"):
                self.next()
                self.next()
                domain = self.level(8)
                out.append(Binder(start.value, domain, self.span_from(start)))
            else:
                low = self.level(8)
                low_op = self.peek()
                if not low_op.is_("<", "<="):
                    raise self.error(f"expected 'IN' or a range binder, found {_describe(low_op)}", low_op, "IN")
                self.next()
                name = self.expect_ident("binder name")
                high_op = self.peek()
                if not high_op.is_("<", "<="):
                    raise self.error(f"expected '<' or '<=', found {_describe(high_op)}", high_op, "<")
                self.next()
                high = self.level(8)
                out.append(
                    RangeBinder(
                        name.value, low, low_op.value == "<", high, high_op.value == "<",
                        self.span_from(start),
                    )
                )
            if self.accept(","):
                continue
            self.expect("]")
            return tuple(out)

    def primary(self):
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            return NumLiteral(int(tok.value), tok.span)
        if tok.is_("true", "false"):
            self.next()
            return BoolLiteral(tok.value == "true", tok.span)
        if tok.is_("("):
            self.next()
            inner = self.level(TOP)
            self.expect(")", "')'")
            return inner
        if tok.is_("{"):
            return self.set_expression()
        if tok.is_("|"):
            self.next()
            inner = self.level(TOP)
            self.expect("|", "closing '|'")
            return UnaryOp(UnaryKind.SIZE, inner, self.span_from(tok))
        if tok.kind == "ident":
            self.next()
            if self.atomic and not self.at("("):
                return SignalRef(self.atomic_suffix(tok.value), self.span_from(tok))
            if self.at("("):
                self.next()
                args = []
                if not self.at(")"):
                    args.append(self.level(TOP))
                    while self.accept(","):
                        args.append(self.level(TOP))
                self.expect(")", "')'")
                return FunctionApp(tok.value, tuple(args), self.span_from(tok))
            if self.at("["):
                self.next()
                index = self.level(TOP)
                self.expect("]", "']'")
                return BusAccess(tok.value, index, self.span_from(tok))
            if tok.value in self.signals:
                return SignalRef(tok.value, tok.span)
            return IdentRef(tok.value, tok.span)
        if tok.kind == "eof":
            raise self.error("unexpected end of input, expected an expression", tok, "expression")
        raise self.error(f"expected an expression, found {_describe(tok)}", tok, "expression")

    def set_expression(self):
        start = self.expect("{")
        if self.accept("}"):
            return SetLiteral((), self.span_from(start))
        elements = [self.level(TOP)]
        if self.accept(","):
            elements.append(self.level(TOP))
            if self.accept(".."):
                end = self.level(TOP)
                self.expect("}", "'}'")
                return SetRange(elements[0], elements[1], end, self.span_from(start))
            while self.accept(","):
                elements.append(self.level(TOP))
        self.expect("}", "'}'")
        return SetLiteral(tuple(elements), self.span_from(start))

    # -- basic / flat formulas -------------------------------------------

    def _basic_value(self, tok):
        if self.mode == "flat" and tok.kind == "op":
            return FLAT_ALIASES.get(tok.value, tok.value)
        return tok.value

    def basic_inner(self):
        tok = self.peek()
        value = self._basic_value(tok)
        if tok.kind in ("op", "keyword") and value in BASIC_UNARY:
            self.next()
            operand = self.basic_operand()
            return UnaryOp(PREFIX[value][1], operand, self.span_from(tok))
        left = self.basic_operand()
        op = self.peek()
        value = self._basic_value(op)
        if op.kind in ("op", "keyword") and value in BASIC_BINARY:
            self.next()
            right = self.basic_operand()
            return BinaryOp(BINARY[value][2], left, right, self.span_from(tok))
        return left

    def basic_operand(self):
        tok = self.peek()
        if tok.is_("("):
            self.next()
            inner = self.basic_inner()
            self.expect(")", "')'")
            return inner
        if tok.is_("true", "false"):
            self.next()
            return BoolLiteral(tok.value == "true", tok.span)
        if tok.kind == "ident":
            self.next()
            return SignalRef(self.atomic_suffix(tok.value), self.span_from(tok))
        if tok.kind in ("op", "keyword") and (
            self._basic_value(tok) in BASIC_UNARY or self._basic_value(tok) in BASIC_BINARY
        ):
            raise self.error(
                f"operator {tok.lexeme!r} must be parenthesized in the basic format", tok, "'('"
            )
        raise self.error(f"expected a basic formula, found {_describe(tok)}", tok, "formula")

    def atomic_suffix(self, name):
        """``name[k]`` is one atomic signal in the basic and flat grammars."""
        if self.at("["):
            self.next()
            idx = self.peek()
            if idx.kind != "number":
                raise self.error("expected a numeral index", idx, "number")
            self.next()
            self.expect("]", "']'")
            return f"{name}[{int(idx.value)}]"
        return name

    # -- specification ----------------------------------------------------

    def separated(self, item):
        """Items up to '}' separated by ';' (a trailing ';' is optional)."""
        out = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                raise self.error("unexpected end of input, expected '}'", expected="'}'")
            out.append(item())
            if not self.accept(";") and not self.at("}"):
                raise self.error(f"expected ';', found {_describe(self.peek())}", expected="';'")
        self.expect("}")
        return out

    def specification(self):
        info = self.info()
        parameters, definitions, has_global = (), (), False
        if self.at("GLOBAL"):
            if self.mode != "full":
                raise self.error("GLOBAL is not allowed in the basic format")
            parameters, definitions = self.global_section()
            has_global = True
        main = self.main_section()
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(f"unexpected {_describe(tok)} after MAIN section", tok, "end of input")
        return Specification(info, parameters, definitions, has_global=has_global, **main)

    def info(self):
        self.expect("INFO", "'INFO'")
        start = self.expect("{")
        fields = {}
        while not self.at("}"):
            key = self.peek()
            if key.kind != "keyword" or key.value not in ("TITLE", "DESCRIPTION", "SEMANTICS", "TARGET", "TAGS"):
                raise self.error(f"expected an INFO field, found {_describe(key)}", key, "INFO field")
            self.next()
            if key.value in fields:
                raise self.error(f"duplicate INFO field {key.value}", key)
            self.expect(":")
            if key.value in ("TITLE", "DESCRIPTION"):
                tok = self.peek()
                if tok.kind != "string":
                    raise self.error(f"expected a string literal, found {_describe(tok)}", tok, "string")
                fields[key.value] = self.next().value
            elif key.value == "SEMANTICS":
                fields[key.value] = self.semantics_value()
            elif key.value == "TARGET":
                fields[key.value] = self.model_value()
            else:
                fields[key.value] = self.tags()
        self.expect("}")
        for required in ("TITLE", "DESCRIPTION", "SEMANTICS", "TARGET"):
            if required not in fields:
                raise ParseError(f"missing INFO field {required}", start.span)
        return Info(
            fields["TITLE"], fields["DESCRIPTION"], fields["SEMANTICS"], fields["TARGET"],
            tuple(fields.get("TAGS", ())),
        )

    def model_value(self):
        tok = self.peek()
        try:
            model = Model(tok.value) if tok.kind == "ident" else None
        except ValueError:
            model = None
        if model is None:
            raise self.error(f"unknown system model {tok.lexeme!r}", tok, "Mealy or Moore")
        self.next()
        return model

    def semantics_value(self):
        model = self.model_value()
        variant = Variant.STANDARD
        if self.accept(","):
            tok = self.peek()
            if tok.kind != "ident" or tok.value not in ("Strict", "Finite"):
                raise self.error(f"unknown semantics variant {tok.lexeme!r}", tok, "Strict or Finite")
            self.next()
            variant = Variant(tok.value)
        return Semantics(model, variant)

    def tags(self):
        out = []
        tok = self.peek()
        if tok.kind not in ("string", "ident"):
            return out
        while True:
            tok = self.peek()
            if tok.kind not in ("string", "ident"):
                raise self.error(f"expected a tag, found {_describe(tok)}", tok, "tag")
            out.append(self.next().value)
            if not self.accept(","):
                return out

    def global_section(self):
        self.expect("GLOBAL")
        self.expect("{")
        parameters = definitions = None
        while not self.at("}"):
            tok = self.peek()
            if tok.is_("PARAMETERS"):
                if parameters is not None:
                    raise self.error("duplicate section PARAMETERS", tok)
                self.next()
                self.expect("{")
                parameters = tuple(self.separated(self.parameter))
            elif tok.is_("DEFINITIONS"):
                if definitions is not None:
                    raise self.error("duplicate section DEFINITIONS", tok)
                self.next()
                self.expect("{")
                definitions = tuple(self.separated(self.definition))
            else:
                raise self.error(f"expected PARAMETERS or DEFINITIONS, found {_describe(tok)}", tok)
        self.expect("}")
        return parameters or (), definitions or ()

    def parameter(self):
        name = self.expect_ident("parameter name")
        self.expect("=")
        value = self.level(TOP)
        return Binding(name.value, value, self.span_from(name))

    def definition(self):
        tok = self.peek()
        if tok.is_("enum"):
            return self.enum_declaration()
        name = self.expect_ident("definition name")
        if self.accept("("):
            params = []
            if not self.at(")"):
                params.append(self.expect_ident("argument name").value)
                while self.accept(","):
                    params.append(self.expect_ident("argument name").value)
            self.expect(")")
            self.expect("=")
            body = self.cases()
            return FunctionDecl(name.value, tuple(params), body, self.span_from(name))
        self.expect("=")
        value = self.level(TOP)
        return Binding(name.value, value, self.span_from(name))

    def cases(self):
        start = self.peek()
        out = []
        while True:
            case_start = self.peek()
            if self.accept("otherwise"):
                self.expect(":")
                guard = Otherwise(case_start.span)
                body = self.level(TOP)
            else:
                first = self.level(TOP)
                if self.accept("~"):
                    pattern = self.level(TOP)
                    guard = PatternMatch(first, pattern, self.span_from(case_start))
                    self.expect(":", "':' after pattern")
                    body = self.level(TOP)
                elif self.accept(":"):
                    guard = first
                    body = self.level(TOP)
                else:
                    guard, body = None, first
            out.append(Case(guard, body, self.span_from(case_start)))
            if self.at(";", "}") or self.peek().kind == "eof":
                break
        return Guarded(tuple(out), self.span_from(start))

    def enum_declaration(self):
        start = self.expect("enum")
        name = self.expect_ident("enum type name")
        self.expect("=")
        valuations = []
        while True:
            ident = self.expect_ident("enum identifier")
            self.expect(":")
            patterns = [self.pattern()]
            while self.accept(","):
                patterns.append(self.pattern())
            valuations.append((ident.value, tuple(patterns)))
            self.enum_idents.add(ident.value)
            if not (self.peek().kind == "ident" and self.peek(1).is_(":")):
                break
        decl = EnumDecl(name.value, tuple(valuations), self.span_from(start))
        _check_enum(decl)
        return decl

    def pattern(self):
        first = self.peek()
        parts = []
        prev_end = None
        while True:
            tok = self.peek()
            if tok.kind not in ("number", "op") or (tok.kind == "op" and tok.value != "*"):
                break
            if prev_end is not None and tok.span.start != prev_end:
                break
            parts.append(tok.lexeme)
            prev_end = tok.span.end
            self.next()
        text = "".join(parts)
        if not text or set(text) - set("01*"):
            raise self.error(f"invalid enum pattern {text or first.lexeme!r}", first, "pattern over 0, 1, *")
        return text

    def main_section(self):
        self.expect("MAIN", "'MAIN'")
        self.expect("{")
        result = {}
        seen = set()
        while not self.at("}"):
            tok = self.peek()
            if tok.kind != "keyword":
                raise self.error(f"expected a MAIN subsection, found {_describe(tok)}", tok, "subsection")
            key = "inputs" if tok.value == "INPUTS" else "outputs" if tok.value == "OUTPUTS" else SECTION_ALIASES.get(tok.value)
            if key is None:
                raise self.error(f"unknown MAIN subsection {tok.lexeme}", tok)
            if key in seen:
                raise self.error(f"duplicate section {tok.lexeme}", tok)
            seen.add(key)
            self.next()
            self.expect("{")
            if key in ("inputs", "outputs"):
                polarity = Polarity.INPUT if key == "inputs" else Polarity.OUTPUT
                decls = self.separated(lambda: self.signal_declaration(polarity))
                result[key] = tuple(decls)
                self._check_signals(result)
            else:
                result[key] = tuple(self.separated(self.expression))
        close = self.expect("}")
        for required in ("inputs", "outputs"):
            if required not in result:
                raise ParseError(f"missing section {required.upper()}", close.span)
        return result

    def signal_declaration(self, polarity):
        first = self.expect_ident("signal name")
        if self.mode != "full":
            name = self.atomic_suffix(first.value)
            return SignalDecl(name, polarity, span=self.span_from(first))
        if self.peek().kind == "ident":
            name = self.next()
            return SignalDecl(name.value, polarity, enum_type=first.value, span=self.span_from(first))
        if self.accept("["):
            width = self.level(TOP)
            self.expect("]")
            return SignalDecl(first.value, polarity, width=width, span=self.span_from(first))
        return SignalDecl(first.value, polarity, span=self.span_from(first))

    def _check_signals(self, result):
        seen = {}
        for key in ("inputs", "outputs"):
            for decl in result.get(key, ()):
                if decl.name in seen:
                    if seen[decl.name] != key:
                        msg = f"signal {decl.name} declared as both input and output"
                    else:
                        msg = f"duplicate signal {decl.name}"
                    raise ParseError(msg, decl.span)
                seen[decl.name] = key
                if not decl.is_bus:
                    self.signals.add(decl.name)


def _check_enum(decl):
    widths = {len(p) for _, pats in decl.valuations for p in pats}
    if len(widths) != 1:
        raise ParseError(f"enum {decl.name}: all patterns must have the same width", decl.span)
    owner = {}
    names = set()
    for ident, pats in decl.valuations:
        if ident in names:
            raise ParseError(f"enum {decl.name}: duplicate identifier {ident}", decl.span)
        names.add(ident)
        for pat in pats:
            for bits in expand_pattern(pat):
                if owner.setdefault(bits, ident) != ident:
                    raise ParseError(
                        f"enum {decl.name}: valuation {bits} is shared by {owner[bits]} and {ident}",
                        decl.span,
                    )


def expand_pattern(pattern):
    """All concrete bit strings matched by a pattern over ``0``, ``1``, ``*``."""
    out = [""]
    for ch in pattern:
        opts = "01" if ch == "*" else ch
        out = [prefix + c for prefix in out for c in opts]
    return out


def _bare_name(e):
    if isinstance(e, (IdentRef, SignalRef)):
        return e.name
    return None


def _describe(tok):
    if tok.kind == "eof":
        return "end of input"
    return repr(tok.lexeme)


def parse_spec(source: str, mode: str = "full") -> Specification:
    """Parse a complete TLSF document."""
    parser = Parser(tokenize(source), mode)
    return parser.specification()


def parse_expression(source, mode="full", enum_idents=(), signals=()):
    """Parse a single expression from text or an already tokenized stream."""
    tokens = tokenize(source) if isinstance(source, str) else list(source)
    if not tokens or tokens[-1].kind != "eof":
        end = tokens[-1].span.end if tokens else 0
        tokens.append(Token("eof", "", Span(end, end), ""))
    parser = Parser(tokens, mode, enum_idents, signals)
    expr = parser.expression()
    tok = parser.peek()
    if tok.kind != "eof":
        if mode != "full":
            raise parser.error(
                f"unexpected {_describe(tok)}; the {mode} format requires full parenthesization", tok
            )
        raise parser.error(f"unexpected {_describe(tok)} after expression", tok, "end of input")
    return expr


def parse_formula(source: str) -> Expr:
    """Parse an LTL formula in full syntax where every name is an atomic signal.

    ``g[0]`` becomes the signal ``g[0]``; no GLOBAL context is involved.
    """
    tokens = tokenize(source)
    parser = Parser(tokens, "full", atomic=True)
    expr = parser.expression()
    if parser.peek().kind != "eof":
        raise parser.error(f"unexpected {_describe(parser.peek())} after formula", expected="end of input")
    return expr
