import pytest

from tlsf.ast import (
    BigKind, BigOp, Binder, BinaryKind, BinaryOp, BusAccess, EnumCompare, FunctionApp,
    FunctionDecl, IdentRef, Model, NumLiteral, Otherwise, PatternMatch, Polarity, RangeBinder,
    SetLiteral, SetRange, SignalRef, SugarKind, SugarTemporal, UnaryKind, UnaryOp, Variant,
)
from tlsf.errors import ParseError
from tlsf.parser import parse_expression, parse_formula, parse_spec

a, b, c = IdentRef("a"), IdentRef("b"), IdentRef("c")


def op(kind, lhs, rhs):
    return BinaryOp(kind, lhs, rhs)


@pytest.mark.parametrize("text, expected", [
    ("a -> b -> c", op(BinaryKind.IMPLIES, a, op(BinaryKind.IMPLIES, b, c))),
    ("a <-> b -> c", op(BinaryKind.EQUIV, a, op(BinaryKind.IMPLIES, b, c))),
    ("a U b U c", op(BinaryKind.UNTIL, a, op(BinaryKind.UNTIL, b, c))),
    ("a W b W c", op(BinaryKind.WEAK_UNTIL, a, op(BinaryKind.WEAK_UNTIL, b, c))),
    ("a R b R c", op(BinaryKind.RELEASE, op(BinaryKind.RELEASE, a, b), c)),
    ("a && b || c", op(BinaryKind.OR, op(BinaryKind.AND, a, b), c)),
    ("a || b && c", op(BinaryKind.OR, a, op(BinaryKind.AND, b, c))),
    ("a && b && c", op(BinaryKind.AND, op(BinaryKind.AND, a, b), c)),
    ("a -> b U c", op(BinaryKind.UNTIL, op(BinaryKind.IMPLIES, a, b), c)),
    ("a U b R c", op(BinaryKind.RELEASE, op(BinaryKind.UNTIL, a, b), c)),
    ("a W b U c", op(BinaryKind.UNTIL, op(BinaryKind.WEAK_UNTIL, a, b), c)),
    ("! a && b", op(BinaryKind.AND, UnaryOp(UnaryKind.NOT, a), b)),
    ("X a U b", op(BinaryKind.UNTIL, UnaryOp(UnaryKind.NEXT, a), b)),
    ("X[!] (a)", UnaryOp(UnaryKind.STRONG_NEXT, a)),
    ("G F a", UnaryOp(UnaryKind.GLOBALLY, UnaryOp(UnaryKind.FINALLY, a))),
])
def test_formula_precedence(text, expected):
    assert parse_expression(text) == expected


def n(v):
    return NumLiteral(v)


@pytest.mark.parametrize("text, expected", [
    ("1 + 2 * 3", op(BinaryKind.ADD, n(1), op(BinaryKind.MUL, n(2), n(3)))),
    ("1 - 2 - 3", op(BinaryKind.SUB, op(BinaryKind.SUB, n(1), n(2)), n(3))),
    ("8 / 4 / 2", op(BinaryKind.DIV, n(8), op(BinaryKind.DIV, n(4), n(2)))),
    ("8 / 4 % 3", op(BinaryKind.DIV, n(8), op(BinaryKind.MOD, n(4), n(3)))),
    ("1 + 2 < 4", op(BinaryKind.LT, op(BinaryKind.ADD, n(1), n(2)), n(4))),
    ("SIZEOF b - 1", op(BinaryKind.SUB, UnaryOp(UnaryKind.SIZEOF, b), n(1))),
    ("a IN b (+) c", op(BinaryKind.IN, a, op(BinaryKind.CUP, b, c))),
    ("a (+) b (*) c", op(BinaryKind.CUP, a, op(BinaryKind.CAP, b, c))),
    ("a (*) b (\\) c", op(BinaryKind.CAP, a, op(BinaryKind.SETMINUS, b, c))),
    ("a (\\) b (\\) c", op(BinaryKind.SETMINUS, a, op(BinaryKind.SETMINUS, b, c))),
    ("|a| + 1", op(BinaryKind.ADD, UnaryOp(UnaryKind.SIZE, a), n(1))),
])
def test_arithmetic_and_set_precedence(text, expected):
    assert parse_expression(text) == expected


def test_sets_and_ranges():
    assert parse_expression("{}") == SetLiteral(())
    assert parse_expression("{a, b}") == SetLiteral((a, b))
    assert parse_expression("{0, 1 .. 4}") == SetRange(n(0), n(1), n(4))


def test_big_operators():
    e = parse_expression("&&[i IN {0, 1}, 0 <= j < 2] b[i]")
    assert e == BigOp(
        BigKind.AND,
        (Binder("i", SetLiteral((n(0), n(1)))), RangeBinder("j", n(0), False, n(2), True)),
        BusAccess("b", IdentRef("i")),
    )
    # a big operator body is parsed at its own level
    e = parse_expression("||[i IN S] a && b")
    assert isinstance(e, BinaryOp) and e.kind is BinaryKind.AND
    e = parse_expression("+[i IN S] i * 2")
    assert e.kind is BinaryKind.MUL and e.lhs.body == IdentRef("i")
    assert parse_expression("(+)[i IN S] {i} (*) T").kind is BinaryKind.CAP


def test_function_application():
    assert parse_expression("f(a, b[1])") == FunctionApp("f", (a, BusAccess("b", n(1))))


@pytest.mark.parametrize("text, kind, lo, hi, strong", [
    ("X[3] a", SugarKind.NEXT, 3, None, False),
    ("F[2:3] a", SugarKind.FINALLY, 2, 3, False),
    ("G[!1:3] a", SugarKind.GLOBALLY, 1, 3, True),
    ("G[1:3!] a", SugarKind.GLOBALLY, 1, 3, True),
    ("X[!2] a", SugarKind.NEXT, 2, None, True),
])
def test_sugar(text, kind, lo, hi, strong):
    e = parse_expression(text)
    assert e == SugarTemporal(kind, n(lo), None if hi is None else n(hi), strong, a)


def test_enum_comparison_needs_known_identifier():
    assert parse_expression("b == RIGHT", enum_idents={"RIGHT"}) == EnumCompare(True, "b", "RIGHT")
    assert parse_expression("RIGHT /= b", enum_idents={"RIGHT"}) == EnumCompare(False, "b", "RIGHT")
    assert parse_expression("b == RIGHT") == op(BinaryKind.EQ, b, IdentRef("RIGHT"))


@pytest.mark.parametrize("text", ["a &&", "(a", "a)", "&& a", "f(a,", "{1, 2 ..}", "a ~ b", "a : b"])
def test_malformed_expressions(text):
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert info.value.span is not None


def test_basic_mode_requires_parentheses():
    assert parse_expression("(a) && (b)", mode="basic") == op(BinaryKind.AND, SignalRef("a"), SignalRef("b"))
    assert parse_expression("(G ((r[0]) -> (F (g[0]))))", mode="basic") == UnaryOp(
        UnaryKind.GLOBALLY, op(BinaryKind.IMPLIES, SignalRef("r[0]"),
                               UnaryOp(UnaryKind.FINALLY, SignalRef("g[0]"))))
    for text in ("a && b && c", "X X a", "(a) && (b) || (c)", "a + b"):
        with pytest.raises(ParseError):
            parse_expression(text, mode="basic")


def test_flat_mode_operators():
    e = parse_expression("(a) & ((b) | (X[!] (c)))", mode="flat")
    assert e == op(BinaryKind.AND, SignalRef("a"),
                   op(BinaryKind.OR, SignalRef("b"), UnaryOp(UnaryKind.STRONG_NEXT, SignalRef("c"))))


def test_parse_formula_treats_names_as_signals():
    assert parse_formula("g[1] U a") == op(BinaryKind.UNTIL, SignalRef("g[1]"), SignalRef("a"))


HEADER = """INFO {
  TITLE: "t"
  DESCRIPTION: "d"
  SEMANTICS: %s
  TARGET: %s
}
"""


def spec_text(body, semantics="Mealy", target="Mealy"):
    return HEADER % (semantics, target) + body


def test_minimal_spec_has_empty_buckets():
    s = parse_spec(spec_text("MAIN { INPUTS { a; } OUTPUTS { b; } }"))
    assert [d.name for d in s.inputs] == ["a"]
    assert all(s.bucket(k) == () for k in ("initially", "preset", "require", "assert_", "assume", "guarantee"))
    assert s.info.tags == ()


@pytest.mark.parametrize("text, model, variant", [
    ("Mealy", Model.MEALY, Variant.STANDARD),
    ("Moore", Model.MOORE, Variant.STANDARD),
    ("Mealy,Finite", Model.MEALY, Variant.FINITE),
    ("Moore, Strict", Model.MOORE, Variant.STRICT),
])
def test_semantics_field(text, model, variant):
    s = parse_spec(spec_text("MAIN { INPUTS { } OUTPUTS { } }", semantics=text))
    assert (s.info.semantics.model, s.info.semantics.variant) == (model, variant)


@pytest.mark.parametrize("text, message", [
    ('INFO { TITLE: "t" DESCRIPTION: "d" SEMANTICS: Mealy } MAIN { INPUTS {} OUTPUTS {} }', "missing INFO field TARGET"),
    (spec_text("MAIN { INPUTS { } OUTPUTS { } }", semantics="Mealy,Lazy"), "unknown semantics variant"),
    (spec_text("MAIN { INPUTS { } OUTPUTS { } }", target="Turing"), "unknown system model"),
    (spec_text("MAIN { INPUTS { a; } OUTPUTS { a; } }"), "both input and output"),
    (spec_text("MAIN { INPUTS { a; } OUTPUTS { b; } ASSERT { a; } INVARIANTS { b; } }"), "duplicate section"),
    (spec_text("MAIN { INPUTS { a; } }"), "missing section OUTPUTS"),
    (spec_text("MAIN { INPUTS { a; } OUTPUTS { b; } ASSERT { a b; } }"), "expected ';'"),
])
def test_spec_errors(text, message):
    with pytest.raises(ParseError, match=message) as info:
        parse_spec(text)
    assert info.value.span is not None


def test_diagnostic_rendering():
    with pytest.raises(ParseError) as info:
        parse_spec(spec_text("MAIN { INPUTS { a; } OUTPUTS { b; } ASSERT { a && ; } }"))
    text = info.value.render("spec.tlsf")
    assert text.startswith("spec.tlsf:7:")
    assert ": error: " in text


def test_parameterized_arbiter(fixture_text):
    s = parse_spec(fixture_text("parameterized_arbiter.tlsf"))
    assert [(p.name, p.value) for p in s.parameters] == [("n", n(2))]
    assert [d.name for d in s.definitions] == ["mutual", "reqres"]
    assert [(d.name, d.width, d.polarity) for d in s.inputs] == [("r", IdentRef("n"), Polarity.INPUT)]
    assert [(d.name, d.width) for d in s.outputs] == [("g", IdentRef("n"))]
    assert s.assert_ == (FunctionApp("mutual", (IdentRef("g"),)),)
    assert len(s.guarantee) == 1 and isinstance(s.guarantee[0], BigOp)


def test_legacy_section_names(fixture_text):
    s = parse_spec(fixture_text("legacy_sections.tlsf"))
    assert len(s.assume) == len(s.assert_) == len(s.guarantee) == 1


def test_tags_and_string_fields(fixture_text):
    s = parse_spec(fixture_text("nested_comments.tlsf"))
    assert s.info.tags == ("comments", "lexer")
    assert s.info.description == "Comments /* nest */ and are dropped"
    assert parse_spec(fixture_text("strict_arbiter.tlsf")).info.tags == ()


def test_enum_declaration_and_typed_bus(fixture_text):
    s = parse_spec(fixture_text("position_enum.tlsf"))
    enum = s.definitions[0]
    assert enum.valuations[-1] == ("UNDEF", ("11*", "1*1", "*11"))
    assert enum.width == 3
    assert s.inputs[0].enum_type == "Position"
    assert s.assert_[0].lhs == EnumCompare(True, "p", "RIGHT")
    assert s.assert_[1].rhs == EnumCompare(False, "q", "UNDEF")


@pytest.mark.parametrize("decl, message", [
    ("enum E = A: 01 B: 1", "same width"),
    ("enum E = A: 0* B: 01", "shared by"),
    ("enum E = A: 02", "invalid enum pattern"),
    ("enum E = A: 0 A: 1", "duplicate identifier"),
])
def test_enum_errors(decl, message):
    with pytest.raises(ParseError, match=message):
        parse_spec(spec_text("GLOBAL { DEFINITIONS { %s; } } MAIN { INPUTS {} OUTPUTS {} }" % decl))


def test_function_cases(fixture_text):
    s = parse_spec(fixture_text("functions.tlsf"))
    fun = s.definitions[0]
    assert isinstance(fun, FunctionDecl) and fun.params == ("f",)
    first, second = fun.body.cases
    assert first.guard == PatternMatch(IdentRef("f"), op(BinaryKind.UNTIL, IdentRef("a"), IdentRef("_")))
    assert first.body == IdentRef("a")
    assert isinstance(second.guard, Otherwise)
    enc = parse_spec(fixture_text("amba_encode.tlsf"))
    value_ = next(d for d in enc.definitions if d.name == "value'")
    assert len(value_.body.cases) == 3
    assert value_.body.cases[0].guard == op(BinaryKind.GE, IdentRef("i"), IdentRef("j"))


def test_basic_format_rejects_global():
    text = spec_text("GLOBAL { PARAMETERS { n = 1; } } MAIN { INPUTS {} OUTPUTS {} }")
    with pytest.raises(ParseError, match="GLOBAL"):
        parse_spec(text, mode="basic")


def test_basic_format_file(fixture_text):
    s = parse_spec(fixture_text("moore_basic.tlsf"), mode="basic")
    assert s.guarantee[0] == UnaryOp(
        UnaryKind.GLOBALLY, op(BinaryKind.IMPLIES, SignalRef("r"), UnaryOp(UnaryKind.NEXT, SignalRef("g"))))
    with pytest.raises(ParseError):
        parse_spec(fixture_text("amba_shift.tlsf"), mode="basic")


def test_signals_in_main_become_signal_refs(fixture_text):
    s = parse_spec(fixture_text("amba_shift.tlsf"))
    assert s.assert_[0].lhs == SignalRef("HREADY")


def test_trailing_semicolon_optional(fixture_text):
    s = parse_spec(fixture_text("amba_tsingle.tlsf"))
    assert len(s.assume) == 1
