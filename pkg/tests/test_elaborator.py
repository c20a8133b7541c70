import pytest

from tlsf.ast import (
    BigKind, Binder, BusAccess, IdentRef, Not, NumLiteral, Polarity, SetLiteral, SignalDecl,
    SignalRef, SugarKind, SugarTemporal, And, Or, Until, Next, TRUE, FALSE, walk,
)
from tlsf.elaborator import (
    BusValue, Environment, Scope, apply_function, desugar_enum_compare, desugar_temporal,
    elaborate, enum_implicit_constraints, eval_numeric, eval_set_range, expand_big_operator,
    pattern_match,
)
from tlsf.errors import ElaborationError
from tlsf.ltlf import evaluate
from tlsf.parser import parse_expression, parse_formula, parse_spec

from oracles import expand_bits, set_builder


def env_for(text, finite=True, cap=10_000):
    spec = parse_spec(text)
    env = Environment(finite=finite, recursion_cap=cap)
    env.bind_parameters(spec.parameters)
    env.install_definitions(spec.definitions)
    for decl in spec.inputs + spec.outputs:
        env.declare_signal(decl)
    enum_idents = set(env.enum_idents)
    signals = set(env.signals)
    return env, lambda src: env.eval(parse_expression(src, enum_idents=enum_idents, signals=signals), Scope())


def globals_spec(definitions, signals="", semantics="Mealy,Finite"):
    return f"""INFO {{ TITLE: "t" DESCRIPTION: "d" SEMANTICS: {semantics} TARGET: Mealy }}
GLOBAL {{ PARAMETERS {{ n = 2; }} DEFINITIONS {{ {definitions} }} }}
MAIN {{ INPUTS {{ {signals} }} OUTPUTS {{ }} }}"""


@pytest.mark.parametrize("text, value", [
    ("7 / 2", 3), ("7 % 2", 1), ("2 + 3 * 4", 14), ("|{1, 2, 2}|", 2),
    ("MIN {1, 3 .. 9}", 1), ("MAX {1, 3 .. 9}", 9), ("MIN {3, 5 .. 9}", 3), ("|{}|", 0),
])
def test_numeric(text, value):
    assert eval_numeric(parse_expression(text)) == value


@pytest.mark.parametrize("text, message", [
    ("2 - 5", "negative"), ("1 / 0", "division by zero"), ("1 % 0", "division by zero"),
    ("MIN {}", "empty set"), ("MAX {}", "empty set"), ("{3, 1 .. 9}", "requires 3 < 1"),
    ("x + 1", "unbound identifier x"), ("SIZEOF 3", "SIZEOF needs a bus"),
])
def test_numeric_errors(text, message):
    with pytest.raises(ElaborationError, match=message) as info:
        Environment().eval(parse_expression(text), Scope())
    assert info.value.span is not None


def test_sizeof_bus():
    _, ev = env_for(globals_spec("", "b[5];"))
    assert ev("SIZEOF b") == 5


@pytest.mark.parametrize("x, y, z, expected", [
    (0, 1, 4, {0, 1, 2, 3, 4}), (1, 3, 8, {1, 3, 5, 7}), (5, 6, 4, set()),
])
def test_set_range_examples(x, y, z, expected):
    assert eval_set_range(x, y, z) == expected == set_builder(x, y, z)


def test_set_range_side_condition():
    for x, y in ((3, 3), (4, 2)):
        with pytest.raises(ElaborationError):
            eval_set_range(x, y, 10)


def test_encode_functions(fixture_text):
    _, ev = env_for(fixture_text("amba_encode.tlsf"))
    assert ev("bit(6, 1)") == 1
    assert ev("bit(6, 0)") == 0
    assert ev("log2(1)") == 1
    assert ev("log2(8)") == 4  # the recursion counts one past the floor
    # value(HMASTER, 1) for a one-bit bus is just the bit itself
    assert ev("value(HMASTER, 1)") == And(TRUE, SignalRef("HMASTER[0]"))


def test_pattern_match_examples():
    subject = parse_formula("a U (b && c)")
    ok, bound = pattern_match(subject, parse_expression("x U _"))
    assert ok and bound == {"x": SignalRef("a")}
    assert pattern_match(parse_formula("X a"), parse_expression("x U y")) == (False, {})
    ok, bound = pattern_match(parse_formula("a && a"), parse_expression("x && x"))
    assert ok and bound == {"x": SignalRef("a")}
    assert not pattern_match(parse_formula("a && b"), parse_expression("x && x"))[0]
    assert pattern_match(parse_formula("G a"), parse_expression("_"))[0]


def test_pattern_guards_and_otherwise(fixture_text):
    _, ev = env_for(fixture_text("functions.tlsf"))
    assert ev("fun(r U g)") == SignalRef("r")
    assert ev("fun(X r)") == Next(Next(SignalRef("r")))
    assert ev("unfold(g, 2)") == Next(Next(SignalRef("g")))
    assert ev("total") == 12


def test_apply_function_directly(fixture_text):
    spec = parse_spec(fixture_text("amba_encode.tlsf"))
    env = Environment()
    env.install_definitions(spec.definitions)
    log2 = next(d for d in spec.definitions if d.name == "log2")
    assert [apply_function(log2, [x], env) for x in (1, 2, 3, 4, 8)] == [1, 2, 2, 3, 4]


def test_first_matching_case_wins():
    _, ev = env_for(globals_spec("f(x) = x > 1 : 10 x > 0 : 20 otherwise : 30;"))
    assert [ev(f"f({k})") for k in (2, 1, 0)] == [10, 20, 30]


def test_no_matching_case():
    _, ev = env_for(globals_spec("f(x) = x > 1 : 10;"))
    with pytest.raises(ElaborationError, match="no case"):
        ev("f(0)")


def test_recursion_cap():
    _, ev = env_for(globals_spec("down(x) = x == 0 : 0 otherwise : down(x - 1);"), cap=50)
    assert ev("down(40)") == 0
    with pytest.raises(ElaborationError, match="recursion cap"):
        ev("down(200)")


def test_deep_recursion_is_reported_not_crashed():
    _, ev = env_for(globals_spec("down(x) = x == 0 : 0 otherwise : down(x - 1);"), cap=10 ** 9)
    try:
        assert ev("down(20000)") == 0
    except ElaborationError as err:
        assert "too deep" in err.message or "recursion cap" in err.message


def test_self_dependent_definition():
    _, ev = env_for(globals_spec("a = b + 1; b = a;"))
    with pytest.raises(ElaborationError, match="depends on itself"):
        ev("a")


def test_function_result_kinds_must_agree():
    with pytest.raises(ElaborationError, match="mix result types"):
        env_for(globals_spec("f(x) = x > 0 : 1 otherwise : true;"))


def test_big_operators():
    assert expand_big_operator(BigKind.SUM, [Binder("i", SetLiteral(()))], IdentRef("i")) == 0
    assert expand_big_operator(BigKind.PROD, [Binder("i", SetLiteral(()))], IdentRef("i")) == 1
    assert expand_big_operator(BigKind.AND, [Binder("i", SetLiteral(()))], IdentRef("i")) == TRUE
    assert expand_big_operator(BigKind.OR, [Binder("i", SetLiteral(()))], IdentRef("i")) == FALSE
    assert expand_big_operator(BigKind.CUP, [Binder("i", SetLiteral(()))], IdentRef("i")) == frozenset()
    with pytest.raises(ElaborationError, match="empty domain"):
        expand_big_operator(BigKind.CAP, [Binder("i", SetLiteral(()))], IdentRef("i"))
    assert eval_numeric(parse_expression("+[i IN {1, 2 .. 4}] (i * i)")) == 30
    # later binder domains see earlier binders
    assert eval_numeric(parse_expression("*[i IN {1, 2 .. 4}, j IN {0, i .. i}] (j + 1)")) == 120


def test_bounded_binder_and_bus():
    _, ev = env_for(globals_spec("", "b[2];"))
    assert ev("&&[0 <= i < 2] b[i]") == And(SignalRef("b[0]"), SignalRef("b[1]"))
    assert ev("&&[0 <= i < 0] b[i]") == TRUE
    assert ev("||[1 <= i <= 1] b[i]") == SignalRef("b[1]")
    with pytest.raises(ElaborationError, match="out of range"):
        ev("b[2]")


def test_mutual_exclusion_expansion(fixture_text):
    _, ev = env_for(fixture_text("parameterized_arbiter.tlsf"))
    g0, g1 = SignalRef("g[0]"), SignalRef("g[1]")
    assert ev("mutual(g)") == Or(Not(And(g0, g1)), Not(And(g1, g0)))


def test_sugar_desugaring():
    a = IdentRef("a")
    assert desugar_temporal(SugarTemporal(SugarKind.NEXT, NumLiteral(0), None, False, a)) == a
    assert desugar_temporal(SugarTemporal(SugarKind.FINALLY, NumLiteral(1), NumLiteral(1), False, a)) == Next(a)
    with pytest.raises(ElaborationError, match="exceeds"):
        desugar_temporal(SugarTemporal(SugarKind.GLOBALLY, NumLiteral(3), NumLiteral(1), False, a))
    _, ev = env_for(globals_spec("", "a;"))
    assert ev("F[n:n] a") == Next(Next(SignalRef("a")))


def test_strong_next_needs_finite():
    _, ev = env_for(globals_spec("", "a;", semantics="Mealy"), finite=False)
    for text in ("X[!] a", "G[!1:2] a"):
        with pytest.raises(ElaborationError, match="Finite"):
            ev(text)


def test_enum_expansions(fixture_text):
    enum = parse_spec(fixture_text("position_enum.tlsf")).definitions[0]
    rows = [frozenset(f"b[{k}]" for k, c in enumerate(bits) if c == "1") for bits in sorted(expand_bits("***"))]
    for ident, patterns in enum.valuations:
        members = set().union(*(expand_bits(p) for p in patterns))
        eq = desugar_enum_compare(True, "b", ident, [enum])
        neq = desugar_enum_compare(False, "b", ident, [enum])
        for bits, row in zip(sorted(expand_bits("***")), rows):
            assert evaluate(eq, [row]) == (bits in members), (ident, bits)
            assert evaluate(neq, [row]) != (bits in members)
    assert desugar_enum_compare(True, "b", "LEFT", [enum]) == parse_formula("b[0] && !b[1] && !b[2]")
    with pytest.raises(ElaborationError, match="width"):
        desugar_enum_compare(True, "b", "LEFT", [enum], width=2)


def test_enum_implicit_constraints(fixture_text):
    enum = parse_spec(fixture_text("position_enum.tlsf")).definitions[0]
    decl = SignalDecl("p", Polarity.INPUT, None, "Position")
    formula, bucket = enum_implicit_constraints(decl, [enum])
    assert bucket == "require"
    # Position names 7 of the 8 valuations; only 000 is excluded
    for bits in expand_bits("***"):
        row = frozenset(f"p[{k}]" for k, c in enumerate(bits) if c == "1")
        assert evaluate(formula, [row]) == (bits != "000")
    out = SignalDecl("q", Polarity.OUTPUT, None, "Position")
    assert enum_implicit_constraints(out, [enum])[1] == "assert_"
    assert enum_implicit_constraints(SignalDecl("s", Polarity.INPUT), [enum]) is None


def test_elaborated_enum_spec(fixture_text):
    elab = elaborate(parse_spec(fixture_text("position_enum.tlsf")))
    assert elab.inputs == ("p[0]", "p[1]", "p[2]")
    assert len(elab.require) == 1 and len(elab.assert_) == 3


@pytest.mark.parametrize("n", [1, 2, 4])
def test_arbiter_overrides(fixture_text, n):
    elab = elaborate(parse_spec(fixture_text("parameterized_arbiter.tlsf")), {"n": n})
    assert elab.inputs == tuple(f"r[{i}]" for i in range(n))
    assert elab.outputs == tuple(f"g[{i}]" for i in range(n))
    names = {x.name for f in elab.guarantee for x in walk(f) if isinstance(x, SignalRef)}
    assert names == set(elab.inputs) | set(elab.outputs)


def test_unknown_override(fixture_text):
    with pytest.raises(ElaborationError, match="unknown parameter m"):
        elaborate(parse_spec(fixture_text("parameterized_arbiter.tlsf")), {"m": 3})


def test_every_fixture_elaborates_to_closed_formulas():
    from conftest import FIXTURE_FILES
    for path in FIXTURE_FILES:
        mode = "basic" if path.name == "moore_basic.tlsf" else "full"
        elab = elaborate(parse_spec(path.read_text(encoding="utf-8"), mode))
        declared = set(elab.inputs) | set(elab.outputs)
        for bucket in ("initially", "preset", "require", "assert_", "assume", "guarantee"):
            for f in elab.bucket(bucket):
                assert {x.name for x in walk(f) if isinstance(x, SignalRef)} <= declared, path.name


def test_undeclared_signal():
    text = globals_spec("", "a;").replace("OUTPUTS { }", "OUTPUTS { } ASSERT { a && zz; }")
    with pytest.raises(ElaborationError, match="zz"):
        elaborate(parse_spec(text))


def test_binder_scopes_over_globals():
    text = globals_spec("", "b[2];").replace("OUTPUTS { }", "OUTPUTS { } ASSERT { &&[n IN {0}] b[n]; }")
    assert elaborate(parse_spec(text)).assert_ == (SignalRef("b[0]"),)


def test_function_argument_must_be_fresh():
    with pytest.raises(ElaborationError, match="shadows"):
        elaborate(parse_spec(globals_spec("f(n) = n;")))


def test_bus_value():
    assert BusValue("b", 2).signal(1) == SignalRef("b[1]")
    assert isinstance(parse_expression("b[1]"), BusAccess)


def test_until_passes_through():
    _, ev = env_for(globals_spec("", "a; c;"))
    assert ev("a U c") == Until(SignalRef("a"), SignalRef("c"))
