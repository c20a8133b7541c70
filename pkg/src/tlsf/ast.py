"""Expression trees and specification records shared by every stage."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Mapping, Optional, Union


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int = 1
    column: int = 1

    def __str__(self):
        return f"{self.line}:{self.column}"


def _span():
    return field(default=None, compare=False, repr=False)


class UnaryKind(enum.Enum):
    NOT = "!"
    NEXT = "X"
    STRONG_NEXT = "X[!]"
    FINALLY = "F"
    GLOBALLY = "G"
    SIZE = "SIZE"
    MIN = "MIN"
    MAX = "MAX"
    SIZEOF = "SIZEOF"


class BinaryKind(enum.Enum):
    MUL = "*"
    DIV = "/"
    MOD = "%"
    ADD = "+"
    SUB = "-"
    SETMINUS = "(\\)"
    CAP = "(*)"
    CUP = "(+)"
    EQ = "=="
    NEQ = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    IN = "IN"
    AND = "&&"
    OR = "||"
    IMPLIES = "->"
    EQUIV = "<->"
    WEAK_UNTIL = "W"
    UNTIL = "U"
    RELEASE = "R"


class BigKind(enum.Enum):
    SUM = "+"
    PROD = "*"
    CUP = "(+)"
    CAP = "(*)"
    AND = "&&"
    OR = "||"


TEMPORAL_UNARY = frozenset(
    {UnaryKind.NEXT, UnaryKind.STRONG_NEXT, UnaryKind.FINALLY, UnaryKind.GLOBALLY}
)
TEMPORAL_BINARY = frozenset(
    {BinaryKind.UNTIL, BinaryKind.WEAK_UNTIL, BinaryKind.RELEASE}
)
BOOLEAN_BINARY = frozenset(
    {BinaryKind.AND, BinaryKind.OR, BinaryKind.IMPLIES, BinaryKind.EQUIV}
)
FORMULA_BINARY = BOOLEAN_BINARY | TEMPORAL_BINARY
FORMULA_UNARY = TEMPORAL_UNARY | {UnaryKind.NOT}


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class NumLiteral(Expr):
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BoolLiteral(Expr):
    value: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SignalRef(Expr):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BusAccess(Expr):
    bus: str
    index: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class IdentRef(Expr):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FunctionApp(Expr):
    name: str
    args: tuple[Expr, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SetLiteral(Expr):
    elements: tuple[Expr, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SetRange(Expr):
    """``{start, step .. end}``."""

    start: Expr
    step: Expr
    end: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class UnaryOp(Expr):
    kind: UnaryKind
    operand: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BinaryOp(Expr):
    kind: BinaryKind
    lhs: Expr
    rhs: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Binder:
    """``name IN domain``."""

    name: str
    domain: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class RangeBinder:
    """``low <= name < high`` style binder; strictness per side."""

    name: str
    low: Expr
    low_strict: bool
    high: Expr
    high_strict: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BigOp(Expr):
    kind: BigKind
    binders: tuple[Union[Binder, RangeBinder], ...]
    body: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class EnumCompare(Expr):
    equal: bool
    bus: str
    ident: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Otherwise:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PatternMatch:
    subject: Expr
    pattern: Expr
    span: Optional[Span] = _span()


Guard = Union[None, Expr, PatternMatch, Otherwise]


@dataclass(frozen=True)
class Case:
    guard: Guard
    body: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Guarded(Expr):
    cases: tuple[Case, ...]
    span: Optional[Span] = _span()


class SugarKind(enum.Enum):
    NEXT = "X"
    FINALLY = "F"
    GLOBALLY = "G"


@dataclass(frozen=True)
class SugarTemporal(Expr):
    """``X[n] e``, ``F[n:m] e`` and ``G[n:m] e``; ``upper`` is None for X."""

    kind: SugarKind
    lower: Expr
    upper: Optional[Expr]
    strong: bool
    body: Expr
    span: Optional[Span] = _span()


TRUE = BoolLiteral(True)
FALSE = BoolLiteral(False)


# -- specification records -------------------------------------------------


class Model(enum.Enum):
    MEALY = "Mealy"
    MOORE = "Moore"


class Variant(enum.Enum):
    STANDARD = "Standard"
    STRICT = "Strict"
    FINITE = "Finite"


@dataclass(frozen=True)
class Semantics:
    model: Model
    variant: Variant = Variant.STANDARD

    def __str__(self):
        if self.variant is Variant.STANDARD:
            return self.model.value
        return f"{self.model.value},{self.variant.value}"


@dataclass(frozen=True)
class Info:
    title: str
    description: str
    semantics: Semantics
    target: Model
    tags: tuple[str, ...] = ()


class Polarity(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class SignalDecl:
    """A signal, a sized bus (``width`` set) or an enum-typed bus (``enum_type`` set)."""

    name: str
    polarity: Polarity
    width: Optional[Expr] = None
    enum_type: Optional[str] = None
    span: Optional[Span] = _span()

    @property
    def is_bus(self):
        return self.width is not None or self.enum_type is not None


@dataclass(frozen=True)
class EnumDecl:
    name: str
    valuations: tuple[tuple[str, tuple[str, ...]], ...]
    span: Optional[Span] = _span()

    @property
    def width(self):
        return len(self.valuations[0][1][0])

    def patterns(self, ident):
        for name, pats in self.valuations:
            if name == ident:
                return pats
        raise KeyError(ident)


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: tuple[str, ...]
    body: Guarded
    span: Optional[Span] = _span()

    @property
    def arity(self):
        return len(self.params)


@dataclass(frozen=True)
class Binding:
    name: str
    value: Expr
    span: Optional[Span] = _span()


Definition = Union[FunctionDecl, EnumDecl, Binding]

BUCKETS = ("initially", "preset", "require", "assert_", "assume", "guarantee")

SECTION_NAMES = {
    "initially": "INITIALLY",
    "preset": "PRESET",
    "require": "REQUIRE",
    "assert_": "ASSERT",
    "assume": "ASSUME",
    "guarantee": "GUARANTEE",
}


@dataclass(frozen=True)
class Specification:
    info: Info
    parameters: tuple[Binding, ...] = ()
    definitions: tuple[Definition, ...] = ()
    inputs: tuple[SignalDecl, ...] = ()
    outputs: tuple[SignalDecl, ...] = ()
    initially: tuple[Expr, ...] = ()
    preset: tuple[Expr, ...] = ()
    require: tuple[Expr, ...] = ()
    assert_: tuple[Expr, ...] = ()
    assume: tuple[Expr, ...] = ()
    guarantee: tuple[Expr, ...] = ()
    has_global: bool = field(default=False, compare=False)

    def bucket(self, name):
        return getattr(self, name)


# -- tree utilities -------------------------------------------------------


def children(node):
    """Direct sub-expressions of ``node`` in field order."""
    out = []
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        _collect(value, out)
    return out


def _collect(value, out):
    if isinstance(value, Expr):
        out.append(value)
    elif isinstance(value, (Binder, RangeBinder, Case, PatternMatch)):
        out.extend(children(value))
    elif isinstance(value, tuple):
        for item in value:
            _collect(item, out)


def walk(node):
    """Pre-order traversal of an expression tree."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(children(current)))


def size(node):
    return sum(1 for _ in walk(node))


def substitute(e: Expr, binding: Mapping[str, Expr]) -> Expr:
    """Replace every ``IdentRef`` whose name is a key of ``binding``."""
    if isinstance(e, IdentRef):
        return binding.get(e.name, e)
    return _rebuild(e, lambda child: substitute(child, binding))


def _rebuild(node, fn):
    if not is_dataclass(node):
        return node
    changes = {}
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        new = _map_value(value, fn)
        if new is not value:
            changes[f.name] = new
    if not changes:
        return node
    return type(node)(**{**{f.name: getattr(node, f.name) for f in fields(node)}, **changes})


def _map_value(value, fn):
    if isinstance(value, Expr):
        return fn(value)
    if isinstance(value, (Binder, RangeBinder, Case, PatternMatch)):
        return _rebuild(value, fn)
    if isinstance(value, tuple):
        mapped = tuple(_map_value(v, fn) for v in value)
        if all(a is b for a, b in zip(mapped, value)):
            return value
        return mapped
    return value


def structurally_equal(a, b) -> bool:
    """Node-for-node equality, ignoring source spans."""
    return a == b


def strip_spans(node):
    """Copy of ``node`` with every span removed (useful for dumps)."""
    if not is_dataclass(node):
        return node
    values = {}
    for f in fields(node):
        value = getattr(node, f.name)
        if f.name == "span":
            value = None
        else:
            value = _strip_value(value)
        values[f.name] = value
    return type(node)(**values)


def _strip_value(value):
    if is_dataclass(value) and not isinstance(value, type):
        return strip_spans(value)
    if isinstance(value, tuple):
        return tuple(_strip_value(v) for v in value)
    return value


# -- formula constructors -------------------------------------------------


def Not(a):
    return UnaryOp(UnaryKind.NOT, a)


def Next(a):
    return UnaryOp(UnaryKind.NEXT, a)


def StrongNext(a):
    return UnaryOp(UnaryKind.STRONG_NEXT, a)


def Finally(a):
    return UnaryOp(UnaryKind.FINALLY, a)


def Globally(a):
    return UnaryOp(UnaryKind.GLOBALLY, a)


def And(a, b):
    return BinaryOp(BinaryKind.AND, a, b)


def Or(a, b):
    return BinaryOp(BinaryKind.OR, a, b)


def Implies(a, b):
    return BinaryOp(BinaryKind.IMPLIES, a, b)


def Equiv(a, b):
    return BinaryOp(BinaryKind.EQUIV, a, b)


def Until(a, b):
    return BinaryOp(BinaryKind.UNTIL, a, b)


def WeakUntil(a, b):
    return BinaryOp(BinaryKind.WEAK_UNTIL, a, b)


def Release(a, b):
    return BinaryOp(BinaryKind.RELEASE, a, b)


def conjoin(items):
    """Left-nested conjunction; ``true`` when empty."""
    items = list(items)
    if not items:
        return TRUE
    out = items[0]
    for item in items[1:]:
        out = And(out, item)
    return out


def disjoin(items):
    items = list(items)
    if not items:
        return FALSE
    out = items[0]
    for item in items[1:]:
        out = Or(out, item)
    return out


def is_formula(node) -> bool:
    """True for trees built only from literals, atomic signals and LTL connectives."""
    for n in walk(node):
        if isinstance(n, (BoolLiteral, SignalRef)):
            continue
        if isinstance(n, UnaryOp) and n.kind in FORMULA_UNARY:
            continue
        if isinstance(n, BinaryOp) and n.kind in FORMULA_BINARY:
            continue
        return False
    return True


def atoms(node):
    return {n.name for n in walk(node) if isinstance(n, SignalRef)}
