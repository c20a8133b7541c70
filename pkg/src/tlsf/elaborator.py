"""Evaluation of the high-level layer down to plain LTL/LTLf formulas.

Values produced while elaborating are plain Python objects:

* naturals are ``int``
* formulas (booleans included) are expression trees over ``SignalRef`` and
  the logical/temporal connectives
* buses are :class:`BusValue`, enumeration identifiers :class:`EnumValue`
* sets are ``frozenset`` of one of the above

Boolean subexpressions are not constant folded: ``true && a`` stays as written.
Guards are the exception, they must reduce to a closed truth value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .ast import (
    BUCKETS,
    FALSE,
    TRUE,
    BigKind,
    BigOp,
    BinaryKind,
    BinaryOp,
    BoolLiteral,
    BusAccess,
    EnumCompare,
    EnumDecl,
    Expr,
    FunctionDecl,
    IdentRef,
    Info,
    Model,
    Not,
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
    Specification,
    SugarKind,
    SugarTemporal,
    UnaryKind,
    UnaryOp,
    Variant,
    conjoin,
    disjoin,
    is_formula,
    walk,
)
from .errors import ElaborationError
from .parser import expand_pattern

DEFAULT_RECURSION_CAP = 10_000
WILDCARD = "_"


@dataclass(frozen=True)
class BusValue:
    name: str
    width: int

    def signal(self, index):
        return SignalRef(f"{self.name}[{index}]")


@dataclass(frozen=True)
class EnumValue:
    name: str


@dataclass(frozen=True)
class ElaboratedSpec:
    info: Info
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    initially: tuple[Expr, ...] = ()
    preset: tuple[Expr, ...] = ()
    require: tuple[Expr, ...] = ()
    assert_: tuple[Expr, ...] = ()
    assume: tuple[Expr, ...] = ()
    guarantee: tuple[Expr, ...] = ()

    def bucket(self, name):
        return getattr(self, name)

    @property
    def semantics(self) -> Semantics:
        return self.info.semantics

    @property
    def target(self) -> Model:
        return self.info.target

    @property
    def theta_e(self):
        return conjoin(self.initially)

    @property
    def theta_s(self):
        return conjoin(self.preset)

    @property
    def psi_e(self):
        return conjoin(self.require)

    @property
    def psi_s(self):
        return conjoin(self.assert_)

    @property
    def phi_e(self):
        return conjoin(self.assume)

    @property
    def phi_s(self):
        return conjoin(self.guarantee)


# -- value helpers ----------------------------------------------------------


def kind_of(value):
    if isinstance(value, bool):
        return "formula"
    if isinstance(value, int):
        return "number"
    if isinstance(value, Expr):
        return "formula"
    if isinstance(value, BusValue):
        return "bus"
    if isinstance(value, EnumValue):
        return "enum"
    if isinstance(value, frozenset):
        return "set"
    return type(value).__name__


def sort_key(value):
    if isinstance(value, int):
        return (0, value, "")
    return (1, 0, repr(value))


def sorted_values(values):
    return sorted(values, key=sort_key)


def truth(formula, span=None) -> bool:
    """Truth value of a closed propositional formula (no signals, no temporal operators)."""
    if isinstance(formula, BoolLiteral):
        return formula.value
    if isinstance(formula, UnaryOp) and formula.kind is UnaryKind.NOT:
        return not truth(formula.operand, span)
    if isinstance(formula, BinaryOp):
        k = formula.kind
        if k is BinaryKind.AND:
            return truth(formula.lhs, span) and truth(formula.rhs, span)
        if k is BinaryKind.OR:
            return truth(formula.lhs, span) or truth(formula.rhs, span)
        if k is BinaryKind.IMPLIES:
            return (not truth(formula.lhs, span)) or truth(formula.rhs, span)
        if k is BinaryKind.EQUIV:
            return truth(formula.lhs, span) == truth(formula.rhs, span)
    raise ElaborationError("guard does not reduce to a constant boolean", span)


def eval_set_range(x: int, y: int, z: int) -> frozenset:
    """``{x, y .. z}``: every n with x <= n <= z reachable from x in steps of y - x."""
    if not x < y:
        raise ElaborationError(f"set range {{{x}, {y} .. {z}}} requires {x} < {y}")
    return frozenset(range(x, z + 1, y - x))


def expand_enum_compare(equal: bool, bus: BusValue, decl: EnumDecl, ident: str) -> Expr:
    """One clause per pattern: bit k of the pattern constrains ``bus[k]``; ``*`` bits are dropped."""
    if bus.width != decl.width:
        raise ElaborationError(
            f"bus {bus.name} has width {bus.width} but enum {decl.name} has width {decl.width}"
        )
    clauses = []
    for pattern in decl.patterns(ident):
        literals = []
        for k, bit in enumerate(pattern):
            if bit == "1":
                literals.append(bus.signal(k))
            elif bit == "0":
                literals.append(Not(bus.signal(k)))
        clause = conjoin(literals)
        if clause not in clauses:
            clauses.append(clause)
    formula = disjoin(clauses)
    return formula if equal else Not(formula)


def enum_coverage(decl: EnumDecl) -> set:
    covered = set()
    for _, patterns in decl.valuations:
        for p in patterns:
            covered.update(expand_pattern(p))
    return covered


def pattern_match(subject, pattern) -> tuple[bool, dict]:
    """Match a formula against a pattern tree.

    Identifiers in the pattern bind subtrees, ``_`` matches anything and a
    repeated identifier must bind equal subtrees.
    """
    bindings = {}

    def match(s, p):
        if isinstance(p, IdentRef):
            if p.name == WILDCARD:
                return True
            if p.name in bindings:
                return bindings[p.name] == s
            bindings[p.name] = s
            return True
        if type(s) is not type(p):
            return False
        if isinstance(p, UnaryOp):
            return s.kind is p.kind and match(s.operand, p.operand)
        if isinstance(p, BinaryOp):
            return s.kind is p.kind and match(s.lhs, p.lhs) and match(s.rhs, p.rhs)
        return s == p

    ok = match(subject, pattern)
    return ok, (bindings if ok else {})


def _nexts(n, body, strong):
    for _ in range(n):
        body = UnaryOp(UnaryKind.STRONG_NEXT if strong else UnaryKind.NEXT, body)
    return body


def sugar_shape(kind: SugarKind, lower: int, upper: Optional[int], strong: bool, body: Expr) -> Expr:
    if kind is SugarKind.NEXT:
        return _nexts(lower, body, strong)
    if upper is None:
        raise ElaborationError(f"{kind.value}[n:m] needs an upper bound")
    if lower > upper:
        raise ElaborationError(f"{kind.value}[{lower}:{upper}]: lower bound exceeds upper bound")
    op = BinaryKind.OR if kind is SugarKind.FINALLY else BinaryKind.AND
    chain = body
    for _ in range(upper - lower):
        chain = BinaryOp(op, body, _nexts(1, chain, strong))
    return _nexts(lower, chain, strong)


# -- static result kinds ----------------------------------------------------

_NUM_BINARY = {BinaryKind.MUL, BinaryKind.DIV, BinaryKind.MOD, BinaryKind.ADD, BinaryKind.SUB}
_SET_BINARY = {BinaryKind.SETMINUS, BinaryKind.CAP, BinaryKind.CUP}


def static_kind(e) -> Optional[str]:
    """Coarse syntactic result kind, ``None`` when it depends on bindings."""
    if isinstance(e, NumLiteral):
        return "number"
    if isinstance(e, (BoolLiteral, SignalRef, BusAccess, EnumCompare, SugarTemporal)):
        return "formula"
    if isinstance(e, (SetLiteral, SetRange)):
        return "set"
    if isinstance(e, UnaryOp):
        if e.kind in (UnaryKind.SIZE, UnaryKind.MIN, UnaryKind.MAX, UnaryKind.SIZEOF):
            return "number"
        return "formula"
    if isinstance(e, BinaryOp):
        if e.kind in _NUM_BINARY:
            return "number"
        if e.kind in _SET_BINARY:
            return "set"
        return "formula"
    if isinstance(e, BigOp):
        if e.kind in (BigKind.SUM, BigKind.PROD):
            return "number"
        if e.kind in (BigKind.CUP, BigKind.CAP):
            return "set"
        return "formula"
    return None


def check_function(decl: FunctionDecl):
    kinds = {}
    otherwise = 0
    for case in decl.body.cases:
        if isinstance(case.guard, Otherwise):
            otherwise += 1
        k = static_kind(case.body)
        if k is not None:
            kinds.setdefault(k, case)
    if otherwise > 1:
        raise ElaborationError(f"function {decl.name} has more than one otherwise case", decl.span)
    if len(kinds) > 1:
        names = " and ".join(sorted(kinds))
        raise ElaborationError(f"cases of function {decl.name} mix result types ({names})", decl.span)
    if len(set(decl.params)) != len(decl.params):
        raise ElaborationError(f"function {decl.name} repeats an argument name", decl.span)


# -- environment --------------------------------------------------------------


class Scope:
    """Local bindings chained to an enclosing scope."""

    def __init__(self, values=None, parent=None):
        self.values = dict(values or {})
        self.parent = parent

    def lookup(self, name):
        scope = self
        while scope is not None:
            if name in scope.values:
                return True, scope.values[name]
            scope = scope.parent
        return False, None

    def child(self, values):
        return Scope(values, self)


_PENDING = object()


class Environment:
    """Global tables plus the evaluator for expressions."""

    def __init__(self, finite=True, recursion_cap=DEFAULT_RECURSION_CAP):
        self.finite = finite
        self.recursion_cap = recursion_cap
        self.parameters = {}
        self.functions = {}
        self.enums = {}
        self.enum_idents = {}
        self.bindings = {}
        self.binding_values = {}
        self.signals = {}
        self.atomic = []
        self.applications = 0
        self.memo = {}

    # -- installation --

    def _claim(self, name, span):
        if (
            name in self.parameters or name in self.functions or name in self.enums
            or name in self.bindings or name in self.enum_idents
        ):
            raise ElaborationError(f"{name} is defined more than once", span)

    def bind_parameters(self, parameters, overrides=None):
        overrides = dict(overrides or {})
        known = {p.name for p in parameters}
        for name in overrides:
            if name not in known:
                raise ElaborationError(f"unknown parameter {name}")
        for p in parameters:
            self._claim(p.name, p.span)
            if p.name in overrides:
                value = overrides[p.name]
                if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                    raise ElaborationError(f"override for {p.name} must be a natural number", p.span)
            else:
                value = self.eval(p.value, Scope())
            self.parameters[p.name] = value

    def install_definitions(self, definitions):
        for d in definitions:
            self._claim(d.name, d.span)
            if isinstance(d, FunctionDecl):
                check_function(d)
                self.functions[d.name] = d
            elif isinstance(d, EnumDecl):
                self.enums[d.name] = d
                for ident, _ in d.valuations:
                    if ident in self.enum_idents:
                        raise ElaborationError(f"enum identifier {ident} declared twice", d.span)
                    self.enum_idents[ident] = d
            else:
                self.bindings[d.name] = d

    def declare_signal(self, decl: SignalDecl):
        if decl.name in self.signals:
            raise ElaborationError(f"signal {decl.name} declared twice", decl.span)
        if decl.enum_type is not None:
            enum = self.enums.get(decl.enum_type)
            if enum is None:
                raise ElaborationError(f"unknown enum type {decl.enum_type}", decl.span)
            value = BusValue(decl.name, enum.width)
        elif decl.width is not None:
            width = self.eval(decl.width, Scope())
            if kind_of(width) != "number":
                raise ElaborationError(f"width of bus {decl.name} is not a number", decl.span)
            value = BusValue(decl.name, width)
        else:
            value = SignalRef(decl.name)
        self.signals[decl.name] = value
        names = [value.name] if isinstance(value, SignalRef) else [
            value.signal(i).name for i in range(value.width)
        ]
        taken = set(self.atomic)
        for n in names:
            if n in taken:
                raise ElaborationError(f"signal {n} declared twice", decl.span)
            self.atomic.append(n)
        return names

    def check_shadowing(self):
        globals_ = set(self.parameters) | set(self.bindings) | set(self.signals) | set(self.functions)
        for f in self.functions.values():
            for p in f.params:
                if p in globals_:
                    raise ElaborationError(
                        f"argument {p} of function {f.name} shadows a global name", f.span
                    )

    # -- lookup --

    def lookup(self, name, scope, span=None):
        found, value = scope.lookup(name)
        if found:
            return value
        if name in self.parameters:
            return self.parameters[name]
        if name in self.bindings:
            cached = self.binding_values.get(name)
            if cached is _PENDING:
                raise ElaborationError(f"definition of {name} depends on itself", span)
            if cached is not None:
                return cached
            self.binding_values[name] = _PENDING
            try:
                value = self.eval(self.bindings[name].value, Scope())
            except BaseException:
                del self.binding_values[name]
                raise
            self.binding_values[name] = value
            return value
        if name in self.signals:
            return self.signals[name]
        if name in self.enum_idents:
            return EnumValue(name)
        if name in self.functions:
            raise ElaborationError(f"function {name} used without arguments", span)
        if name == WILDCARD:
            raise ElaborationError("wildcard _ is only allowed inside patterns", span)
        raise ElaborationError(f"unbound identifier {name}", span)

    # -- evaluation --

    def eval(self, e, scope):
        method = getattr(self, "_eval_" + type(e).__name__, None)
        if method is None:
            raise ElaborationError(f"cannot evaluate {type(e).__name__} here", getattr(e, "span", None))
        return method(e, scope)

    def eval_number(self, e, scope):
        v = self.eval(e, scope)
        if kind_of(v) != "number":
            raise ElaborationError(f"expected a number, got a {kind_of(v)}", e.span)
        return v

    def eval_formula(self, e, scope):
        v = self.eval(e, scope)
        if kind_of(v) != "formula":
            raise ElaborationError(f"expected a formula, got a {kind_of(v)}", e.span)
        return v

    def eval_set(self, e, scope):
        v = self.eval(e, scope)
        if kind_of(v) != "set":
            raise ElaborationError(f"expected a set, got a {kind_of(v)}", e.span)
        return v

    def _eval_NumLiteral(self, e, scope):
        return e.value

    def _eval_BoolLiteral(self, e, scope):
        return TRUE if e.value else FALSE

    def _eval_SignalRef(self, e, scope):
        value = self.signals.get(e.name)
        if isinstance(value, SignalRef):
            return value
        found, local = scope.lookup(e.name)
        if found:
            return local
        if isinstance(value, BusValue):
            return value
        raise ElaborationError(f"undeclared signal {e.name}", e.span)

    def _eval_IdentRef(self, e, scope):
        return self.lookup(e.name, scope, e.span)

    def _eval_BusAccess(self, e, scope):
        bus = self.lookup(e.bus, scope, e.span)
        if not isinstance(bus, BusValue):
            raise ElaborationError(f"{e.bus} is not a bus", e.span)
        index = self.eval_number(e.index, scope)
        if index >= bus.width:
            raise ElaborationError(
                f"index {index} out of range for bus {bus.name} of width {bus.width}", e.span
            )
        return bus.signal(index)

    def _eval_FunctionApp(self, e, scope):
        decl = self.functions.get(e.name)
        if decl is None:
            raise ElaborationError(f"unknown function {e.name}", e.span)
        args = tuple(self.eval(a, scope) for a in e.args)
        return self.apply(decl, args, e.span)

    def _eval_SetLiteral(self, e, scope):
        values = [self.eval(x, scope) for x in e.elements]
        return self._make_set(values, e.span)

    def _make_set(self, values, span=None):
        kinds = {kind_of(v) for v in values}
        if len(kinds) > 1:
            raise ElaborationError("set elements must all have the same type", span)
        return frozenset(values)

    def _eval_SetRange(self, e, scope):
        x, y, z = (self.eval_number(p, scope) for p in (e.start, e.step, e.end))
        try:
            return eval_set_range(x, y, z)
        except ElaborationError as err:
            raise ElaborationError(err.message, e.span) from None

    def _eval_UnaryOp(self, e, scope):
        k = e.kind
        if k is UnaryKind.SIZE:
            return len(self.eval_set(e.operand, scope))
        if k in (UnaryKind.MIN, UnaryKind.MAX):
            values = self.eval_set(e.operand, scope)
            if not values:
                raise ElaborationError(f"{k.value} of an empty set", e.span)
            if any(kind_of(v) != "number" for v in values):
                raise ElaborationError(f"{k.value} needs a set of numbers", e.span)
            return min(values) if k is UnaryKind.MIN else max(values)
        if k is UnaryKind.SIZEOF:
            bus = self.eval(e.operand, scope)
            if not isinstance(bus, BusValue):
                raise ElaborationError("SIZEOF needs a bus", e.span)
            return bus.width
        if k is UnaryKind.STRONG_NEXT and not self.finite:
            raise ElaborationError("strong next X[!] is only allowed under Finite semantics", e.span)
        return UnaryOp(k, self.eval_formula(e.operand, scope))

    def _eval_BinaryOp(self, e, scope):
        k = e.kind
        if k in (BinaryKind.EQ, BinaryKind.NEQ):
            lhs, rhs = self.eval(e.lhs, scope), self.eval(e.rhs, scope)
            return self._equality(k is BinaryKind.EQ, lhs, rhs, e.span)
        if k in _NUM_BINARY or k in (BinaryKind.LT, BinaryKind.LE, BinaryKind.GT, BinaryKind.GE):
            a, b = self.eval_number(e.lhs, scope), self.eval_number(e.rhs, scope)
            return self._arith(k, a, b, e.span)
        if k in _SET_BINARY:
            a, b = self.eval_set(e.lhs, scope), self.eval_set(e.rhs, scope)
            if a and b and kind_of(next(iter(a))) != kind_of(next(iter(b))):
                raise ElaborationError("set operands have different element types", e.span)
            if k is BinaryKind.SETMINUS:
                return a - b
            if k is BinaryKind.CAP:
                return a & b
            return a | b
        if k is BinaryKind.IN:
            element, domain = self.eval(e.lhs, scope), self.eval_set(e.rhs, scope)
            return TRUE if element in domain else FALSE
        return BinaryOp(k, self.eval_formula(e.lhs, scope), self.eval_formula(e.rhs, scope))

    def _arith(self, k, a, b, span):
        if k is BinaryKind.ADD:
            return a + b
        if k is BinaryKind.SUB:
            if b > a:
                raise ElaborationError(f"{a} - {b} is negative", span)
            return a - b
        if k is BinaryKind.MUL:
            return a * b
        if k in (BinaryKind.DIV, BinaryKind.MOD):
            if b == 0:
                raise ElaborationError("division by zero", span)
            return a // b if k is BinaryKind.DIV else a % b
        result = {
            BinaryKind.LT: a < b,
            BinaryKind.LE: a <= b,
            BinaryKind.GT: a > b,
            BinaryKind.GE: a >= b,
        }[k]
        return TRUE if result else FALSE

    def _equality(self, equal, lhs, rhs, span):
        if isinstance(lhs, EnumValue) and isinstance(rhs, BusValue):
            lhs, rhs = rhs, lhs
        if isinstance(lhs, BusValue) and isinstance(rhs, EnumValue):
            return expand_enum_compare(equal, lhs, self.enum_idents[rhs.name], rhs.name)
        kinds = (kind_of(lhs), kind_of(rhs))
        if kinds[0] != kinds[1] or kinds[0] not in ("number", "set", "enum"):
            raise ElaborationError(
                f"cannot compare a {kinds[0]} with a {kinds[1]} using =="
                if kinds[0] != kinds[1] else f"== is not defined on {kinds[0]} values",
                span,
            )
        return TRUE if (lhs == rhs) == equal else FALSE

    def _eval_EnumCompare(self, e, scope):
        bus = self.lookup(e.bus, scope, e.span)
        if not isinstance(bus, BusValue):
            raise ElaborationError(f"{e.bus} is not a bus", e.span)
        decl = self.enum_idents.get(e.ident)
        if decl is None:
            raise ElaborationError(f"unknown enum identifier {e.ident}", e.span)
        try:
            return expand_enum_compare(e.equal, bus, decl, e.ident)
        except ElaborationError as err:
            raise ElaborationError(err.message, e.span) from None

    def _eval_SugarTemporal(self, e, scope):
        lower = self.eval_number(e.lower, scope)
        upper = None if e.upper is None else self.eval_number(e.upper, scope)
        if e.strong and not self.finite:
            raise ElaborationError("strong sugar uses X[!], only allowed under Finite semantics", e.span)
        body = self.eval_formula(e.body, scope)
        try:
            return sugar_shape(e.kind, lower, upper, e.strong, body)
        except ElaborationError as err:
            raise ElaborationError(err.message, e.span) from None

    def _eval_BigOp(self, e, scope):
        return self.expand_big(e.kind, e.binders, e.body, scope, e.span)

    def _eval_Guarded(self, e, scope):
        raise ElaborationError("guarded cases are only allowed as function bodies", e.span)

    # -- big operators --

    def binder_domain(self, binder, scope):
        if isinstance(binder, RangeBinder):
            lo = self.eval_number(binder.low, scope) + (1 if binder.low_strict else 0)
            hi = self.eval_number(binder.high, scope)
            if binder.high_strict:
                if hi == 0:
                    return []
                hi -= 1
            return list(range(lo, hi + 1))
        return sorted_values(self.eval_set(binder.domain, scope))

    def expand_big(self, kind, binders, body, scope, span=None):
        results = []

        def loop(i, current):
            if i == len(binders):
                results.append(self.eval(body, current))
                return
            binder = binders[i]
            for value in self.binder_domain(binder, current):
                loop(i + 1, current.child({binder.name: value}))

        loop(0, scope)
        expected = {
            BigKind.SUM: "number", BigKind.PROD: "number",
            BigKind.CUP: "set", BigKind.CAP: "set",
            BigKind.AND: "formula", BigKind.OR: "formula",
        }[kind]
        for r in results:
            if kind_of(r) != expected:
                raise ElaborationError(f"body of {kind.value}[...] must be a {expected}, got a {kind_of(r)}", span)
        if not results:
            if kind is BigKind.CAP:
                raise ElaborationError("(*)[...] over an empty domain has no value", span)
            return {
                BigKind.SUM: 0, BigKind.PROD: 1, BigKind.CUP: frozenset(),
                BigKind.AND: TRUE, BigKind.OR: FALSE,
            }[kind]
        acc = results[0]
        for r in results[1:]:
            if kind is BigKind.SUM:
                acc = acc + r
            elif kind is BigKind.PROD:
                acc = acc * r
            elif kind is BigKind.CUP:
                acc = acc | r
            elif kind is BigKind.CAP:
                acc = acc & r
            elif kind is BigKind.AND:
                acc = BinaryOp(BinaryKind.AND, acc, r)
            else:
                acc = BinaryOp(BinaryKind.OR, acc, r)
        return acc

    # -- functions --

    def apply(self, decl: FunctionDecl, args, span=None):
        if len(args) != decl.arity:
            raise ElaborationError(
                f"{decl.name} expects {decl.arity} argument(s), got {len(args)}", span
            )
        key = (decl.name, args)
        cached = self.memo.get(key)
        if cached is _PENDING:
            raise ElaborationError(f"{decl.name} calls itself with the same arguments", span)
        if cached is not None:
            return cached
        self.applications += 1
        if self.applications > self.recursion_cap:
            raise ElaborationError(
                f"more than {self.recursion_cap} function applications (recursion cap)", span
            )
        self.memo[key] = _PENDING
        try:
            result = self._apply_cases(decl, args, span)
        except RecursionError:
            del self.memo[key]
            raise ElaborationError(f"recursion in {decl.name} is too deep", span) from None
        except BaseException:
            del self.memo[key]
            raise
        self.memo[key] = result
        return result

    def _apply_cases(self, decl, args, span):
        scope = Scope(dict(zip(decl.params, args)))
        fallback = None
        for case in decl.body.cases:
            guard = case.guard
            if isinstance(guard, Otherwise):
                fallback = case
                continue
            local = scope
            if guard is None:
                hit = True
            elif isinstance(guard, PatternMatch):
                subject = self.eval(guard.subject, scope)
                hit, bindings = pattern_match(subject, guard.pattern)
                local = scope.child(bindings)
            else:
                value = self.eval_formula(guard, scope)
                hit = truth(value, guard.span)
            if hit:
                return self.eval(case.body, local)
        if fallback is not None:
            return self.eval(fallback.body, scope)
        raise ElaborationError(f"no case of {decl.name} matches its arguments", span)


# -- public operations ------------------------------------------------------


def eval_numeric(e: Expr, env: Optional[Environment] = None) -> int:
    env = env or Environment()
    return env.eval_number(e, Scope())


def apply_function(decl: FunctionDecl, args, env: Optional[Environment] = None):
    env = env or Environment()
    if decl.name not in env.functions:
        env.install_definitions([decl])
    return env.apply(decl, tuple(args))


def expand_big_operator(kind: BigKind, binders, body: Expr, env: Optional[Environment] = None):
    env = env or Environment()
    return env.expand_big(kind, tuple(binders), body, Scope())


def desugar_temporal(sugar: SugarTemporal, env: Optional[Environment] = None) -> Expr:
    """Expand ``X[n]``, ``F[n:m]`` and ``G[n:m]`` into nested next operators.

    Without an environment the bounds must be literals and the body is kept as is.
    """
    if env is None:
        bounds = []
        for b in (sugar.lower, sugar.upper):
            if b is None:
                bounds.append(None)
            elif isinstance(b, NumLiteral):
                bounds.append(b.value)
            else:
                raise ElaborationError("sugar bounds must be numerals without an environment", sugar.span)
        return sugar_shape(sugar.kind, bounds[0], bounds[1], sugar.strong, sugar.body)
    return env.eval(sugar, Scope())


def desugar_enum_compare(equal: bool, bus: str, ident: str, enums, width: Optional[int] = None) -> Expr:
    """``enums`` is an iterable of enum declarations or a mapping name -> declaration."""
    decls = enums.values() if isinstance(enums, Mapping) else enums
    for decl in decls:
        if any(name == ident for name, _ in decl.valuations):
            return expand_enum_compare(equal, BusValue(bus, decl.width if width is None else width), decl, ident)
    raise ElaborationError(f"unknown enum identifier {ident}")


def enum_implicit_constraints(decl: SignalDecl, enums):
    """Constraint excluding unnamed valuations of an enum-typed bus.

    Returns ``(formula, bucket)`` with bucket ``"require"`` for inputs and
    ``"assert_"`` for outputs, or ``None`` when every valuation is named.
    """
    if decl.enum_type is None:
        return None
    table = enums if isinstance(enums, Mapping) else {e.name: e for e in enums}
    enum = table.get(decl.enum_type)
    if enum is None:
        raise ElaborationError(f"unknown enum type {decl.enum_type}", decl.span)
    if len(enum_coverage(enum)) == 2 ** enum.width:
        return None
    bus = BusValue(decl.name, enum.width)
    formula = disjoin(expand_enum_compare(True, bus, enum, ident) for ident, _ in enum.valuations)
    return formula, ("require" if decl.polarity is Polarity.INPUT else "assert_")


def elaborate(
    spec: Specification,
    overrides: Optional[Mapping[str, int]] = None,
    recursion_cap: int = DEFAULT_RECURSION_CAP,
) -> ElaboratedSpec:
    finite = spec.info.semantics.variant is Variant.FINITE
    env = Environment(finite=finite, recursion_cap=recursion_cap)
    env.bind_parameters(spec.parameters, overrides)
    env.install_definitions(spec.definitions)
    names = {}
    for key in ("inputs", "outputs"):
        names[key] = []
        for decl in getattr(spec, key):
            names[key].extend(env.declare_signal(decl))
    env.check_shadowing()
    buckets = {}
    for bucket in BUCKETS:
        out = []
        for e in spec.bucket(bucket):
            value = env.eval_formula(e, Scope())
            _check_closed(value, env, e)
            out.append(value)
        buckets[bucket] = out
    for decl in spec.inputs + spec.outputs:
        extra = enum_implicit_constraints(decl, env.enums)
        if extra is not None:
            formula, bucket = extra
            buckets[bucket].append(formula)
    return ElaboratedSpec(
        spec.info,
        tuple(names["inputs"]),
        tuple(names["outputs"]),
        **{b: tuple(v) for b, v in buckets.items()},
    )


def _check_closed(value, env, source):
    if not is_formula(value):
        raise ElaborationError("expression does not elaborate to a formula", source.span)
    declared = set(env.atomic)
    for node in walk(value):
        if isinstance(node, SignalRef) and node.name not in declared:
            raise ElaborationError(f"undeclared signal {node.name}", source.span)
