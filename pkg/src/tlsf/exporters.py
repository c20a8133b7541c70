"""Writers for basic TLSF, full TLSF, the flat formula dialect and JSON dumps."""

from __future__ import annotations

import enum
import json
from dataclasses import fields, is_dataclass

from .ast import (
    BUCKETS,
    FALSE,
    SECTION_NAMES,
    TRUE,
    BigOp,
    Binder,
    BinaryKind,
    BinaryOp,
    BoolLiteral,
    BusAccess,
    EnumCompare,
    EnumDecl,
    FunctionApp,
    FunctionDecl,
    IdentRef,
    NumLiteral,
    Otherwise,
    PatternMatch,
    SetLiteral,
    SetRange,
    SignalRef,
    Specification,
    SugarKind,
    SugarTemporal,
    UnaryKind,
    UnaryOp,
)
from .errors import TLSFError
from .lexer import quote

INDENT = "  "

FLAT_BINARY = {
    BinaryKind.AND: "&",
    BinaryKind.OR: "|",
    BinaryKind.IMPLIES: "->",
    BinaryKind.EQUIV: "<->",
    BinaryKind.UNTIL: "U",
    BinaryKind.RELEASE: "R",
    BinaryKind.WEAK_UNTIL: "W",
}

FLAT_UNARY = {
    UnaryKind.NOT: "!",
    UnaryKind.NEXT: "X",
    UnaryKind.STRONG_NEXT: "X[!]",
    UnaryKind.FINALLY: "F",
    UnaryKind.GLOBALLY: "G",
}


class ExportError(TLSFError):
    pass


def _atom(e):
    if isinstance(e, BoolLiteral):
        return "true" if e.value else "false"
    if isinstance(e, SignalRef):
        return e.name
    return None


# -- flat formulas --------------------------------------------------------


def format_flat(e, finite=True) -> str:
    """``(l) op (r)`` for binary, ``op (s)`` for unary, atoms verbatim."""
    atom = _atom(e)
    if atom is not None:
        return atom
    if isinstance(e, UnaryOp) and e.kind in FLAT_UNARY:
        if e.kind is UnaryKind.STRONG_NEXT and not finite:
            raise ExportError("strong next X[!] cannot be written in the infinite dialect")
        return f"{FLAT_UNARY[e.kind]} ({format_flat(e.operand, finite)})"
    if isinstance(e, BinaryOp) and e.kind in FLAT_BINARY:
        return f"({format_flat(e.lhs, finite)}) {FLAT_BINARY[e.kind]} ({format_flat(e.rhs, finite)})"
    raise ExportError(f"{type(e).__name__} is not a plain formula node")


def write_flat_formula(result, dialect="finite") -> str:
    """Single-line formula; ``result`` is a CompositionResult or a formula."""
    if dialect not in ("finite", "infinite"):
        raise ValueError(f"unknown dialect {dialect!r}")
    formula = getattr(result, "formula", result)
    return format_flat(formula, dialect == "finite")


# -- basic TLSF -------------------------------------------------------------


def format_basic(e) -> str:
    atom = _atom(e)
    if atom is not None:
        return atom
    if isinstance(e, UnaryOp) and e.kind in FLAT_UNARY:
        return f"({e.kind.value} {_basic_operand(e.operand)})"
    if isinstance(e, BinaryOp) and e.kind in FLAT_BINARY:
        return f"({_basic_operand(e.lhs)} {e.kind.value} {_basic_operand(e.rhs)})"
    raise ExportError(f"{type(e).__name__} cannot appear in the basic format")


def _basic_operand(e):
    text = format_basic(e)
    return f"({text})" if _atom(e) is not None else text


def _info_lines(info):
    lines = [
        "INFO {",
        f"{INDENT}TITLE:       {quote(info.title)}",
        f"{INDENT}DESCRIPTION: {quote(info.description)}",
        f"{INDENT}SEMANTICS:   {info.semantics}",
        f"{INDENT}TARGET:      {info.target.value}",
    ]
    if info.tags:
        lines.append(f"{INDENT}TAGS:        " + ", ".join(quote(t) for t in info.tags))
    lines.append("}")
    return lines


def _section(name, items, depth=1):
    pad = INDENT * depth
    lines = [f"{pad}{name} {{"]
    lines.extend(f"{pad}{INDENT}{item};" for item in items)
    lines.append(f"{pad}}}")
    return lines


def write_basic_tlsf(spec) -> str:
    """Fully parenthesized basic-format text for an elaborated specification."""
    lines = _info_lines(spec.info)
    lines.append("MAIN {")
    lines += _section("INPUTS", spec.inputs)
    lines += _section("OUTPUTS", spec.outputs)
    for bucket in BUCKETS:
        items = spec.bucket(bucket)
        if items:
            lines += _section(SECTION_NAMES[bucket], [format_basic(e) for e in items])
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- full TLSF ----------------------------------------------------------------


def format_full(e) -> str:
    """Full-format text; every compound operand is parenthesized."""
    atom = _atom(e)
    if atom is not None:
        return atom
    if isinstance(e, NumLiteral):
        return str(e.value)
    if isinstance(e, IdentRef):
        return e.name
    if isinstance(e, BusAccess):
        return f"{e.bus}[{format_full(e.index)}]"
    if isinstance(e, FunctionApp):
        return f"{e.name}(" + ", ".join(format_full(a) for a in e.args) + ")"
    if isinstance(e, SetLiteral):
        return "{" + ", ".join(format_full(x) for x in e.elements) + "}"
    if isinstance(e, SetRange):
        return "{" + f"{format_full(e.start)}, {format_full(e.step)} .. {format_full(e.end)}" + "}"
    if isinstance(e, UnaryOp):
        return f"{e.kind.value} {_full_operand(e.operand)}"
    if isinstance(e, BinaryOp):
        return f"{_full_operand(e.lhs)} {e.kind.value} {_full_operand(e.rhs)}"
    if isinstance(e, BigOp):
        binders = ", ".join(_format_binder(b) for b in e.binders)
        return f"{e.kind.value}[{binders}] {_full_operand(e.body)}"
    if isinstance(e, EnumCompare):
        return f"{e.bus} {'==' if e.equal else '!='} {e.ident}"
    if isinstance(e, SugarTemporal):
        bounds = format_full(e.lower) if e.lower is not None else ""
        if e.kind is not SugarKind.NEXT:
            bounds += f":{_full_operand(e.upper)}"
        return f"{e.kind.value}[{'!' if e.strong else ''}{bounds}] {_full_operand(e.body)}"
    raise ExportError(f"cannot print {type(e).__name__}")


def _full_operand(e):
    text = format_full(e)
    simple = isinstance(e, (BoolLiteral, SignalRef, NumLiteral, IdentRef, BusAccess, FunctionApp,
                            SetLiteral, SetRange))
    return text if simple else f"({text})"


def _format_binder(b):
    if isinstance(b, Binder):
        return f"{b.name} IN {_full_operand(b.domain)}"
    lo = "<" if b.low_strict else "<="
    hi = "<" if b.high_strict else "<="
    return f"{_full_operand(b.low)} {lo} {b.name} {hi} {_full_operand(b.high)}"


def _format_case(case):
    body = f"({format_full(case.body)})"
    guard = case.guard
    if guard is None:
        return body
    if isinstance(guard, Otherwise):
        return f"otherwise : {body}"
    if isinstance(guard, PatternMatch):
        return f"({format_full(guard.subject)}) ~ ({format_full(guard.pattern)}) : {body}"
    return f"({format_full(guard)}) : {body}"


def _format_definition(d, pad):
    if isinstance(d, FunctionDecl):
        head = f"{pad}{d.name}({', '.join(d.params)}) ="
        return [head] + [f"{pad}{INDENT}{_format_case(c)}" for c in d.body.cases]
    if isinstance(d, EnumDecl):
        return [f"{pad}enum {d.name} ="] + [
            f"{pad}{INDENT}{ident}: {', '.join(pats)}" for ident, pats in d.valuations
        ]
    return [f"{pad}{d.name} = {format_full(d.value)}"]


def _format_signal(decl):
    if decl.enum_type is not None:
        return f"{decl.enum_type} {decl.name}"
    if decl.width is not None:
        return f"{decl.name}[{format_full(decl.width)}]"
    return decl.name


def write_full_tlsf(spec: Specification) -> str:
    """Print a parsed (unelaborated) specification in the full format."""
    lines = _info_lines(spec.info)
    if spec.parameters or spec.definitions:
        lines.append("GLOBAL {")
        if spec.parameters:
            lines += _section("PARAMETERS", [f"{p.name} = {format_full(p.value)}" for p in spec.parameters])
        if spec.definitions:
            lines.append(f"{INDENT}DEFINITIONS {{")
            for d in spec.definitions:
                chunk = _format_definition(d, INDENT * 2)
                chunk[-1] += ";"
                lines += chunk
            lines.append(f"{INDENT}}}")
        lines.append("}")
    lines.append("MAIN {")
    lines += _section("INPUTS", [_format_signal(d) for d in spec.inputs])
    lines += _section("OUTPUTS", [_format_signal(d) for d in spec.outputs])
    for bucket in BUCKETS:
        items = spec.bucket(bucket)
        if items:
            lines += _section(SECTION_NAMES[bucket], [format_full(e) for e in items])
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- JSON dump ----------------------------------------------------------------


def to_data(value):
    """Plain JSON-compatible data; spans are left out."""
    if is_dataclass(value) and not isinstance(value, type):
        out = {"node": type(value).__name__}
        for f in fields(value):
            if f.name == "span":
                continue
            out[f.name] = to_data(getattr(value, f.name))
        for name in ("theta_e", "theta_s", "psi_e", "psi_s", "phi_e", "phi_s"):
            if hasattr(type(value), name):
                out[name] = to_data(getattr(value, name))
        return out
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (tuple, list)):
        return [to_data(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted((to_data(v) for v in value), key=lambda v: json.dumps(v, sort_keys=True))
    return value


def write_ast_dump(spec) -> str:
    return json.dumps(to_data(spec), indent=2, sort_keys=True) + "\n"


# -- constant folding -------------------------------------------------------


def simplify(e):
    """Fold boolean constants; operand order and everything else is kept."""
    if isinstance(e, UnaryOp):
        a = simplify(e.operand)
        k = e.kind
        if isinstance(a, BoolLiteral):
            if k is UnaryKind.NOT:
                return FALSE if a.value else TRUE
            if k in (UnaryKind.FINALLY, UnaryKind.GLOBALLY):
                return a
            if k is UnaryKind.NEXT and a.value:
                return TRUE
            if k is UnaryKind.STRONG_NEXT and not a.value:
                return FALSE
        if k is UnaryKind.NOT and isinstance(a, UnaryOp) and a.kind is UnaryKind.NOT:
            return a.operand
        return e if a is e.operand else UnaryOp(k, a)
    if isinstance(e, BinaryOp):
        a, b = simplify(e.lhs), simplify(e.rhs)
        k = e.kind
        ca = a.value if isinstance(a, BoolLiteral) else None
        cb = b.value if isinstance(b, BoolLiteral) else None
        if k is BinaryKind.AND:
            if ca is False or cb is False:
                return FALSE
            if ca is True:
                return b
            if cb is True:
                return a
        elif k is BinaryKind.OR:
            if ca is True or cb is True:
                return TRUE
            if ca is False:
                return b
            if cb is False:
                return a
        elif k is BinaryKind.IMPLIES:
            if ca is False or cb is True:
                return TRUE
            if ca is True:
                return b
            if cb is False:
                return simplify(UnaryOp(UnaryKind.NOT, a))
        elif k is BinaryKind.EQUIV:
            if ca is not None and cb is not None:
                return TRUE if ca == cb else FALSE
            if ca is not None:
                return b if ca else simplify(UnaryOp(UnaryKind.NOT, b))
            if cb is not None:
                return a if cb else simplify(UnaryOp(UnaryKind.NOT, a))
        elif k is BinaryKind.UNTIL:
            if cb is not None:
                return b
            if ca is False:
                return b
            if ca is True:
                return UnaryOp(UnaryKind.FINALLY, b)
        elif k is BinaryKind.WEAK_UNTIL:
            if cb is True or ca is True:
                return TRUE
            if ca is False:
                return b
            if cb is False:
                return UnaryOp(UnaryKind.GLOBALLY, a)
        elif k is BinaryKind.RELEASE:
            if cb is not None:
                return b
            if ca is True:
                return b
            if ca is False:
                return UnaryOp(UnaryKind.GLOBALLY, b)
        if a is e.lhs and b is e.rhs:
            return e
        return BinaryOp(k, a, b)
    return e


def simplify_spec(spec):
    """Constant-fold every bucket entry of an elaborated specification."""
    from dataclasses import replace

    return replace(spec, **{b: tuple(simplify(x) for x in spec.bucket(b)) for b in BUCKETS})


__all__ = [
    "ExportError",
    "format_basic",
    "format_flat",
    "format_full",
    "simplify",
    "simplify_spec",
    "write_ast_dump",
    "write_basic_tlsf",
    "write_flat_formula",
    "write_full_tlsf",
]
