"""Desk-scale LTLf realizability by progression and a reachability game.

States of the arena are canonicalized residual formulas.  A move
``(state, input, output)`` wins immediately when the one-letter word
``input | output`` satisfies the state formula; otherwise it leads to the
progressed residual.  The system wins from the attractor of winning moves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import Optional

from .ast import (
    FALSE,
    TRUE,
    BinaryKind,
    BinaryOp,
    BoolLiteral,
    Model,
    SignalRef,
    UnaryKind,
    UnaryOp,
    Variant,
)
from .errors import CompositionError, EvaluationError
from .exporters import format_flat
from .ltlf import evaluate
from .semantics import compose

DEFAULT_STATE_CAP = 20_000


# -- progression ------------------------------------------------------------


def progress(formula, letter):
    """Residual obligation after reading ``letter``, for a nonempty remainder."""
    f = formula
    if isinstance(f, BoolLiteral):
        return f
    if isinstance(f, SignalRef):
        return TRUE if f.name in letter else FALSE
    if isinstance(f, UnaryOp):
        k = f.kind
        if k is UnaryKind.NOT:
            return UnaryOp(k, progress(f.operand, letter))
        if k in (UnaryKind.NEXT, UnaryKind.STRONG_NEXT):
            return f.operand
        if k is UnaryKind.FINALLY:
            return BinaryOp(BinaryKind.OR, progress(f.operand, letter), f)
        if k is UnaryKind.GLOBALLY:
            return BinaryOp(BinaryKind.AND, progress(f.operand, letter), f)
    if isinstance(f, BinaryOp):
        k = f.kind
        if k in (BinaryKind.AND, BinaryKind.OR, BinaryKind.IMPLIES, BinaryKind.EQUIV):
            return BinaryOp(k, progress(f.lhs, letter), progress(f.rhs, letter))
        if k in (BinaryKind.UNTIL, BinaryKind.WEAK_UNTIL):
            stay = BinaryOp(BinaryKind.AND, progress(f.lhs, letter), f)
            return BinaryOp(BinaryKind.OR, progress(f.rhs, letter), stay)
        if k is BinaryKind.RELEASE:
            stay = BinaryOp(BinaryKind.OR, progress(f.lhs, letter), f)
            return BinaryOp(BinaryKind.AND, progress(f.rhs, letter), stay)
    raise EvaluationError(f"cannot progress {type(f).__name__}; the formula must be elaborated")


def accepts_one_letter(formula, letter) -> bool:
    return evaluate(formula, [frozenset(letter)])


# -- canonical form ---------------------------------------------------------


def _key(f):
    return format_flat(f)


def _not(a):
    if isinstance(a, BoolLiteral):
        return FALSE if a.value else TRUE
    if isinstance(a, UnaryOp) and a.kind is UnaryKind.NOT:
        return a.operand
    return UnaryOp(UnaryKind.NOT, a)


def _junction(kind, items):
    unit, zero = (TRUE, FALSE) if kind is BinaryKind.AND else (FALSE, TRUE)
    flat = []
    stack = list(reversed(items))
    while stack:
        x = stack.pop()
        if isinstance(x, BinaryOp) and x.kind is kind:
            stack.append(x.rhs)
            stack.append(x.lhs)
        else:
            flat.append(x)
    keyed = {}
    for x in flat:
        if x == zero:
            return zero
        if x == unit:
            continue
        keyed.setdefault(_key(x), x)
    present = set(keyed.values())
    for x in present:
        if isinstance(x, UnaryOp) and x.kind is UnaryKind.NOT and x.operand in present:
            return zero
    ordered = [keyed[k] for k in sorted(keyed)]
    if not ordered:
        return unit
    out = ordered[0]
    for x in ordered[1:]:
        out = BinaryOp(kind, out, x)
    return out


def _simp(f):
    """Local rewrite assuming the children of ``f`` are already canonical."""
    if isinstance(f, UnaryOp):
        k, a = f.kind, f.operand
        if k is UnaryKind.NOT:
            return _not(a)
        if isinstance(a, BoolLiteral):
            if k in (UnaryKind.FINALLY, UnaryKind.GLOBALLY):
                return a
            if k is UnaryKind.NEXT and a.value:
                return TRUE
            if k is UnaryKind.STRONG_NEXT and not a.value:
                return FALSE
        if k in (UnaryKind.FINALLY, UnaryKind.GLOBALLY) and isinstance(a, UnaryOp) and a.kind is k:
            return a
        return f
    if isinstance(f, BinaryOp):
        k, a, b = f.kind, f.lhs, f.rhs
        ca = a.value if isinstance(a, BoolLiteral) else None
        cb = b.value if isinstance(b, BoolLiteral) else None
        if k in (BinaryKind.AND, BinaryKind.OR):
            return _junction(k, [a, b])
        if k is BinaryKind.IMPLIES:
            return _junction(BinaryKind.OR, [_not(a), b])
        if k is BinaryKind.EQUIV:
            if ca is not None:
                return b if ca else _not(b)
            if cb is not None:
                return a if cb else _not(a)
            if a == b:
                return TRUE
            if _not(a) == b:
                return FALSE
            if _key(b) < _key(a):
                return BinaryOp(k, b, a)
            return f
        if k is BinaryKind.UNTIL:
            if cb is not None or ca is False:
                return b
            if ca is True:
                return _simp(UnaryOp(UnaryKind.FINALLY, b))
            return f
        if k is BinaryKind.WEAK_UNTIL:
            if cb is True or ca is True:
                return TRUE
            if ca is False:
                return b
            if cb is False:
                return _simp(UnaryOp(UnaryKind.GLOBALLY, a))
            return f
        if k is BinaryKind.RELEASE:
            if cb is not None or ca is True:
                return b
            if ca is False:
                return _simp(UnaryOp(UnaryKind.GLOBALLY, b))
            return f
    return f


def canonicalize(formula):
    """Constant absorption, double negation, sorted flattening of && and ||."""
    memo = {}

    def go(f):
        hit = memo.get(id(f))
        if hit is not None:
            return hit[1]
        if isinstance(f, UnaryOp):
            a = go(f.operand)
            node = f if a is f.operand else UnaryOp(f.kind, a)
        elif isinstance(f, BinaryOp):
            a, b = go(f.lhs), go(f.rhs)
            node = f if (a is f.lhs and b is f.rhs) else BinaryOp(f.kind, a, b)
        else:
            node = f
        out = _simp(node)
        memo[id(f)] = (f, out)
        return out

    return go(formula)


# -- game ---------------------------------------------------------------------


def letters(names):
    names = list(names)
    subsets = chain.from_iterable(combinations(names, r) for r in range(len(names) + 1))
    return [frozenset(s) for s in subsets]


WIN = -1


@dataclass
class Arena:
    states: list
    inputs: list
    outputs: list
    moves: dict  # (state, input index, output index) -> successor index or WIN
    complete: bool = True


def build_arena(formula, inputs, outputs, state_cap=DEFAULT_STATE_CAP) -> Arena:
    ins, outs = letters(inputs), letters(outputs)
    init = canonicalize(formula)
    states = [init]
    index = {init: 0}
    moves = {}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        f = states[s]
        for i, a in enumerate(ins):
            for o, b in enumerate(outs):
                letter = a | b
                if accepts_one_letter(f, letter):
                    moves[s, i, o] = WIN
                    continue
                nxt = canonicalize(progress(f, letter))
                t = index.get(nxt)
                if t is None:
                    if len(states) >= state_cap:
                        return Arena(states, ins, outs, moves, complete=False)
                    t = index[nxt] = len(states)
                    states.append(nxt)
                    queue.append(t)
                moves[s, i, o] = t
    return Arena(states, ins, outs, moves)


@dataclass
class Verdict:
    status: str  # realizable | unrealizable | unknown
    model: Model
    arena: Optional[Arena] = None
    strategy: dict = field(default_factory=dict)
    winning: frozenset = frozenset()

    @property
    def realizable(self):
        return {"realizable": True, "unrealizable": False}.get(self.status)

    def dump(self) -> str:
        """Controller table: one block per reachable winning state."""
        lines = [f"verdict: {self.status}", f"model: {self.model.value}"]
        if self.arena is None or self.status != "realizable":
            return "\n".join(lines) + "\n"
        arena = self.arena
        lines.append(f"states: {len(arena.states)}")
        for s in sorted(self._reachable()):
            lines.append(f"state {s}: {format_flat(arena.states[s])}")
            for i, a in enumerate(arena.inputs):
                o = self.output(s, i)
                t = arena.moves[s, i, o]
                where = "accept" if t == WIN else f"state {t}"
                lines.append(f"  in {_fmt_letter(a)} out {_fmt_letter(arena.outputs[o])} -> {where}")
        return "\n".join(lines) + "\n"

    def output(self, state, input_index):
        if self.model is Model.MOORE:
            return self.strategy[state]
        return self.strategy[state, input_index]

    def _reachable(self):
        seen = {0}
        stack = [0]
        while stack:
            s = stack.pop()
            for i in range(len(self.arena.inputs)):
                t = self.arena.moves[s, i, self.output(s, i)]
                if t != WIN and t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen


def _fmt_letter(letter):
    return "{" + " ".join(sorted(letter)) + "}"


def attractor(arena: Arena, model: Model):
    """Winning states of the system and a positional strategy reaching WIN."""
    n_in, n_out = len(arena.inputs), len(arena.outputs)
    win = set()
    strategy = {}

    def good(s, i, o, region):
        t = arena.moves[s, i, o]
        return t == WIN or t in region

    changed = True
    while changed:
        changed = False
        region = frozenset(win)
        for s in range(len(arena.states)):
            if s in win:
                continue
            if model is Model.MEALY:
                choice = {}
                for i in range(n_in):
                    o = next((o for o in range(n_out) if good(s, i, o, region)), None)
                    if o is None:
                        break
                    choice[s, i] = o
                else:
                    win.add(s)
                    strategy.update(choice)
                    changed = True
            else:
                for o in range(n_out):
                    if all(good(s, i, o, region) for i in range(n_in)):
                        win.add(s)
                        strategy[s] = o
                        changed = True
                        break
    return frozenset(win), strategy


def solve_formula(formula, inputs, outputs, model: Model, state_cap=DEFAULT_STATE_CAP) -> Verdict:
    arena = build_arena(formula, inputs, outputs, state_cap)
    if not arena.complete:
        return Verdict("unknown", model, arena)
    win, strategy = attractor(arena, model)
    status = "realizable" if 0 in win else "unrealizable"
    return Verdict(status, model, arena, strategy, win)


def solve(spec, state_cap=DEFAULT_STATE_CAP) -> Verdict:
    """Realizability of an elaborated specification with Finite semantics."""
    if spec.info.semantics.variant is not Variant.FINITE:
        raise CompositionError(
            f"realizability is only decided for Finite semantics, got {spec.info.semantics}"
        )
    result = compose(spec)
    return solve_formula(result.formula, spec.inputs, spec.outputs, result.model, state_cap)
