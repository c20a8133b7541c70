"""LTL over finite, nonempty words.

Positions are 1-based.  The weak next ``X`` holds at the last position, the
strong next ``X[!]`` needs a successor.  The empty word satisfies nothing.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional, Sequence

from .ast import BinaryKind, BinaryOp, BoolLiteral, SignalRef, UnaryKind, UnaryOp
from .errors import EvaluationError

Letter = frozenset
Word = Sequence[frozenset]


class _Evaluator:
    def __init__(self, word):
        self.word = [frozenset(a) for a in word]
        self.n = len(self.word)
        self.memo = {}
        self.keep = []  # keeps nodes alive so id() keys stay unique

    def sat(self, f, i):
        key = (id(f), i)
        hit = self.memo.get(key)
        if hit is None:
            self.keep.append(f)
            hit = self.memo[key] = self._sat(f, i)
        return hit

    def _sat(self, f, i):
        n = self.n
        if isinstance(f, BoolLiteral):
            return f.value
        if isinstance(f, SignalRef):
            return f.name in self.word[i - 1]
        if isinstance(f, UnaryOp):
            k, a = f.kind, f.operand
            if k is UnaryKind.NOT:
                return not self.sat(a, i)
            if k is UnaryKind.NEXT:
                return i == n or self.sat(a, i + 1)
            if k is UnaryKind.STRONG_NEXT:
                return i < n and self.sat(a, i + 1)
            if k is UnaryKind.FINALLY:
                return any(self.sat(a, j) for j in range(i, n + 1))
            if k is UnaryKind.GLOBALLY:
                return all(self.sat(a, j) for j in range(i, n + 1))
        elif isinstance(f, BinaryOp):
            k, a, b = f.kind, f.lhs, f.rhs
            if k is BinaryKind.AND:
                return self.sat(a, i) and self.sat(b, i)
            if k is BinaryKind.OR:
                return self.sat(a, i) or self.sat(b, i)
            if k is BinaryKind.IMPLIES:
                return (not self.sat(a, i)) or self.sat(b, i)
            if k is BinaryKind.EQUIV:
                return self.sat(a, i) == self.sat(b, i)
            if k is BinaryKind.UNTIL:
                return self.until(a, b, i)
            if k is BinaryKind.WEAK_UNTIL:
                return self.until(a, b, i) or all(self.sat(a, j) for j in range(i, n + 1))
            if k is BinaryKind.RELEASE:
                # a R b  ==  !(!a U !b)
                for j in range(i, n + 1):
                    if not self.sat(b, j):
                        return False
                    if self.sat(a, j):
                        return True
                return True
        raise EvaluationError(f"cannot evaluate {type(f).__name__}; the formula must be elaborated",
                              getattr(f, "span", None))

    def until(self, a, b, i):
        for k in range(i, self.n + 1):
            if self.sat(b, k):
                return True
            if not self.sat(a, k):
                return False
        return False


def evaluate_at(formula, word: Word, i: int) -> bool:
    """Truth of ``formula`` at position ``i`` (1-based) of a nonempty word."""
    if not 1 <= i <= len(word):
        raise EvaluationError(f"position {i} outside 1..{len(word)}")
    return _Evaluator(word).sat(formula, i)


def evaluate(formula, word: Word) -> bool:
    if len(word) == 0:
        return False
    return _Evaluator(word).sat(formula, 1)


TRACE_TOKEN = re.compile(r"\s*(?:(\{)|(\})|([A-Za-z_@][A-Za-z0-9_'@]*(?:\[\d+\])?)|(\S))")


def parse_trace(text: str, universe: Optional[Iterable[str]] = None) -> list:
    """Read ``{a b} {} {b}`` into a list of letters; ``#`` starts a comment."""
    known = None if universe is None else set(universe)
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    word = []
    current = None
    pos = 0
    while pos < len(body):
        m = TRACE_TOKEN.match(body, pos)
        if m is None:  # only trailing whitespace left
            break
        pos = m.end()
        if m.group(1):
            if current is not None:
                raise EvaluationError("nested '{' in trace")
            current = set()
        elif m.group(2):
            if current is None:
                raise EvaluationError("'}' without matching '{' in trace")
            word.append(frozenset(current))
            current = None
        elif m.group(3):
            if current is None:
                raise EvaluationError(f"signal {m.group(3)} outside of a step")
            if known is not None and m.group(3) not in known:
                raise EvaluationError(f"unknown signal {m.group(3)} in trace")
            current.add(m.group(3))
        else:
            raise EvaluationError(f"unexpected {m.group(4)!r} in trace")
    if current is not None:
        raise EvaluationError("unterminated step in trace")
    return word
