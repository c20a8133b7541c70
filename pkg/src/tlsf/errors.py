from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import Span


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: Optional[Span] = None
    expected: Optional[str] = None

    def render(self, filename="<input>"):
        where = f"{filename}:{self.span.line}:{self.span.column}" if self.span else filename
        text = f"{where}: {self.severity}: {self.message}"
        if self.expected:
            text += f" (expected {self.expected})"
        return text


class TLSFError(Exception):
    """Base class; carries an optional source span."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.message = message
        self.span = span

    @property
    def diagnostics(self):
        return [Diagnostic("error", self.message, self.span)]

    def render(self, filename="<input>"):
        return "\n".join(d.render(filename) for d in self.diagnostics)


class ParseError(TLSFError):
    def __init__(self, message, span=None, expected=None):
        super().__init__(message, span)
        self.expected = expected

    @property
    def diagnostics(self):
        return [Diagnostic("error", self.message, self.span, self.expected)]


class ElaborationError(TLSFError):
    pass


class CompositionError(TLSFError):
    pass


class EvaluationError(TLSFError):
    pass
