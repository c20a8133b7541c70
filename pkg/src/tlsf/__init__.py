"""Parsing, elaboration and analysis of TLSF specifications with LTLf support."""

from .ast import Specification
from .errors import TLSFError
from .parser import parse_expression, parse_formula, parse_spec

__all__ = ["Specification", "TLSFError", "parse_expression", "parse_formula", "parse_spec"]
