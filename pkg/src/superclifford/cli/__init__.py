"""Command-line harness: expression parser, verification suites, reports."""

from .parser import ParseError, parse, parse_ast

__all__ = ["ParseError", "parse", "parse_ast"]
