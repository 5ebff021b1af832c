"""Text front-end: parser, canonical printer, command runner and JSON reports."""

from .lexer import Diagnostic, Token, tokenize
from .parser import ChartSpec, Command, CoverSpec, Model, parse_model
from .printer import print_derivation, print_element, print_model
from .report import QueryResult, emit_report, to_json_obj
from .runner import Outcome, run_command, run_model

__all__ = [
    "ChartSpec", "Command", "CoverSpec", "Diagnostic", "Model", "Outcome", "QueryResult",
    "Token", "emit_report", "parse_model", "print_derivation", "print_element", "print_model",
    "run_command", "run_model", "to_json_obj", "tokenize",
]
