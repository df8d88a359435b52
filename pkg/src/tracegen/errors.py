"""Diagnostic exceptions. All carry an optional source location."""

from __future__ import annotations

from .ast_nodes import Loc


class TracegenError(Exception):
    def __init__(self, message: str, loc: Loc | None = None):
        self.message = message
        self.loc = loc
        super().__init__(message)

    def render(self, filename: str = "<input>") -> str:
        if self.loc is not None:
            return f"{filename}:{self.loc.line}:{self.loc.col}: {self.message}"
        return f"{filename}: {self.message}"


class LexError(TracegenError):
    pass


class ParseError(TracegenError):
    pass


class UnsupportedConstructError(ParseError):
    pass


class MisplacedAnnotationError(ParseError):
    pass


class TypecheckError(TracegenError):
    pass


class NormalizeError(TracegenError):
    pass


class UnwindError(TracegenError):
    pass


class EmitError(TracegenError):
    """Unsupported operator for the configured solver capability set."""


class SolverError(TracegenError):
    """Process spawn failure or malformed solver output."""


class InterpError(TracegenError):
    """Runtime failure inside the reference interpreter.

    On generated instances this signals an encoder bug: the side-condition
    set is supposed to preclude division by zero and out-of-bounds accesses.
    """

    def __init__(self, message: str, loc: Loc | None = None, kind: str = "runtime"):
        super().__init__(message, loc)
        self.kind = kind   # runtime | fuse | unsupported
