"""Solver-backed generator of code-tracing exercise instances."""

__version__ = "0.1.0"
