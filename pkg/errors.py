"""
Exception types shared by the graph, chain and information modules.

All of them derive from ValueError so callers (and the CLI) can treat any
bad-input condition uniformly.
"""

from typing import Optional


class GraphError(ValueError):
    """Graph violates the simple-graph invariants or an orientation rule."""


class GraphParseError(GraphError):
    """Edge-list text could not be parsed."""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ValidationError(ValueError):
    """Matrix or probability vector fails its invariants."""


class ReducibleChainError(ValueError):
    """Chain has more than one closed class, so no unique equilibrium exists."""


class PreconditionError(ValueError):
    """Operation requires a structural property the input lacks."""
