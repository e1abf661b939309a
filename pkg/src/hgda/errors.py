"""Exception types shared across the package."""

from __future__ import annotations


class GraphInputError(ValueError):
    """Malformed or out-of-contract input (bad ids, weights, file rows)."""


class EdgeListParseError(GraphInputError):
    """Unparseable edge-list row; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DisconnectedGraphError(GraphInputError):
    """Operation requires a connected graph; carries the component split."""

    def __init__(self, components):
        sizes = [len(c) for c in components]
        super().__init__(f"graph is disconnected ({len(components)} components, sizes {sizes})")
        self.components = components
