"""Plain-text arc-list documents for digraphs.

Grammar, line by line: ``# comment``, blank, ``v <label>`` for an isolated
vertex, or ``<tail> <head>`` for an arc.  Labels are whitespace-free tokens;
the token ``v`` itself is reserved for vertex declarations and rejected as a
label, which keeps the grammar unambiguous and the round trip exact.
"""

from __future__ import annotations

from .digraph import Digraph

_RESERVED = "v"


class DigraphParseError(ValueError):
    """A malformed digraph document, with the offending line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def parse_digraph(text: str) -> Digraph:
    vertices: set[str] = set()
    arcs: set[tuple[str, str]] = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) == 1:
            raise DigraphParseError(
                "lone token; isolated vertices are declared as 'v <label>'", number
            )
        if len(tokens) > 2:
            raise DigraphParseError(f"expected 2 tokens, got {len(tokens)}", number)
        first, second = tokens
        if first == _RESERVED:
            _check_label(second, number)
            vertices.add(second)
        else:
            _check_label(first, number)
            _check_label(second, number)
            arcs.add((first, second))
    return Digraph(vertices, arcs)


def _check_label(label: str, line_number: int) -> None:
    if label == _RESERVED:
        raise DigraphParseError(
            "the token 'v' is reserved and cannot be used as a label", line_number
        )


def emit_digraph(graph: Digraph) -> str:
    """Canonical document: isolated vertices first, then arcs, both sorted."""
    for label in graph.vertices:
        if label == _RESERVED:
            raise ValueError("the label 'v' cannot be written to the file format")
        if not label or any(ch.isspace() for ch in label):
            raise ValueError(f"label {label!r} cannot be written to the file format")
    isolated = sorted(u for u in graph.vertices if graph.is_isolated(u))
    lines = [f"v {u}" for u in isolated]
    lines.extend(f"{t} {h}" for t, h in sorted(graph.arcs))
    return "".join(line + "\n" for line in lines)
