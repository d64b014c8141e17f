"""Shared strategies and independent oracles for the test suite.

The oracles here deliberately avoid the library's own graph algorithms: they
enumerate simple circuits by path search so they can cross-check SCC- and
reachability-based answers.
"""

from __future__ import annotations

from collections import defaultdict, deque

from hypothesis import strategies as st

from fvskernel import Digraph
from fvskernel.digraph import Arc

LABELS = "abcdefgh"


@st.composite
def digraphs(draw, max_vertices: int = 6, allow_loops: bool = True) -> Digraph:
    n = draw(st.integers(0, max_vertices))
    vertices = list(LABELS[:n])
    possible = [
        (t, h) for t in vertices for h in vertices if allow_loops or t != h
    ]
    if possible:
        arcs = draw(st.lists(st.sampled_from(possible), max_size=len(possible)))
    else:
        arcs = []
    return Digraph(vertices, arcs)


def naive_circuit_arcs(graph: Digraph) -> set[Arc]:
    """Arcs lying on some circuit, by exhaustive simple-path enumeration."""
    succ = defaultdict(list)
    for t, h in graph.arcs:
        succ[t].append(h)
    on_circuit: set[Arc] = set()
    for t, h in graph.arcs:
        if t == h:
            on_circuit.add((t, h))
    for start in sorted(graph.vertices):
        # every simple path from start; closing back to start marks a circuit
        stack = [(start, [start])]
        while stack:
            node, path = stack.pop()
            for nxt in succ[node]:
                if nxt == start and len(path) > 1:
                    for i in range(len(path) - 1):
                        on_circuit.add((path[i], path[i + 1]))
                    on_circuit.add((node, start))
                elif nxt not in path:
                    stack.append((nxt, path + [nxt]))
    return on_circuit


def naive_has_circuit(graph: Digraph) -> bool:
    if any(t == h for t, h in graph.arcs):
        return True
    # repeated DFS with color marking
    succ = defaultdict(list)
    for t, h in graph.arcs:
        succ[t].append(h)
    white, gray, black = 0, 1, 2
    color = {u: white for u in graph.vertices}

    def visit(u: str) -> bool:
        color[u] = gray
        for w in succ[u]:
            if color[w] == gray:
                return True
            if color[w] == white and visit(w):
                return True
        color[u] = black
        return False

    return any(color[u] == white and visit(u) for u in list(graph.vertices))


def naive_is_fvs(graph: Digraph, cover: set[str]) -> bool:
    """FVS per definition: every circuit meets the cover."""
    kept_arcs = [
        a for a in graph.arcs if a[0] not in cover and a[1] not in cover
    ]
    sub = Digraph((u for u in graph.vertices if u not in cover), kept_arcs)
    return not naive_has_circuit(sub)


def naive_normal_forms(graph: Digraph, kinds) -> dict[bytes, Digraph]:
    """Unmemoized depth-first enumeration of reachable normal forms.

    Exponential in the number of interleavings; callers keep inputs tiny.
    """
    from fvskernel import one_step_reducts

    out: dict[bytes, Digraph] = {}
    stack = deque([graph])
    while stack:
        g = stack.pop()
        reducts = one_step_reducts(g, kinds)
        if not reducts:
            out.setdefault(g.canonical_bytes(), g)
        else:
            stack.extend(r for _, r in reducts)
    return out
