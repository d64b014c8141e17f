"""The ten digraph reductions as checked rewriting steps.

Vertex-targeted kinds remove or contract a vertex; arc-targeted kinds (PIE,
DOME) delete an arc.  ``LOOP`` and ``CORE`` commit vertices to the feedback
vertex set under construction; all other kinds force nothing.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Union

from .digraph import Arc, Digraph, UnknownArcError, UnknownVertexError


class PreconditionError(ValueError):
    """A redex was applied whose precondition does not hold."""


class ReductionKind(enum.Enum):
    # Declaration order is the canonical priority used by find_redexes.
    LOOP = "LOOP"
    IN0 = "IN0"
    OUT0 = "OUT0"
    CORE = "CORE"
    INDICLIQUE = "INDICLIQUE"
    OUTDICLIQUE = "OUTDICLIQUE"
    IN1 = "IN1"
    OUT1 = "OUT1"
    PIE = "PIE"
    DOME = "DOME"

    @property
    def targets_arcs(self) -> bool:
        return self in (ReductionKind.PIE, ReductionKind.DOME)


ALL_RULES: frozenset[ReductionKind] = frozenset(ReductionKind)
CONFLUENT_RULES: frozenset[ReductionKind] = frozenset(
    {
        ReductionKind.LOOP,
        ReductionKind.INDICLIQUE,
        ReductionKind.OUTDICLIQUE,
        ReductionKind.PIE,
    }
)

Target = Union[str, Arc]


@dataclass(frozen=True)
class Redex:
    """One applicable-rule instance: a kind plus its vertex or arc target."""

    kind: ReductionKind
    target: Target

    def __str__(self) -> str:
        if self.kind.targets_arcs:
            tail, head = self.target
            return f"{self.kind.value}({tail},{head})"
        return f"{self.kind.value}({self.target})"


_REDEX_RE = re.compile(r"^([A-Z0-9]+)\(([^()\s]+)\)$")


def parse_redex(text: str) -> Redex:
    """Parse the ``KIND(v)`` / ``KIND(u,v)`` syntax used in traces."""
    match = _REDEX_RE.match(text)
    if not match:
        raise ValueError(f"malformed redex {text!r}")
    name, inner = match.groups()
    try:
        kind = ReductionKind[name]
    except KeyError:
        raise ValueError(f"unknown reduction kind {name!r}") from None
    parts = inner.split(",")
    if kind.targets_arcs:
        if len(parts) != 2:
            raise ValueError(f"{name} targets an arc, got {text!r}")
        return Redex(kind, (parts[0], parts[1]))
    if len(parts) != 1:
        raise ValueError(f"{name} targets a vertex, got {text!r}")
    return Redex(kind, parts[0])


@dataclass(frozen=True)
class ApplyResult:
    """Reduced graph plus the vertices this step committed to the MFVS."""

    reduced: Digraph
    forced: frozenset[str]


def _one_way_predecessors(graph: Digraph, u: str) -> set[str]:
    return {p for p in graph.predecessors(u) if (u, p) not in graph.arcs}


def _one_way_successors(graph: Digraph, u: str) -> set[str]:
    return {s for s in graph.successors(u) if (s, u) not in graph.arcs}


def check_precondition(graph: Digraph, redex: Redex) -> bool:
    """Decide whether ``redex`` is applicable in ``graph``.

    Raises an unknown-target error when the target vertex or arc does not
    exist; a missing target is a hard error, not merely "not applicable".
    """
    kind = redex.kind
    if kind.targets_arcs:
        tail, head = redex.target
        if (tail, head) not in graph.arcs:
            raise UnknownArcError(f"arc {redex.target!r} is not in the graph")
        if (head, tail) in graph.arcs:
            # Two-way arcs are excluded: deleting one direction of a 2-circuit
            # would lower the minimum FVS size.
            return False
        if kind is ReductionKind.PIE:
            return not graph.one_way().arc_on_circuit((tail, head))
        first = _one_way_predecessors(graph, tail) <= graph.predecessors(head)
        second = _one_way_successors(graph, head) <= graph.successors(tail)
        return first or second

    u = redex.target
    if u not in graph.vertices:
        raise UnknownVertexError(f"vertex {u!r} is not in the graph")
    if kind is ReductionKind.LOOP:
        return (u, u) in graph.arcs
    if kind is ReductionKind.IN0:
        return not graph.predecessors(u)
    if kind is ReductionKind.OUT0:
        return not graph.successors(u)
    if kind is ReductionKind.IN1:
        return (u, u) not in graph.arcs and len(graph.predecessors(u)) == 1
    if kind is ReductionKind.OUT1:
        return (u, u) not in graph.arcs and len(graph.successors(u)) == 1
    if kind is ReductionKind.INDICLIQUE:
        return (u, u) not in graph.arcs and graph.is_diclique(graph.predecessors(u))
    if kind is ReductionKind.OUTDICLIQUE:
        return (u, u) not in graph.arcs and graph.is_diclique(graph.successors(u))
    # CORE: an isolated vertex would make the step a no-op, breaking the
    # strict (|V|, |E|) decrease every reduction must provide.
    neighbors = graph.predecessors(u) | graph.successors(u)
    return bool(neighbors) and graph.is_diclique(neighbors | {u})


def reduct_sets(graph: Digraph, redex: Redex) -> tuple[set[str], set[Arc], frozenset[str]]:
    """Vertex set, arc set and forced set of the reduct, as plain set algebra.

    Performs no precondition check and builds no graph value; callers that
    enumerate large reduct spaces key on these sets before materializing a
    :class:`Digraph`.
    """
    kind = redex.kind
    if kind.targets_arcs:
        return set(graph.vertices), set(graph.arcs) - {redex.target}, frozenset()
    u = redex.target
    if kind in (ReductionKind.LOOP, ReductionKind.IN0, ReductionKind.OUT0):
        forced = frozenset({u}) if kind is ReductionKind.LOOP else frozenset()
        return (
            set(graph.vertices) - {u},
            {a for a in graph.arcs if u not in a},
            forced,
        )
    if kind is ReductionKind.CORE:
        dead = graph.predecessors(u) | graph.successors(u)
        return (
            set(graph.vertices) - dead,
            {a for a in graph.arcs if a[0] not in dead and a[1] not in dead},
            frozenset(dead),
        )
    # Contraction kinds: bypass u with every predecessor-to-successor arc.
    kept = {a for a in graph.arcs if u not in a}
    kept.update((p, s) for p in graph.predecessors(u) for s in graph.successors(u))
    return set(graph.vertices) - {u}, kept, frozenset()


def apply_redex(graph: Digraph, redex: Redex) -> ApplyResult:
    """Apply one reduction step; never a silent no-op."""
    if not check_precondition(graph, redex):
        raise PreconditionError(f"{redex} is not applicable")
    vertices, arcs, forced = reduct_sets(graph, redex)
    return ApplyResult(Digraph(vertices, arcs), forced)


def find_redexes(
    graph: Digraph, kinds: Iterable[ReductionKind] = ALL_RULES
) -> list[Redex]:
    """All applicable redexes of the selected kinds, in canonical order.

    Kinds come out in priority order (the enum declaration order), targets in
    lexicographic order, so the result is deterministic for a given graph.
    """
    wanted = set(kinds)
    found: list[Redex] = []
    for kind in ReductionKind:
        if kind not in wanted:
            continue
        if kind is ReductionKind.PIE:
            found.extend(_pie_redexes(graph))
        elif kind.targets_arcs:
            for arc in sorted(graph.arcs):
                redex = Redex(kind, arc)
                if check_precondition(graph, redex):
                    found.append(redex)
        else:
            for u in sorted(graph.vertices):
                redex = Redex(kind, u)
                if check_precondition(graph, redex):
                    found.append(redex)
    return found


def _pie_redexes(graph: Digraph) -> list[Redex]:
    # Bulk equivalent of the per-arc check: a one-way arc lies on a circuit of
    # the one-way subgraph iff both endpoints share a strongly connected
    # component there (loops are never one-way).
    one_way = graph.one_way()
    component: dict[str, int] = {}
    for i, comp in enumerate(one_way.strongly_connected_components()):
        for v in comp:
            component[v] = i
    return [
        Redex(ReductionKind.PIE, arc)
        for arc in sorted(one_way.arcs)
        if component[arc[0]] != component[arc[1]]
    ]
