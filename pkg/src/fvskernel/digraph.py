"""Immutable directed-graph values and the primitive queries the reduction rules need.

A :class:`Digraph` is a finite set of string-labeled vertices plus a set of
arcs (ordered pairs).  Loops ``(u, u)`` and isolated vertices are both
representable.  Every transformation returns a fresh value; graphs may be
hashed, compared and shared freely.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

Arc = tuple[str, str]


class UnknownVertexError(ValueError):
    """An operation targeted a vertex that is not in the graph."""


class UnknownArcError(ValueError):
    """An operation targeted an arc that is not in the graph."""


class LoopContractionError(ValueError):
    """Contraction was requested for a vertex carrying a loop."""


class Digraph:
    """Immutable digraph over string vertex labels.

    Arc endpoints are always added to the vertex set, so the value is
    well-formed by construction and never rejects input.
    """

    __slots__ = ("vertices", "arcs", "_succ", "_pred", "_canon")

    vertices: frozenset[str]
    arcs: frozenset[Arc]

    def __init__(self, vertices: Iterable[str] = (), arcs: Iterable[Arc] = ()):
        arc_set = frozenset((tail, head) for tail, head in arcs)
        verts = set(vertices)
        for tail, head in arc_set:
            verts.add(tail)
            verts.add(head)
        succ: dict[str, set[str]] = {u: set() for u in verts}
        pred: dict[str, set[str]] = {u: set() for u in verts}
        for tail, head in arc_set:
            succ[tail].add(head)
            pred[head].add(tail)
        self.vertices = frozenset(verts)
        self.arcs = arc_set
        self._succ = {u: frozenset(vs) for u, vs in succ.items()}
        self._pred = {u: frozenset(vs) for u, vs in pred.items()}
        self._canon: bytes | None = None

    # -- basic queries ----------------------------------------------------

    def successors(self, u: str) -> frozenset[str]:
        self._require_vertex(u)
        return self._succ[u]

    def predecessors(self, u: str) -> frozenset[str]:
        self._require_vertex(u)
        return self._pred[u]

    def is_isolated(self, u: str) -> bool:
        self._require_vertex(u)
        return not self._succ[u] and not self._pred[u]

    # -- primitive transformations ----------------------------------------

    def delete_vertex(self, u: str) -> Digraph:
        """The graph without ``u`` and without every arc incident to it."""
        self._require_vertex(u)
        return Digraph(
            (w for w in self.vertices if w != u),
            (a for a in self.arcs if u not in a),
        )

    def delete_vertices(self, us: Iterable[str]) -> Digraph:
        dead = set(us)
        for u in dead:
            self._require_vertex(u)
        return Digraph(
            (w for w in self.vertices if w not in dead),
            (a for a in self.arcs if a[0] not in dead and a[1] not in dead),
        )

    def delete_arc(self, arc: Arc) -> Digraph:
        """The graph with the same vertices and ``arc`` removed."""
        arc = (arc[0], arc[1])
        if arc not in self.arcs:
            raise UnknownArcError(f"arc {arc!r} is not in the graph")
        return Digraph(self.vertices, self.arcs - {arc})

    def contract(self, u: str) -> Digraph:
        """Remove ``u`` and connect each of its predecessors to each successor.

        The new arcs merge with existing ones by set semantics, and loops
        ``(p, p)`` appear whenever ``p`` is both a predecessor and a successor
        of ``u``.  A loop on ``u`` itself would re-introduce arcs incident to
        the removed vertex, so it is rejected.
        """
        self._require_vertex(u)
        if (u, u) in self.arcs:
            raise LoopContractionError(f"cannot contract {u!r}: it carries a loop")
        kept = {a for a in self.arcs if u not in a}
        created = {(p, s) for p in self._pred[u] for s in self._succ[u]}
        return Digraph((w for w in self.vertices if w != u), kept | created)

    # -- one-way / two-way structure ---------------------------------------

    def two_way_arcs(self) -> frozenset[Arc]:
        """Arcs whose reverse is also present; loops count as two-way."""
        return frozenset((t, h) for (t, h) in self.arcs if (h, t) in self.arcs)

    def one_way(self) -> Digraph:
        """The subgraph keeping the same vertices and only the one-way arcs."""
        return Digraph(
            self.vertices,
            ((t, h) for (t, h) in self.arcs if (h, t) not in self.arcs),
        )

    # -- circuits -----------------------------------------------------------

    def strongly_connected_components(self) -> list[frozenset[str]]:
        """Tarjan's algorithm, iterative; output sorted for determinism."""
        index: dict[str, int] = {}
        low: dict[str, int] = {}
        on_stack: set[str] = set()
        stack: list[str] = []
        components: list[frozenset[str]] = []
        counter = 0
        for root in sorted(self.vertices):
            if root in index:
                continue
            work: list[tuple[str, list[str], int]] = [(root, sorted(self._succ[root]), 0)]
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on_stack.add(root)
            while work:
                v, succs, i = work.pop()
                advanced = False
                while i < len(succs):
                    w = succs[i]
                    i += 1
                    if w not in index:
                        work.append((v, succs, i))
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack.add(w)
                        work.append((w, sorted(self._succ[w]), 0))
                        advanced = True
                        break
                    if w in on_stack:
                        low[v] = min(low[v], index[w])
                if advanced:
                    continue
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    components.append(frozenset(comp))
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
        components.sort(key=lambda c: min(c))
        return components

    def is_acyclic(self) -> bool:
        """True iff the graph has no circuit; a loop is a circuit."""
        if any(t == h for t, h in self.arcs):
            return False
        return all(len(c) == 1 for c in self.strongly_connected_components())

    def arc_on_circuit(self, arc: Arc) -> bool:
        """True iff some circuit traverses ``arc``.

        Equivalent to: the arc is a loop, or its head reaches its tail.
        """
        arc = (arc[0], arc[1])
        if arc not in self.arcs:
            raise UnknownArcError(f"arc {arc!r} is not in the graph")
        tail, head = arc
        if tail == head:
            return True
        seen = {head}
        frontier = deque([head])
        while frontier:
            w = frontier.popleft()
            for nxt in self._succ[w]:
                if nxt == tail:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return False

    def is_diclique(self, members: Iterable[str]) -> bool:
        """True iff the members are pairwise connected both ways and loop-free.

        The empty set is a diclique; loops disqualify every member, including
        singletons.
        """
        group = set(members)
        for u in group:
            self._require_vertex(u)
        for u in group:
            if (u, u) in self.arcs:
                return False
        for u in group:
            for w in group:
                if u != w and (u, w) not in self.arcs:
                    return False
        return True

    # -- identity -----------------------------------------------------------

    def canonical_bytes(self) -> bytes:
        """Canonical encoding: sorted length-prefixed labels, then sorted arcs."""
        if self._canon is None:
            self._canon = encode_graph(self.vertices, self.arcs)
        return self._canon

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.vertices == other.vertices and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.vertices, self.arcs))

    def __repr__(self) -> str:
        return f"Digraph(vertices={sorted(self.vertices)!r}, arcs={sorted(self.arcs)!r})"

    def _require_vertex(self, u: str) -> None:
        if u not in self.vertices:
            raise UnknownVertexError(f"vertex {u!r} is not in the graph")


def encode_graph(vertices: Iterable[str], arcs: Iterable[Arc]) -> bytes:
    """Canonical byte encoding of a vertex/arc set pair.

    Length-prefixing keeps labels containing separator characters from
    colliding.  ``Digraph.canonical_bytes`` uses this same encoding.
    """
    parts = [f"{len(u)}:{u}" for u in sorted(vertices)]
    parts.append("|")
    for t, h in sorted(arcs):
        parts.append(f"{len(t)}:{t}{len(h)}:{h}")
    return "".join(parts).encode()


def isomorphic(a: Digraph, b: Digraph) -> bool:
    """Exact digraph isomorphism test by signature-pruned backtracking.

    Intended for the small graphs this package compares (reduction kernels);
    no attempt is made to scale beyond a few dozen vertices.
    """
    if len(a.vertices) != len(b.vertices) or len(a.arcs) != len(b.arcs):
        return False

    def signature(g: Digraph, u: str) -> tuple[int, int, bool]:
        return (len(g._pred[u]), len(g._succ[u]), (u, u) in g.arcs)

    a_sig = {u: signature(a, u) for u in a.vertices}
    b_sig = {w: signature(b, w) for w in b.vertices}
    census: dict[tuple[int, int, bool], int] = {}
    for value in a_sig.values():
        census[value] = census.get(value, 0) + 1
    for value in b_sig.values():
        census[value] = census.get(value, 0) - 1
    if any(census.values()):
        return False

    rarity: dict[tuple[int, int, bool], int] = {}
    for value in a_sig.values():
        rarity[value] = rarity.get(value, 0) + 1
    order = sorted(a.vertices, key=lambda u: (rarity[a_sig[u]], a_sig[u], u))
    candidates = {
        u: [w for w in sorted(b.vertices) if b_sig[w] == a_sig[u]] for u in order
    }
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        u = order[i]
        for w in candidates[u]:
            if w in used:
                continue
            ok = True
            for mu, mw in mapping.items():
                if ((mu, u) in a.arcs) != ((mw, w) in b.arcs) or (
                    (u, mu) in a.arcs
                ) != ((w, mw) in b.arcs):
                    ok = False
                    break
            if ok:
                mapping[u] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[u]
                used.discard(w)
        return False

    return extend(0)
