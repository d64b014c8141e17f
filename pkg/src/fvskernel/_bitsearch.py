"""Compact state-space core for the exhaustive reduct search.

States are (alive-mask, adjacency-matrix) integer pairs over the fixed label
universe of the searched graph; reductions never rename or add vertices, so
the packing is exact.  The redex enumeration here must mirror
``reductions.find_redexes`` bit for bit, including ordering; the test suite
cross-checks the two on random graphs.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator

from .digraph import Digraph
from .reductions import Redex, ReductionKind

State = tuple[int, int, int]  # alive mask, adjacency, transposed adjacency
Child = tuple[ReductionKind, "int | tuple[int, int]", int, int]  # kind, target, alive, adj

_VERTEX_KINDS = (
    ReductionKind.LOOP,
    ReductionKind.IN0,
    ReductionKind.OUT0,
    ReductionKind.CORE,
    ReductionKind.INDICLIQUE,
    ReductionKind.OUTDICLIQUE,
    ReductionKind.IN1,
    ReductionKind.OUT1,
)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class BitUniverse:
    """Fixed, sorted label universe for one search run."""

    __slots__ = ("labels", "index", "n", "row_mask", "wipe_masks")

    def __init__(self, labels: Iterable[str]):
        self.labels: list[str] = sorted(labels)
        self.index = {label: i for i, label in enumerate(self.labels)}
        n = self.n = len(self.labels)
        self.row_mask = (1 << n) - 1
        col = sum(1 << (i * n) for i in range(n))
        self.wipe_masks = [
            (self.row_mask << (i * n)) | (col << i) for i in range(n)
        ]

    def pack(self, graph: Digraph) -> State:
        n = self.n
        alive = 0
        for u in graph.vertices:
            alive |= 1 << self.index[u]
        adj = 0
        for t, h in graph.arcs:
            adj |= 1 << (self.index[t] * n + self.index[h])
        return alive, adj, self.transpose(adj)

    def transpose(self, adj: int) -> int:
        n = self.n
        out = 0
        while adj:
            low = adj & -adj
            pos = low.bit_length() - 1
            i, j = divmod(pos, n)
            out |= 1 << (j * n + i)
            adj ^= low
        return out

    def unpack(self, alive: int, adj: int) -> Digraph:
        n = self.n
        labels = self.labels
        vertices = [labels[i] for i in _bits(alive)]
        arcs = []
        for i in _bits(alive):
            row = (adj >> (i * n)) & self.row_mask
            for j in _bits(row):
                arcs.append((labels[i], labels[j]))
        return Digraph(vertices, arcs)

    def redex(self, kind: ReductionKind, target: int | tuple[int, int]) -> Redex:
        if kind.targets_arcs:
            i, j = target
            return Redex(kind, (self.labels[i], self.labels[j]))
        return Redex(kind, self.labels[target])

    # -- redex enumeration ----------------------------------------------------

    def children(
        self,
        state: State,
        vertex_kinds: tuple[ReductionKind, ...],
        want_pie: bool,
        want_dome: bool,
    ) -> list[Child]:
        """Applicable redexes with their reduct keys, in canonical order.

        Must stay aligned with ``reductions.find_redexes``: kinds in priority
        order, targets ascending, and ascending index equals lexicographic
        label order because the universe is sorted.  The transpose of each
        child is left for the caller to build on demand.
        """
        n = self.n
        row_mask = self.row_mask
        wipe = self.wipe_masks
        alive, adj, tadj = state

        alive_list: list[int] = []
        rows = [0] * n
        trows = [0] * n
        loops = 0
        ow_total = 0
        scan = alive
        while scan:
            low = scan & -scan
            i = low.bit_length() - 1
            scan ^= low
            alive_list.append(i)
            shift = i * n
            row = (adj >> shift) & row_mask
            trow = (tadj >> shift) & row_mask
            rows[i] = row
            trows[i] = trow
            ow_total |= row & ~trow
            if row & low:
                loops |= low

        def diclique(members: int) -> bool:
            if members & loops:
                return False
            left = members
            while left:
                low2 = left & -left
                left ^= low2
                if (members ^ low2) & ~rows[low2.bit_length() - 1]:
                    return False
            return True

        def kill(dead: int) -> tuple[int, int]:
            adj2 = adj
            left = dead
            while left:
                low2 = left & -left
                left ^= low2
                adj2 &= ~wipe[low2.bit_length() - 1]
            return alive & ~dead, adj2

        def contract(i: int) -> tuple[int, int]:
            succs = rows[i]
            preds = trows[i]
            alive2, adj2 = kill(1 << i)
            left = preds
            while left:
                low2 = left & -left
                left ^= low2
                adj2 |= succs << ((low2.bit_length() - 1) * n)
            return alive2, adj2

        # one pass over the vertices fills per-kind buckets, concatenated in
        # priority order so the output ordering matches find_redexes
        buckets: list[list[Child]] = [[] for _ in vertex_kinds]
        for i in alive_list:
            bit = 1 << i
            row = rows[i]
            trow = trows[i]
            has_loop = loops & bit
            for slot, kind in enumerate(vertex_kinds):
                if kind is ReductionKind.LOOP:
                    if has_loop:
                        buckets[slot].append((kind, i, *kill(bit)))
                elif kind is ReductionKind.IN0:
                    if not trow:
                        buckets[slot].append((kind, i, *kill(bit)))
                elif kind is ReductionKind.OUT0:
                    if not row:
                        buckets[slot].append((kind, i, *kill(bit)))
                elif kind is ReductionKind.CORE:
                    neighbors = row | trow
                    if neighbors and diclique(neighbors | bit):
                        buckets[slot].append((kind, i, *kill(neighbors)))
                elif has_loop:
                    continue
                elif kind is ReductionKind.INDICLIQUE:
                    if diclique(trow):
                        buckets[slot].append((kind, i, *contract(i)))
                elif kind is ReductionKind.OUTDICLIQUE:
                    if diclique(row):
                        buckets[slot].append((kind, i, *contract(i)))
                elif kind is ReductionKind.IN1:
                    if trow.bit_count() == 1:
                        buckets[slot].append((kind, i, *contract(i)))
                elif row.bit_count() == 1:  # OUT1
                    buckets[slot].append((kind, i, *contract(i)))

        out: list[Child] = []
        for bucket in buckets:
            out.extend(bucket)

        if want_pie and ow_total:
            comp = self._one_way_scc(alive_list, rows, trows)
            pie = ReductionKind.PIE
            for i in alive_list:
                ow_row = rows[i] & ~trows[i]
                ci = comp[i]
                shift = i * n
                while ow_row:
                    low = ow_row & -ow_row
                    j = low.bit_length() - 1
                    ow_row ^= low
                    if ci != comp[j]:
                        out.append(
                            (pie, (i, j), alive, adj & ~(1 << (shift + j)))
                        )
        if want_dome and ow_total:
            dome = ReductionKind.DOME
            for i in alive_list:
                row_i = rows[i]
                trow_i = trows[i]
                ow_row = row_i & ~trow_i
                ow_preds = trow_i & ~row_i
                shift = i * n
                while ow_row:
                    low = ow_row & -ow_row
                    j = low.bit_length() - 1
                    ow_row ^= low
                    if ow_preds & ~trows[j] and (rows[j] & ~trows[j]) & ~row_i:
                        continue
                    out.append((dome, (i, j), alive, adj & ~(1 << (shift + j))))
        return out

    def _one_way_scc(
        self, alive_list: list[int], rows: list[int], trows: list[int]
    ) -> list[int]:
        """Component id per vertex index in the one-way subgraph."""
        n = self.n
        comp = [-1] * n
        index = [-1] * n
        low = [0] * n
        on_stack = [False] * n
        stack: list[int] = []
        counter = 0
        comp_count = 0
        ow = [0] * n
        for i in alive_list:
            ow[i] = rows[i] & ~trows[i]
        for root in alive_list:
            if index[root] >= 0:
                continue
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on_stack[root] = True
            work = [(root, ow[root])]
            while work:
                v, pending = work.pop()
                advanced = False
                while pending:
                    low_bit = pending & -pending
                    w = low_bit.bit_length() - 1
                    pending ^= low_bit
                    if index[w] < 0:
                        work.append((v, pending))
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack[w] = True
                        work.append((w, ow[w]))
                        advanced = True
                        break
                    if on_stack[w] and index[w] < low[v]:
                        low[v] = index[w]
                if advanced:
                    continue
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = comp_count
                        if w == v:
                            break
                    comp_count += 1
                if work:
                    parent = work[-1][0]
                    if low[v] < low[parent]:
                        low[parent] = low[v]
        return comp


class NormalFormClosure:
    """Memoized reachable-normal-form sets over one universe.

    ``nf_keys`` returns the packed keys of every normal form reachable from a
    state, sharing one memo across queries so joinability checks over many
    sibling reducts explore the common state space once.  Set objects are
    interned: in the common confluent case every state points at the same
    singleton.
    """

    def __init__(
        self, universe: BitUniverse, kinds: frozenset[ReductionKind], state_cap: int
    ):
        self.universe = universe
        self.vertex_kinds = tuple(k for k in _VERTEX_KINDS if k in kinds)
        self.want_pie = ReductionKind.PIE in kinds
        self.want_dome = ReductionKind.DOME in kinds
        self.state_cap = state_cap
        self.memo: dict[int, frozenset[int]] = {}
        self._interned: dict[frozenset[int], frozenset[int]] = {}
        self.capped = False

    def _intern(self, keys: frozenset[int]) -> frozenset[int]:
        return self._interned.setdefault(keys, keys)

    def _weak_components(self, state: State) -> list[int]:
        """Alive-mask per weakly connected component."""
        n = self.universe.n
        row_mask = self.universe.row_mask
        alive, adj, tadj = state
        components = []
        remaining = alive
        while remaining:
            seed = remaining & -remaining
            component = seed
            frontier = seed
            while frontier:
                grown = 0
                scan = frontier
                while scan:
                    low = scan & -scan
                    scan ^= low
                    shift = (low.bit_length() - 1) * n
                    grown |= ((adj >> shift) | (tadj >> shift)) & row_mask
                frontier = grown & ~component
                component |= frontier
            components.append(component)
            remaining &= ~component
        return components

    def _restrict(self, state: State, component: int) -> State:
        """The sub-state induced by one component (arcs never cross)."""
        n = self.universe.n
        row_mask = self.universe.row_mask
        _, adj, tadj = state
        adj_sub = 0
        tadj_sub = 0
        scan = component
        while scan:
            low = scan & -scan
            scan ^= low
            shift = (low.bit_length() - 1) * n
            keep = row_mask << shift
            adj_sub |= adj & keep
            tadj_sub |= tadj & keep
        return component, adj_sub, tadj_sub

    def nf_keys(self, state: State) -> frozenset[int] | None:
        """Reachable normal-form keys, or None once the state cap is hit.

        Depth-first over the reduct DAG (strict measure decrease means no
        cycles), consuming each open state's child queue incrementally so
        every edge of the space is handled once.  Disconnected states factor:
        every redex lives inside one weakly connected component, so the
        reachable normal forms are exactly the disjoint unions of one normal
        form per component, and disjoint alive masks make that a bitwise OR
        of packed keys.
        """
        universe = self.universe
        n = universe.n
        memo = self.memo
        open_states: dict[int, tuple[list[tuple[int, int]], list[frozenset[int]]]] = {}
        work: list[State] = [state]
        while work:
            current = work[-1]
            key = (current[1] << n) | current[0]
            if key in memo:
                work.pop()
                continue
            entry = open_states.get(key)
            if entry is None:
                if self.capped or len(memo) + len(open_states) >= self.state_cap:
                    self.capped = True
                    return None
                components = self._weak_components(current)
                if len(components) > 1:
                    product = {0}
                    for component in components:
                        sub_keys = self.nf_keys(self._restrict(current, component))
                        if sub_keys is None:
                            return None
                        product = {p | k for p in product for k in sub_keys}
                        if len(product) > 65536:
                            self.capped = True
                            return None
                    memo[key] = self._intern(frozenset(product))
                    work.pop()
                    continue
                raw = universe.children(
                    current, self.vertex_kinds, self.want_pie, self.want_dome
                )
                if not raw:
                    memo[key] = self._intern(frozenset((key,)))
                    work.pop()
                    continue
                entry = ([(alive2, adj2) for _, _, alive2, adj2 in raw], [])
                open_states[key] = entry
            remaining, resolved = entry
            descended = False
            while remaining:
                alive2, adj2 = remaining[-1]
                child_set = memo.get((adj2 << n) | alive2)
                if child_set is None:
                    work.append((alive2, adj2, universe.transpose(adj2)))
                    descended = True
                    break
                resolved.append(child_set)
                remaining.pop()
            if descended:
                continue
            distinct = set(resolved)
            if len(distinct) == 1:
                merged = resolved[0]
            else:
                union: set[int] = set()
                for child_set in distinct:
                    union |= child_set
                merged = self._intern(frozenset(union))
            memo[key] = merged
            del open_states[key]
            work.pop()
        return memo[(state[1] << n) | state[0]]

    def descend_to(self, state: State, target_key: int) -> list[tuple[ReductionKind, "int | tuple[int, int]"]]:
        """A redex path from ``state`` to the normal form keyed ``target_key``."""
        universe = self.universe
        n = universe.n
        steps: list[tuple[ReductionKind, int | tuple[int, int]]] = []
        current = state
        while ((current[1] << n) | current[0]) != target_key:
            found = universe.children(
                current, self.vertex_kinds, self.want_pie, self.want_dome
            )
            for kind, target, alive2, adj2 in found:
                child = (alive2, adj2, universe.transpose(adj2))
                child_set = self.nf_keys(child)
                if child_set is not None and target_key in child_set:
                    steps.append((kind, target))
                    current = child
                    break
            else:
                raise RuntimeError("normal form unreachable during descent")
        return steps


ParentMap = dict[int, "tuple[int, ReductionKind, int | tuple[int, int]] | None"]


def explore(
    graph: Digraph, kinds: frozenset[ReductionKind], state_cap: int
) -> tuple[BitUniverse, ParentMap, list[tuple[int, int]], bool]:
    """Breadth-first exhaustive exploration of the reduct space.

    Returns the universe, the parent map (keyed by the packed state integer
    ``adj << n | alive``), the normal-form states, and the truncation flag.
    """
    universe = BitUniverse(graph.vertices)
    n = universe.n
    vertex_kinds = tuple(k for k in _VERTEX_KINDS if k in kinds)
    want_pie = ReductionKind.PIE in kinds
    want_dome = ReductionKind.DOME in kinds
    start = universe.pack(graph)
    start_key = (start[1] << n) | start[0]
    parents: ParentMap = {start_key: None}
    queue: deque[State] = deque([start])
    normal_forms: list[tuple[int, int]] = []
    truncated = False
    children = universe.children
    transpose = universe.transpose
    append = queue.append
    while queue:
        state = queue.popleft()
        found = children(state, vertex_kinds, want_pie, want_dome)
        if not found:
            normal_forms.append((state[0], state[1]))
            continue
        key = (state[1] << n) | state[0]
        for kind, target, alive2, adj2 in found:
            child_key = (adj2 << n) | alive2
            if child_key in parents:
                continue
            if len(parents) >= state_cap:
                truncated = True
                continue
            parents[child_key] = (key, kind, target)
            append((alive2, adj2, transpose(adj2)))
    return universe, parents, normal_forms, truncated
