"""Empirical confluence checks: normal-form search, joinability, counterexample.

The rewriting relation is terminating, so a rule set is confluent exactly when
every input reaches a unique irreducible graph.  ``all_normal_forms`` decides
that by exhausting the reachable state space; ``local_joinability`` mechanizes
the one-step divergence test that suffices for terminating relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import _bitsearch
from .digraph import Arc, Digraph, UnknownArcError, UnknownVertexError, isomorphic
from .engine import ReductionTrace, Strategy, TraceStep, normalize
from .randgen import derive_seed
from .reductions import (
    ALL_RULES,
    PreconditionError,
    Redex,
    ReductionKind,
    apply_redex,
    check_precondition,
    find_redexes,
)


@dataclass(frozen=True)
class NormalFormReport:
    """Distinct irreducible graphs reachable from ``input`` under ``kinds``.

    ``normal_forms`` holds one representative per isomorphism class (the
    label-canonically smallest member), because the reductions only promise a
    unique result up to the naming of contraction survivors: a chain of two
    interchangeable twin vertices can be contracted from either end, keeping
    either label.  ``labeled_normal_forms`` counts the distinct labeled
    graphs behind the classes.  ``normal_forms`` and ``witnesses`` are
    aligned and canonically ordered; ``truncated`` False means the listing is
    complete.
    """

    input: Digraph
    kinds: frozenset[ReductionKind]
    normal_forms: tuple[Digraph, ...]
    witnesses: tuple[ReductionTrace, ...]
    explored: int
    truncated: bool
    labeled_normal_forms: int = 0


@dataclass(frozen=True)
class DivergencePair:
    """One-step divergence from ``base`` and whether the two sides rejoin.

    When joined, the two witness traces end at isomorphic digraphs.
    """

    base: Digraph
    left: Redex
    right: Redex
    joined: bool
    join_witnesses: tuple[ReductionTrace, ReductionTrace] | None
    capped: bool


def one_step_reducts(
    graph: Digraph, kinds: Iterable[ReductionKind] = ALL_RULES
) -> list[tuple[Redex, Digraph]]:
    """Every single-step reduct of ``graph``, in canonical redex order."""
    return [(r, apply_redex(graph, r).reduced) for r in find_redexes(graph, kinds)]


def all_normal_forms(
    graph: Digraph,
    kinds: Iterable[ReductionKind] = ALL_RULES,
    state_cap: int = 100_000,
) -> NormalFormReport:
    """Exhaustive search of the reduct space, memoized by canonical encoding.

    When the number of distinct states would exceed ``state_cap`` the search
    stops expanding and reports ``truncated=True`` with whatever it found.
    Small caps run breadth-first with full parent tracking; very large caps
    switch to a leaner memoized closure that factors disconnected states
    (truncated closure runs cannot report partial normal forms).
    """
    wanted = frozenset(kinds)
    if state_cap <= _PARENT_SEARCH_CAP:
        return _bfs_report(graph, wanted, state_cap)
    return _closure_report(graph, wanted, state_cap)


# Above this cap the breadth-first parent map gets too heavy; a memoized
# depth-first closure answers the same question in a fraction of the memory,
# at the price of witness traces on truncated output.
_PARENT_SEARCH_CAP = 2_000_000


def _bfs_report(graph, wanted, state_cap) -> NormalFormReport:
    universe, parents, nf_states, truncated = _bitsearch.explore(graph, wanted, state_cap)
    found = sorted(
        ((universe.unpack(alive, adj), (adj << universe.n) | alive) for alive, adj in nf_states),
        key=lambda pair: pair[0].canonical_bytes(),
    )
    representatives = _iso_representatives([nf for nf, _ in found])
    keys = {id(nf): key for nf, key in found}
    witnesses = tuple(
        _witness_trace(graph, universe, parents, nf, keys[id(nf)])
        for nf in representatives
    )
    return NormalFormReport(
        input=graph,
        kinds=wanted,
        normal_forms=tuple(representatives),
        witnesses=witnesses,
        explored=len(parents),
        truncated=truncated,
        labeled_normal_forms=len(found),
    )


def _closure_report(graph, wanted, state_cap) -> NormalFormReport:
    universe = _bitsearch.BitUniverse(graph.vertices)
    closure = _bitsearch.NormalFormClosure(universe, wanted, state_cap)
    start = universe.pack(graph)
    keys = closure.nf_keys(start)
    truncated = keys is None
    if truncated:
        # the factored memo mixes component states in, so no reachable
        # normal forms can be reported from a capped closure run
        keys = frozenset()
    mask = (1 << universe.n) - 1
    found = [
        (universe.unpack(key & mask, key >> universe.n), key) for key in sorted(keys)
    ]
    found.sort(key=lambda pair: pair[0].canonical_bytes())
    representatives = _iso_representatives([nf for nf, _ in found])
    rep_keys = {id(nf): key for nf, key in found}
    witnesses = ()
    if not truncated:
        witnesses = tuple(
            _trace_from_path(
                graph,
                universe,
                closure.descend_to(start, rep_keys[id(nf)]),
                nf,
            )
            for nf in representatives
        )
    return NormalFormReport(
        input=graph,
        kinds=wanted,
        normal_forms=tuple(representatives),
        witnesses=witnesses,
        explored=len(closure.memo),
        truncated=truncated,
        labeled_normal_forms=len(found),
    )


def _trace_from_path(start, universe, redex_path, expected) -> ReductionTrace:
    current = start
    steps = []
    for kind, target in redex_path:
        redex = universe.redex(kind, target)
        result = apply_redex(current, redex)
        steps.append(TraceStep(redex, result.forced))
        current = result.reduced
    if current != expected:
        raise RuntimeError(f"witness replay diverged for {expected!r}")
    return ReductionTrace(start, tuple(steps), current)


def _iso_representatives(graphs: list[Digraph]) -> list[Digraph]:
    """Canonically-least representative per isomorphism class, input order kept."""
    representatives: list[Digraph] = []
    for candidate in graphs:
        if not any(isomorphic(candidate, rep) for rep in representatives):
            representatives.append(candidate)
    return representatives


def _witness_trace(start, universe, parents, normal_form, key) -> ReductionTrace:
    # Walk the search tree back to the root, then re-execute the steps with
    # the checked reference semantics; a mismatch would mean the packed search
    # diverged from the rule definitions.
    redexes: list[Redex] = []
    cursor = key
    while True:
        entry = parents[cursor]
        if entry is None:
            break
        cursor, kind, target = entry
        redexes.append(universe.redex(kind, target))
    redexes.reverse()
    current = start
    steps = []
    for redex in redexes:
        result = apply_redex(current, redex)
        steps.append(TraceStep(redex, result.forced))
        current = result.reduced
    if current != normal_form:
        raise RuntimeError(f"witness replay diverged for {normal_form!r}")
    return ReductionTrace(start, tuple(steps), current)


def sampled_normal_forms(
    graph: Digraph,
    kinds: Iterable[ReductionKind] = ALL_RULES,
    trials: int = 64,
    seed: int = 0,
) -> NormalFormReport:
    """Collect the distinct kernels of ``trials`` independent random runs.

    Sampling can witness non-confluence but never certify confluence, so the
    report is always marked truncated.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    wanted = frozenset(kinds)
    kernels: dict[bytes, tuple[Digraph, ReductionTrace]] = {}
    visited: set[bytes] = set()
    for trial in range(trials):
        strategy = Strategy("random", derive_seed(seed, trial))
        result = normalize(graph, wanted, strategy)
        current = graph
        visited.add(current.canonical_bytes())
        for step in result.trace.steps:
            current = apply_redex(current, step.redex).reduced
            visited.add(current.canonical_bytes())
        kernels.setdefault(result.kernel.canonical_bytes(), (result.kernel, result.trace))
    keys = sorted(kernels)
    representatives = _iso_representatives([kernels[k][0] for k in keys])
    return NormalFormReport(
        input=graph,
        kinds=wanted,
        normal_forms=tuple(representatives),
        witnesses=tuple(kernels[nf.canonical_bytes()][1] for nf in representatives),
        explored=len(visited),
        truncated=True,
        labeled_normal_forms=len(keys),
    )


def local_joinability(
    graph: Digraph,
    kinds: Iterable[ReductionKind] = ALL_RULES,
    state_cap: int = 100_000,
) -> list[DivergencePair]:
    """Decide joinability for every unordered pair of one-step reducts.

    Because the relation terminates, two reducts rejoin iff they share a
    reachable normal form (same isomorphism comparison as the reports).  All
    sides are resolved against one shared memoized search, and cap overruns
    are flagged per pair rather than raised.
    """
    wanted = frozenset(kinds)
    reducts = one_step_reducts(graph, wanted)
    if not reducts:
        return []
    universe = _bitsearch.BitUniverse(graph.vertices)
    closure = _bitsearch.NormalFormClosure(universe, wanted, state_cap)
    states = [universe.pack(reduced) for _, reduced in reducts]
    key_sets = [closure.nf_keys(state) for state in states]

    # group every seen normal form into isomorphism classes
    class_of: dict[int, int] = {}
    class_members: list[tuple[Digraph, int]] = []
    for key in sorted({k for keys in key_sets if keys for k in keys}):
        candidate = universe.unpack(key & ((1 << universe.n) - 1), key >> universe.n)
        for rep, class_id in class_members:
            if isomorphic(candidate, rep):
                class_of[key] = class_id
                break
        else:
            class_of[key] = len(class_members)
            class_members.append((candidate, len(class_members)))

    def witness(index: int, target_key: int) -> ReductionTrace:
        redex_path = closure.descend_to(states[index], target_key)
        current = reducts[index][1]
        steps = []
        for kind, target in redex_path:
            redex = universe.redex(kind, target)
            result = apply_redex(current, redex)
            steps.append(TraceStep(redex, result.forced))
            current = result.reduced
        return ReductionTrace(reducts[index][1], tuple(steps), current)

    pairs: list[DivergencePair] = []
    for i in range(len(reducts)):
        for j in range(i + 1, len(reducts)):
            capped = key_sets[i] is None or key_sets[j] is None
            witnesses = None
            if not capped:
                classes_i = {class_of[k] for k in key_sets[i]}
                classes_j = {class_of[k] for k in key_sets[j]}
                common = classes_i & classes_j
                if common:
                    target_class = min(common)
                    key_i = min(k for k in key_sets[i] if class_of[k] == target_class)
                    key_j = min(k for k in key_sets[j] if class_of[k] == target_class)
                    witnesses = (witness(i, key_i), witness(j, key_j))
            pairs.append(
                DivergencePair(
                    base=graph,
                    left=reducts[i][0],
                    right=reducts[j][0],
                    joined=witnesses is not None,
                    join_witnesses=witnesses,
                    capped=capped,
                )
            )
    return pairs


_SQUARE_KINDS = frozenset(
    {
        ReductionKind.LOOP,
        ReductionKind.INDICLIQUE,
        ReductionKind.OUTDICLIQUE,
        ReductionKind.PIE,
    }
)


def commutation_square_check(graph: Digraph, pie_target: Arc, other: Redex) -> bool:
    """Check that an arc deletion and another confluent-set step commute.

    Both orders are completed with the follow-up deletions the commutation
    argument calls for: when the deleted arc's own endpoint is contracted, the
    whole family of predecessor/successor bypass arcs is removed on both
    sides; otherwise only the deleted arc itself is.  Returns True iff the two
    completions reach the same digraph.
    """
    pie = Redex(ReductionKind.PIE, (pie_target[0], pie_target[1]))
    if other.kind not in _SQUARE_KINDS:
        raise PreconditionError(f"{other} is not a confluent-set redex")
    if not check_precondition(graph, pie):
        raise PreconditionError(f"{pie} is not applicable")
    if not check_precondition(graph, other):
        raise PreconditionError(f"{other} is not applicable")
    if other == pie:
        return True
    tail, head = pie.target
    if other.kind in (ReductionKind.INDICLIQUE, ReductionKind.OUTDICLIQUE):
        x = other.target
        if x == tail:
            family = {(p, head) for p in graph.predecessors(tail)}
        elif x == head:
            family = {(tail, s) for s in graph.successors(head)}
        else:
            family = {(tail, head)}
    else:
        family = {(tail, head)}

    left = apply_redex(graph, other).reduced
    right = apply_redex(graph, pie).reduced
    try:
        right = apply_redex(right, other).reduced
    except (PreconditionError, UnknownVertexError, UnknownArcError):
        return False
    for arc in sorted(family):
        if arc in left.arcs:
            left = left.delete_arc(arc)
        if arc in right.arcs:
            right = right.delete_arc(arc)
    return left == right


# The non-confluence witness for the full rule set.  Deleting (c,e) first
# blocks DOME(d,e) and leaves an irreducible graph; deleting (d,e) first keeps
# DOME(c,e) applicable, so two different normal forms are reachable.
_COUNTEREXAMPLE_ARCS: tuple[Arc, ...] = (
    ("a", "c"),
    ("b", "c"),
    ("a", "d"),
    ("c", "d"),
    ("a", "e"),
    ("b", "e"),
    ("c", "e"),
    ("d", "e"),
    ("d", "b"),
    ("f", "b"),
    ("e", "a"),
    ("f", "a"),
    ("e", "f"),
    ("c", "f"),
)


def dome_counterexample() -> Digraph:
    """The digraph witnessing that DOME breaks confluence of the full rule set.

    The construction is gated by self-checks on the defining neighborhood
    equalities and on the order-dependent DOME behavior; a bad transcription
    raises instead of returning.
    """
    graph = Digraph(arcs=_COUNTEREXAMPLE_ARCS)
    _validate_counterexample(graph)
    return graph


def _validate_counterexample(graph: Digraph) -> None:
    dome_ce = Redex(ReductionKind.DOME, ("c", "e"))
    dome_de = Redex(ReductionKind.DOME, ("d", "e"))
    one_way = graph.one_way()
    after_ce = graph.delete_arc(("c", "e"))
    after_de = graph.delete_arc(("d", "e"))
    checks: list[tuple[bool, str]] = [
        (one_way.predecessors("c") == frozenset("ab"), "one-way predecessors of c"),
        (one_way.predecessors("d") == frozenset({"a", "c"}), "one-way predecessors of d"),
        (graph.predecessors("e") == frozenset("abcd"), "predecessors of e"),
        (after_ce.predecessors("e") == frozenset("abd"), "predecessors of e after deleting (c,e)"),
        (check_precondition(graph, dome_ce), "DOME(c,e) applicable"),
        (check_precondition(graph, dome_de), "DOME(d,e) applicable"),
        (check_precondition(after_de, dome_ce), "DOME(c,e) applicable after DOME(d,e)"),
        (not check_precondition(after_ce, dome_de), "DOME(d,e) blocked after DOME(c,e)"),
        (not find_redexes(after_ce, ALL_RULES), "graph after DOME(c,e) is irreducible"),
    ]
    for ok, description in checks:
        if not ok:
            raise RuntimeError(f"counterexample transcription check failed: {description}")
