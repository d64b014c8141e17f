"""Brute-force feedback-vertex-set ground truth and the solve pipeline.

The oracle enumerates vertex subsets in ascending cardinality and returns all
minimum feedback vertex sets, which is what the family-level preservation
checks need.  It never approximates: inputs above the vertex cap are refused.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .digraph import Digraph, UnknownVertexError
from .engine import KernelResult, ReductionTrace, Strategy, lift_mfvs, normalize
from .randgen import derive_seed
from .reductions import ALL_RULES, ReductionKind, apply_redex


class CapExceededError(ValueError):
    """An exact enumeration was requested beyond the configured vertex cap."""


@dataclass(frozen=True)
class MfvsResult:
    size: int
    minimum_sets: frozenset[frozenset[str]]
    explored_subsets: int


def is_fvs(graph: Digraph, subset: Iterable[str]) -> bool:
    """True iff deleting the subset leaves the graph acyclic."""
    cover = frozenset(subset)
    for u in cover:
        if u not in graph.vertices:
            raise UnknownVertexError(f"vertex {u!r} is not in the graph")
    return graph.delete_vertices(cover).is_acyclic()


def _mask_tables(graph: Digraph) -> tuple[list[str], list[int], int]:
    order = sorted(graph.vertices)
    index = {u: i for i, u in enumerate(order)}
    preds = [0] * len(order)
    loops = 0
    for t, h in graph.arcs:
        if t == h:
            loops |= 1 << index[t]
        else:
            preds[index[h]] |= 1 << index[t]
    return order, preds, loops


def _acyclic_without(preds: list[int], loops: int, full: int, removed: int) -> bool:
    alive = full & ~removed
    if loops & alive:
        return False
    while alive:
        progress = False
        rest = alive
        while rest:
            low = rest & -rest
            rest ^= low
            if not preds[low.bit_length() - 1] & alive:
                alive ^= low
                progress = True
        if not progress:
            return False
    return True


def brute_force_mfvs(graph: Digraph, vertex_cap: int = 20) -> MfvsResult:
    """Minimum FVS size and every minimum set, by size-ascending enumeration.

    Subsets of one cardinality are tried in lexicographic order over the
    sorted vertex labels, so ``explored_subsets`` is reproducible.
    """
    n = len(graph.vertices)
    if n > vertex_cap:
        raise CapExceededError(f"{n} vertices exceeds the cap of {vertex_cap}")
    order, preds, loops = _mask_tables(graph)
    full = (1 << n) - 1
    explored = 0
    for size in range(n + 1):
        found = []
        for combo in combinations(range(n), size):
            explored += 1
            removed = 0
            for i in combo:
                removed |= 1 << i
            if _acyclic_without(preds, loops, full, removed):
                found.append(combo)
        if found:
            sets = frozenset(
                frozenset(order[i] for i in combo) for combo in found
            )
            return MfvsResult(size, sets, explored)
    raise AssertionError("unreachable: the full vertex set is always an FVS")


def fvs_family(graph: Digraph, vertex_cap: int = 20) -> frozenset[frozenset[str]]:
    """Every feedback vertex set of the graph, minimum or not."""
    n = len(graph.vertices)
    if n > vertex_cap:
        raise CapExceededError(f"{n} vertices exceeds the cap of {vertex_cap}")
    order, preds, loops = _mask_tables(graph)
    full = (1 << n) - 1
    out = []
    for removed in _family_masks(preds, loops, full):
        out.append(frozenset(order[i] for i in range(n) if removed >> i & 1))
    return frozenset(out)


def _family_masks(preds: list[int], loops: int, full: int) -> list[int]:
    return [
        removed
        for removed in range(full + 1)
        if _acyclic_without(preds, loops, full, removed)
    ]


@dataclass(frozen=True)
class SolveResult:
    """A minimum FVS of the input plus the kernelization it came from."""

    mfvs: frozenset[str]
    kernel: KernelResult
    kernel_mfvs: MfvsResult


def solve(
    graph: Digraph,
    kinds: Iterable[ReductionKind] = ALL_RULES,
    strategy: Strategy = Strategy(),
    vertex_cap: int = 20,
) -> SolveResult:
    """Kernelize, brute-force the kernel, and lift the answer back.

    The reported set is the lexicographically smallest minimum FVS of the
    kernel united with the forced vertices, so output is deterministic.
    """
    result = normalize(graph, kinds, strategy)
    if len(result.kernel.vertices) > vertex_cap:
        raise CapExceededError(
            f"kernel has {len(result.kernel.vertices)} vertices, cap is {vertex_cap}"
        )
    oracle = brute_force_mfvs(result.kernel, vertex_cap)
    pick = min(oracle.minimum_sets, key=sorted)
    return SolveResult(lift_mfvs(result, pick), result, oracle)


@dataclass(frozen=True)
class SoundnessFailure:
    check: str
    strategy: Strategy
    trace: ReductionTrace
    detail: str


@dataclass(frozen=True)
class SoundnessReport:
    passed: bool
    graph: Digraph
    trials: int
    checks_run: int
    failure: SoundnessFailure | None


def verify_soundness(
    graph: Digraph,
    kinds: Iterable[ReductionKind] = ALL_RULES,
    trials: int = 4,
    seed: int = 0,
    vertex_cap: int = 12,
) -> SoundnessReport:
    """Certify MFVS preservation of the reductions against the brute oracle.

    Three checks per trial: the minimum size of the input equals forced count
    plus the minimum size of the kernel; every lifted minimum kernel FVS is a
    minimum FVS of the input; and each arc-deletion step (PIE or DOME) leaves
    the entire FVS family unchanged.  Stops at the first counterexample.
    """
    n = len(graph.vertices)
    if n > vertex_cap:
        raise CapExceededError(f"{n} vertices exceeds the cap of {vertex_cap}")
    wanted = frozenset(kinds)
    base = brute_force_mfvs(graph, vertex_cap)
    checks_run = 0
    for trial in range(trials):
        if trial == 0:
            strategy = Strategy()
        else:
            strategy = Strategy("random", derive_seed(seed, trial))
        result = normalize(graph, wanted, strategy)
        kernel_oracle = brute_force_mfvs(result.kernel, vertex_cap)

        checks_run += 1
        if base.size != len(result.forced) + kernel_oracle.size:
            return SoundnessReport(
                False,
                graph,
                trials,
                checks_run,
                SoundnessFailure(
                    "size-identity",
                    strategy,
                    result.trace,
                    f"input minimum {base.size} != {len(result.forced)} forced"
                    f" + kernel minimum {kernel_oracle.size}",
                ),
            )

        checks_run += 1
        for kernel_min in kernel_oracle.minimum_sets:
            lifted = result.forced | kernel_min
            if len(lifted) != base.size or not is_fvs(graph, lifted):
                return SoundnessReport(
                    False,
                    graph,
                    trials,
                    checks_run,
                    SoundnessFailure(
                        "lift-validity",
                        strategy,
                        result.trace,
                        f"lift of {sorted(kernel_min)} is not a minimum FVS",
                    ),
                )

        checks_run += 1
        current = graph
        family: list[int] | None = None
        for step in result.trace.steps:
            following = apply_redex(current, step.redex).reduced
            if step.redex.kind in (ReductionKind.PIE, ReductionKind.DOME):
                if family is None:
                    _, preds, loops = _mask_tables(current)
                    family = _family_masks(preds, loops, (1 << len(current.vertices)) - 1)
                _, preds, loops = _mask_tables(following)
                next_family = _family_masks(
                    preds, loops, (1 << len(following.vertices)) - 1
                )
                if family != next_family:
                    return SoundnessReport(
                        False,
                        graph,
                        trials,
                        checks_run,
                        SoundnessFailure(
                            "family-preservation",
                            strategy,
                            result.trace,
                            f"{step.redex} changed the FVS family",
                        ),
                    )
                family = next_family
            else:
                # Vertex sets differ after deletions/contractions, so mask
                # families are not comparable across this step.
                family = None
            current = following
    return SoundnessReport(True, graph, trials, checks_run, None)
