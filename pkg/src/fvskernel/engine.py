"""Reduce-until-irreducible driver with trace recording and replay."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .digraph import Digraph, UnknownArcError, UnknownVertexError
from .randgen import SplitMix64
from .reductions import (
    ALL_RULES,
    PreconditionError,
    Redex,
    ReductionKind,
    apply_redex,
    find_redexes,
)


@dataclass(frozen=True)
class Strategy:
    """How the next redex is picked when several are applicable.

    ``priority`` takes the first redex in canonical enumeration order;
    ``random`` picks uniformly from a SplitMix64 stream, so equal seeds give
    identical runs.
    """

    mode: str = "priority"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("priority", "random"):
            raise ValueError(f"unknown strategy mode {self.mode!r}")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class TraceStep:
    redex: Redex
    forced: frozenset[str]


@dataclass(frozen=True)
class ReductionTrace:
    """An ordered record of applied steps, replayable from ``initial``."""

    initial: Digraph
    steps: tuple[TraceStep, ...]
    final: Digraph


@dataclass(frozen=True)
class KernelResult:
    kernel: Digraph
    forced: frozenset[str]
    trace: ReductionTrace


class ReplayDivergenceError(ValueError):
    """A recorded trace does not re-execute as recorded."""

    def __init__(self, step_index: int, reason: str):
        super().__init__(f"replay diverged at step {step_index + 1}: {reason}")
        self.step_index = step_index


class NotAnFvsError(ValueError):
    """A claimed feedback vertex set fails the acyclicity check."""


def normalize(
    graph: Digraph,
    kinds: Iterable[ReductionKind] = ALL_RULES,
    strategy: Strategy = Strategy(),
) -> KernelResult:
    """Apply redexes of the selected kinds until none is applicable.

    Redexes are re-enumerated after every step: preconditions are not stable
    under rewriting, so cached redexes would go stale.
    """
    wanted = frozenset(kinds)
    rng = SplitMix64(strategy.seed) if strategy.mode == "random" else None
    current = graph
    steps: list[TraceStep] = []
    forced: set[str] = set()
    while True:
        redexes = find_redexes(current, wanted)
        if not redexes:
            break
        if rng is None:
            redex = redexes[0]
        else:
            redex = redexes[rng.next_u64() % len(redexes)]
        result = apply_redex(current, redex)
        steps.append(TraceStep(redex, result.forced))
        forced |= result.forced
        current = result.reduced
    trace = ReductionTrace(graph, tuple(steps), current)
    return KernelResult(current, frozenset(forced), trace)


def replay(trace: ReductionTrace) -> KernelResult:
    """Re-execute a trace step by step, checking every precondition.

    Raises :class:`ReplayDivergenceError` naming the first step whose
    precondition fails, whose forced set differs from the recording, or whose
    outcome misses the recorded final graph.
    """
    current = trace.initial
    forced: set[str] = set()
    for i, step in enumerate(trace.steps):
        try:
            result = apply_redex(current, step.redex)
        except (PreconditionError, UnknownVertexError, UnknownArcError) as exc:
            raise ReplayDivergenceError(i, str(exc)) from exc
        if result.forced != step.forced:
            raise ReplayDivergenceError(
                i,
                f"recorded forced set {sorted(step.forced)} != recomputed {sorted(result.forced)}",
            )
        forced |= result.forced
        current = result.reduced
    if current != trace.final:
        raise ReplayDivergenceError(
            len(trace.steps), "re-executed final digraph does not match the recorded one"
        )
    return KernelResult(current, frozenset(forced), trace)


def lift_mfvs(result: KernelResult, kernel_mfvs: Iterable[str]) -> frozenset[str]:
    """Turn a feedback vertex set of the kernel into one of the original graph.

    The lift is just the union with the forced vertices; when the input is
    minimum for the kernel, the output is minimum for the original graph.
    """
    cover = frozenset(kernel_mfvs)
    stray = cover - result.kernel.vertices
    if stray:
        raise NotAnFvsError(f"not a subset of the kernel vertices: {sorted(stray)}")
    if not result.kernel.delete_vertices(cover).is_acyclic():
        raise NotAnFvsError(f"{sorted(cover)} is not a feedback vertex set of the kernel")
    return result.forced | cover
