"""Digraph reduction toolkit for the minimum feedback vertex set problem.

Kernelization rules with forced-vertex bookkeeping, a terminating rewriting
engine with traces and replay, empirical confluence checking, and exact
brute-force oracles for small instances.
"""

from .confluence import (
    DivergencePair,
    NormalFormReport,
    all_normal_forms,
    commutation_square_check,
    dome_counterexample,
    local_joinability,
    one_step_reducts,
    sampled_normal_forms,
)
from .digraph import (
    Arc,
    Digraph,
    LoopContractionError,
    UnknownArcError,
    UnknownVertexError,
    isomorphic,
)
from .engine import (
    KernelResult,
    NotAnFvsError,
    ReductionTrace,
    ReplayDivergenceError,
    Strategy,
    TraceStep,
    lift_mfvs,
    normalize,
    replay,
)
from .fileformat import DigraphParseError, emit_digraph, parse_digraph
from .mfvs import (
    CapExceededError,
    MfvsResult,
    SolveResult,
    SoundnessReport,
    brute_force_mfvs,
    fvs_family,
    is_fvs,
    solve,
    verify_soundness,
)
from .randgen import derive_seed, random_digraph
from .reductions import (
    ALL_RULES,
    CONFLUENT_RULES,
    ApplyResult,
    PreconditionError,
    Redex,
    ReductionKind,
    apply_redex,
    check_precondition,
    find_redexes,
    parse_redex,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_RULES",
    "Arc",
    "ApplyResult",
    "CONFLUENT_RULES",
    "CapExceededError",
    "Digraph",
    "DigraphParseError",
    "DivergencePair",
    "KernelResult",
    "LoopContractionError",
    "MfvsResult",
    "NormalFormReport",
    "NotAnFvsError",
    "PreconditionError",
    "Redex",
    "ReductionKind",
    "ReductionTrace",
    "ReplayDivergenceError",
    "SolveResult",
    "SoundnessReport",
    "Strategy",
    "TraceStep",
    "UnknownArcError",
    "UnknownVertexError",
    "all_normal_forms",
    "apply_redex",
    "brute_force_mfvs",
    "check_precondition",
    "commutation_square_check",
    "derive_seed",
    "dome_counterexample",
    "emit_digraph",
    "find_redexes",
    "fvs_family",
    "is_fvs",
    "isomorphic",
    "lift_mfvs",
    "local_joinability",
    "normalize",
    "one_step_reducts",
    "parse_digraph",
    "parse_redex",
    "random_digraph",
    "replay",
    "sampled_normal_forms",
    "solve",
    "verify_soundness",
]
