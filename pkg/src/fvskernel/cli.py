"""Command-line driver.

Commands: ``reduce``, ``solve``, ``confluence``, ``counterexample``,
``check``, ``gen``.  Exit codes: 0 success (or confluent verdict), 1 usage,
2 parse error, 3 resource cap, 4 negative verdict.  All output is
deterministic for fixed seeds and inputs.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path
from typing import Sequence

from .confluence import (
    NormalFormReport,
    all_normal_forms,
    dome_counterexample,
    sampled_normal_forms,
)
from .digraph import Digraph, UnknownVertexError
from .engine import ReductionTrace, Strategy
from .engine import normalize as run_normalize
from .fileformat import DigraphParseError, emit_digraph, parse_digraph
from .mfvs import CapExceededError, is_fvs, solve
from .randgen import random_digraph
from .reductions import ALL_RULES, CONFLUENT_RULES, ReductionKind

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_VERDICT = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the exit-code contract
    # reserves 2 for document parse errors, so route usage problems ourselves.
    def error(self, message: str):  # noqa: D102
        raise UsageError(message)


def parse_rules(spec: str) -> frozenset[ReductionKind]:
    """``confluent``, ``all``, or a comma list of exact kind names."""
    if spec == "all":
        return ALL_RULES
    if spec == "confluent":
        return CONFLUENT_RULES
    kinds = set()
    for name in spec.split(","):
        name = name.strip()
        if not name:
            continue
        try:
            kinds.add(ReductionKind[name])
        except KeyError:
            raise UsageError(f"unknown reduction kind {name!r}") from None
    if not kinds:
        raise UsageError("empty rule set")
    return frozenset(kinds)


def format_trace(trace: ReductionTrace, strategy: Strategy | None = None) -> str:
    """One header line, then one ``KIND(target) forced=[labels]`` line per step."""
    if strategy is None:
        header = "# trace strategy=search"
    else:
        header = f"# trace strategy={strategy.mode} seed={strategy.seed}"
    lines = [header]
    lines.extend(
        f"{step.redex} forced=[{','.join(sorted(step.forced))}]"
        for step in trace.steps
    )
    return "".join(line + "\n" for line in lines)


def format_normal_form_report(report: NormalFormReport) -> str:
    digest = hashlib.sha256(report.input.canonical_bytes()).hexdigest()
    kinds = ",".join(k.value for k in ReductionKind if k in report.kinds)
    parts = [
        f"input: sha256:{digest}\n",
        f"kinds: {kinds}\n",
        f"normal_forms: {len(report.normal_forms)}\n",
        f"labeled_normal_forms: {report.labeled_normal_forms}\n",
        f"explored: {report.explored}\n",
        f"truncated: {'true' if report.truncated else 'false'}\n",
    ]
    for i, (nf, witness) in enumerate(zip(report.normal_forms, report.witnesses), 1):
        parts.append(f"# normal form {i}\n")
        parts.append(emit_digraph(nf))
        parts.append(f"# witness {i}\n")
        parts.append(format_trace(witness))
    return "".join(parts)


def format_soundness_report(report) -> str:
    """Per-check verdict lines; failures carry the graph and offending trace."""
    checks = ("size-identity", "lift-validity", "family-preservation")
    failed = report.failure.check if report.failure else None
    lines = [f"trials: {report.trials}\n"]
    for name in checks:
        verdict = "fail" if name == failed else "pass"
        lines.append(f"{name}: {verdict}\n")
    if report.failure:
        lines.append(f"detail: {report.failure.detail}\n")
        lines.append("# counterexample\n")
        lines.append(emit_digraph(report.graph))
        lines.append(format_trace(report.failure.trace, report.failure.strategy))
    return "".join(lines)


def _read_document(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _cmd_reduce(args: argparse.Namespace) -> int:
    graph = parse_digraph(_read_document(args.file))
    rules = parse_rules(args.rules)
    strategy = Strategy(args.strategy, args.seed)
    result = run_normalize(graph, rules, strategy)
    out = [
        emit_digraph(result.kernel),
        f"forced: {' '.join(sorted(result.forced))}\n",
        format_trace(result.trace, strategy),
    ]
    sys.stdout.write("".join(out))
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace) -> int:
    graph = parse_digraph(_read_document(args.file))
    rules = parse_rules(args.rules)
    result = solve(graph, rules, Strategy(), vertex_cap=args.cap)
    sys.stdout.write(f"mfvs: {' '.join(sorted(result.mfvs))}\n")
    sys.stdout.write(f"size: {len(result.mfvs)}\n")
    return EXIT_OK


def _cmd_confluence(args: argparse.Namespace) -> int:
    graph = parse_digraph(_read_document(args.file))
    rules = parse_rules(args.rules)
    if args.mode == "exhaustive":
        report = all_normal_forms(graph, rules, state_cap=args.cap)
    else:
        report = sampled_normal_forms(graph, rules, trials=args.trials, seed=args.seed)
    sys.stdout.write(format_normal_form_report(report))
    if len(report.normal_forms) > 1:
        return EXIT_VERDICT
    if report.truncated:
        return EXIT_CAP
    return EXIT_OK


def _cmd_counterexample(args: argparse.Namespace) -> int:
    del args
    sys.stdout.write(emit_digraph(dome_counterexample()))
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    graph = parse_digraph(_read_document(args.file))
    labels = [token for token in args.fvs.split(",") if token]
    try:
        ok = is_fvs(graph, labels)
    except UnknownVertexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write("fvs: yes\n" if ok else "fvs: no\n")
    return EXIT_OK if ok else EXIT_VERDICT


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        graph = random_digraph(args.n, args.p, args.loops, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(emit_digraph(graph))
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="fvskernel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    reduce_p = sub.add_parser("reduce", help="kernelize a digraph and print the trace")
    reduce_p.add_argument("file", nargs="?", default="-")
    reduce_p.add_argument("--rules", default="all")
    reduce_p.add_argument("--strategy", choices=["priority", "random"], default="priority")
    reduce_p.add_argument("--seed", type=int, default=0)
    reduce_p.set_defaults(func=_cmd_reduce)

    solve_p = sub.add_parser("solve", help="kernelize then brute-force a minimum FVS")
    solve_p.add_argument("file", nargs="?", default="-")
    solve_p.add_argument("--rules", default="all")
    solve_p.add_argument("--cap", type=int, default=20)
    solve_p.set_defaults(func=_cmd_solve)

    confl_p = sub.add_parser("confluence", help="enumerate reachable normal forms")
    confl_p.add_argument("file", nargs="?", default="-")
    confl_p.add_argument("--rules", default="all")
    confl_p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    confl_p.add_argument("--trials", type=int, default=64)
    confl_p.add_argument("--seed", type=int, default=0)
    confl_p.add_argument("--cap", type=int, default=100_000)
    confl_p.set_defaults(func=_cmd_confluence)

    cex_p = sub.add_parser("counterexample", help="print a built-in counterexample")
    cex_p.add_argument("which", choices=["dome"])
    cex_p.set_defaults(func=_cmd_counterexample)

    check_p = sub.add_parser("check", help="test whether a vertex set is an FVS")
    check_p.add_argument("file", nargs="?", default="-")
    check_p.add_argument("--fvs", required=True)
    check_p.set_defaults(func=_cmd_check)

    gen_p = sub.add_parser("gen", help="generate a seeded random digraph")
    gen_p.add_argument("--n", type=int, required=True)
    gen_p.add_argument("--p", type=float, required=True)
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("--loops", action="store_true")
    gen_p.set_defaults(func=_cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DigraphParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
