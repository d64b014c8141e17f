import subprocess
import sys

import pytest

from fvskernel import dome_counterexample, parse_digraph
from fvskernel.cli import main, parse_rules
from fvskernel.reductions import ALL_RULES, CONFLUENT_RULES, ReductionKind


def run_cli(args, stdin=""):
    proc = subprocess.run(
        [sys.executable, "-m", "fvskernel", *args],
        input=stdin,
        capture_output=True,
        text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_parse_rules():
    assert parse_rules("all") == ALL_RULES
    assert parse_rules("confluent") == CONFLUENT_RULES
    assert parse_rules("LOOP,PIE") == {ReductionKind.LOOP, ReductionKind.PIE}
    with pytest.raises(Exception):
        parse_rules("loop")


def test_gen_round_trips(tmp_path):
    code, out, _ = run_cli(["gen", "--n=6", "--p=0.4", "--seed=3", "--loops"])
    assert code == 0
    g = parse_digraph(out)
    assert len(g.vertices) == 6


def test_gen_rejects_bad_probability():
    code, _, err = run_cli(["gen", "--n=3", "--p=1.5"])
    assert code == 1
    assert "usage error" in err


def test_usage_error_unknown_flag():
    code, _, _ = run_cli(["reduce", "--bogus"])
    assert code == 1


def test_parse_error_exit_code(tmp_path):
    doc = tmp_path / "bad.dg"
    doc.write_text("a b c\n")
    code, _, err = run_cli(["reduce", str(doc)])
    assert code == 2
    assert "line 1" in err


def test_reduce_loop_graph(tmp_path):
    doc = tmp_path / "loop.dg"
    doc.write_text("a a\na b\nb a\n")
    code, out, _ = run_cli(["reduce", str(doc), "--rules=all"])
    assert code == 0
    assert "forced: a b" in out or "forced: a" in out
    assert "# trace strategy=priority seed=0" in out
    assert "LOOP(a) forced=[a]" in out


def test_reduce_deterministic(tmp_path):
    doc = tmp_path / "g.dg"
    code, gen_out, _ = run_cli(["gen", "--n=7", "--p=0.3", "--seed=11"])
    doc.write_text(gen_out)
    first = run_cli(["reduce", str(doc), "--strategy=random", "--seed=5"])
    second = run_cli(["reduce", str(doc), "--strategy=random", "--seed=5"])
    assert first == second


def test_solve_three_cycle(tmp_path):
    doc = tmp_path / "c3.dg"
    doc.write_text("a b\nb c\nc a\n")
    code, out, _ = run_cli(["solve", str(doc)])
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "size: 1"
    assert lines[0].startswith("mfvs: ")


def test_solve_cap_exit(tmp_path):
    doc = tmp_path / "kernel.dg"
    from fvskernel import emit_digraph

    doc.write_text(emit_digraph(dome_counterexample().delete_arc(("c", "e"))))
    code, _, err = run_cli(["solve", str(doc), "--cap=5"])
    assert code == 3
    assert "cap" in err


def test_confluence_exhaustive_confluent_rules(tmp_path):
    doc = tmp_path / "g.dg"
    doc.write_text("a b\nb c\nc a\n")
    code, out, _ = run_cli(["confluence", str(doc), "--rules=confluent"])
    assert code == 0
    assert "normal_forms: 1" in out
    assert "truncated: false" in out


def test_confluence_counterexample_pipe():
    code, doc, _ = run_cli(["counterexample", "dome"])
    assert code == 0
    code, out, _ = run_cli(
        ["confluence", "--rules=all", "--mode=exhaustive"], stdin=doc
    )
    assert code == 4
    assert "normal_forms: 2" in out


def test_confluence_truncation_exit(tmp_path):
    doc = tmp_path / "g.dg"
    doc.write_text("a b\nb c\nc d\n")
    code, out, _ = run_cli(["confluence", str(doc), "--rules=confluent", "--cap=2"])
    assert code == 3
    assert "truncated: true" in out


def test_confluence_sampled_never_certifies(tmp_path):
    doc = tmp_path / "g.dg"
    doc.write_text("a b\nb c\nc a\n")
    code, out, _ = run_cli(
        ["confluence", str(doc), "--rules=confluent", "--mode=sampled", "--trials=8"]
    )
    assert code == 3
    assert "normal_forms: 1" in out
    assert "truncated: true" in out


def test_counterexample_document_is_validated():
    code, out, _ = run_cli(["counterexample", "dome"])
    assert code == 0
    assert parse_digraph(out) == dome_counterexample()


def test_check_fvs():
    doc = "a b\nb a\n"
    code, out, _ = run_cli(["check", "--fvs=a"], stdin=doc)
    assert code == 0
    assert out == "fvs: yes\n"
    code, out, _ = run_cli(["check", "--fvs="], stdin=doc)
    assert code == 4
    assert out == "fvs: no\n"
    code, _, _ = run_cli(["check", "--fvs=zz"], stdin=doc)
    assert code == 2


def test_missing_file_is_usage_error():
    code, _, _ = run_cli(["reduce", "/no/such/file"])
    assert code == 1


def test_in_process_main_matches_subprocess(capsys):
    assert main(["counterexample", "dome"]) == 0
    in_process = capsys.readouterr().out
    _, out, _ = run_cli(["counterexample", "dome"])
    assert in_process == out


def test_format_soundness_report():
    from fvskernel import verify_soundness
    from fvskernel.cli import format_soundness_report

    report = verify_soundness(parse_digraph("a b\nb a\n"), trials=2)
    text = format_soundness_report(report)
    assert "size-identity: pass" in text
    assert "lift-validity: pass" in text
    assert "family-preservation: pass" in text
