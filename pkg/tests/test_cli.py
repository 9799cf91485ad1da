import importlib
import inspect
import io
import json
from pathlib import Path

import pytest

from inflogic.cli import COMMANDS, OPERATIONS, build_parser, main

DATA = Path(__file__).parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_classify_builtin():
    code, out, _ = run("classify", "--formula", "psi_blocks.fml")
    assert code == 0
    assert out.startswith("forall_rank=2 exists_rank=3 ")


def test_tree_self_loop():
    code, out, _ = run("tree", "--spec", DATA / "selfloop.json", "--weak-force")
    assert code == 0
    assert out.strip() == "TRUE route=tree-oracle certificate=[cycle r]"


def test_block_alternation_column():
    code, out, _ = run("block", "--config", DATA / "A.json", "--alternate", "--steps", 4)
    assert code == 0
    assert out.splitlines()[-1] == "truth column F,T,F,T,F"


def test_unbound_variable():
    code, out, err = run("eval", "--structure", DATA / "s.json", "--formula", DATA / "f.fml")
    assert code == 1 and out == ""
    assert "unbound variable x" in err


def test_eval_and_weak_force():
    code, out, _ = run("eval", "--structure", DATA / "s.json", "--formula", DATA / "f.fml",
                       "--assign", "x=a")
    assert (code, out.strip()) == (0, "TRUE")
    code, out, _ = run("weak-force", "--structure", DATA / "s.json", "--formula",
                       DATA / "f.fml", "--assign", "x=a", "--audit")
    assert code == 0
    assert out.splitlines()[-1] == "agreement=yes"


def test_unknown_exits_two(tmp_path):
    g = tmp_path / "g.fml"
    g.write_text("(Or (n) (and (atom P_n x) (atom Q x)))")
    A = tmp_path / "a.json"
    A.write_text(json.dumps({"universe": ["a", "b"],
                             "relations": {"P_7": [["a"]], "Q": [["b"]]}}))
    code, out, _ = run("eval", "--structure", A, "--formula", g, "--assign", "x=a",
                       "--budget", 2)
    assert code == 2 and out.startswith("UNKNOWN")
    assert run("eval", "--structure", A, "--formula", g, "--assign", "x=a")[0] == 0


def test_budget_from_environment(tmp_path, monkeypatch):
    g = tmp_path / "g.fml"
    g.write_text("(Or (n) (and (atom P_n x) (atom Q x)))")
    A = tmp_path / "a.json"
    A.write_text(json.dumps({"universe": ["a", "b"],
                             "relations": {"P_7": [["a"]], "Q": [["b"]]}}))
    monkeypatch.setenv("INFLOGIC_BUDGET", "2")
    assert run("eval", "--structure", A, "--formula", g, "--assign", "x=a")[0] == 2
    monkeypatch.setenv("INFLOGIC_BUDGET", "lots")
    code, _, err = run("classify", "--formula", "psi_tree")
    assert code == 1 and "INFLOGIC_BUDGET" in err


def test_records_format():
    code, out, _ = run("--format", "records", "weak-force", "--structure", DATA / "s.json",
                       "--text", "(exists (y) (atom R x y))", "--assign", "x=a")
    assert code == 0
    assert out.splitlines() == ["value=TRUE", "route=finite-collapse", "witness=(b0)"]
    code, out, _ = run("classify", "--format", "records", "--formula", "psi_tree")
    assert out.splitlines() == ["forall_rank=2", "exists_rank=1", "pi_rank=4", "sigma_rank=3"]


def test_syntax_errors_report_positions(tmp_path):
    bad = tmp_path / "bad.fml"
    bad.write_text("(atom R x")
    code, _, err = run("classify", "--formula", bad)
    assert code == 1
    assert f"{bad}:1:10:" in err


def test_usage_errors_exit_one():
    assert run("tree")[0] == 1
    assert run("no-such-command")[0] == 1
    assert run("weak-force", "--formula", "psi_tree")[0] == 1


def test_other_commands():
    assert run("negate", "--text", "(forall (x) (atom Q x))")[1].strip() == \
        "(exists (x) (not (atom Q x)))"
    out = run("fragment", "--text", "(exists (y) (atom R x y))")[1]
    assert out.splitlines()[0] == "4 formulas"
    assert run("check", "--formula", "psi_blocks")[1].strip() == "ok"
    code, out, _ = run("check", "--text", "(And (n) (atom P_n y_{n}))")
    assert code == 1 and out.startswith("free-variables:")
    out = run("force", "--formula", "psi_tree", "--leaves", 2, 2)[1].splitlines()
    assert out[0].startswith("(AndFam (finsubsets x)") and len(out) == 5
    code, out, _ = run("nelem", "--sub", DATA / "s.json", "--super", DATA / "s.json", "--n", 2)
    assert (code, out.strip()) == (0, "TRUE")
    out = run("tree", "--spec", DATA / "three.json", "--truncate", 2)[1]
    assert len(json.loads(out)["universe"]) == 3
    assert run("tree", "--spec", DATA / "selfloop.json", "--path")[1].strip() == \
        "path prefix=[] cycle=[0]"
    code, out, _ = run("borel", "--basis", DATA / "basis.json", "--code", DATA / "code.json",
                       "--check")
    assert code == 0 and out.splitlines()[-1] == "agreement=yes"
    out = run("borel", "--basis", DATA / "basis.json", "--code", DATA / "code.json",
              "--face", "10")[1]
    assert "xi (and (exists (x) (atom Q x)) (not (forall (x)" in out
    code, out, _ = run("demo")
    assert code == 0 and "truth column F,T,F,T,F" in out


def test_reports_are_deterministic():
    argvs = [("demo",), ("force", "--formula", "psi_tree", "--leaves", 3, 3),
             ("weak-force", "--structure", DATA / "s.json", "--formula", DATA / "f.fml",
              "--assign", "x=a", "--audit")]
    for argv in argvs:
        assert run(*argv) == run(*argv)


def test_every_operation_has_a_command():
    modules = [importlib.import_module(f"inflogic.{m}") for m in
               ("analysis", "parser", "structures", "force", "families", "borel", "forcing")]
    for name, command in OPERATIONS.items():
        assert command in COMMANDS, name
        assert any(inspect.isfunction(getattr(m, name, None)) for m in modules), name
    sub = build_parser()._subparsers._group_actions[0].choices
    assert set(sub) == set(COMMANDS)
    assert set(OPERATIONS.values()) | {"demo"} == set(COMMANDS)


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_help_for_every_command(command, capsys):
    assert main([command, "--help"]) == 0
    assert capsys.readouterr().out.startswith(f"usage: inflogic {command}")
