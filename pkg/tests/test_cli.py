import json
import subprocess
import sys

import pytest

from oreach.cli import main

import gen

ONTO = gen.corpus_path("hiring.onto")
NU = "User(x_winner) & !EligibleUser(x_winner)"


def verify(*extra, sas="hiring.sas"):
    return ["verify", "--onto", ONTO, "--sas", gen.corpus_path(sas), *extra]


def test_safe_exit_zero(capsys):
    assert main(verify("--unsafe", NU)) == 0
    out = capsys.readouterr().out
    report = json.loads(out)
    assert list(report) == ["status", "iterations", "trace", "formula", "witness"]
    assert report["status"] == "safe" and report["witness"] is None


def test_unsafe_exit_one_and_trace_file(tmp_path, capsys):
    out_file = tmp_path / "trace.json"
    code = main(verify("--unsafe-file", gen.corpus_path("hiring.unsafe"), "--trace-out", str(out_file), sas="hiring_weak.sas"))
    assert code == 1
    stdout = capsys.readouterr().out
    assert out_file.read_text(encoding="utf-8") == stdout
    report = json.loads(stdout)
    assert [s["transition"] for s in report["trace"]] == ["tau1", "tau2", "tau3", "tau4"]
    w = report["witness"]
    assert list(w) == ["domain", "concepts", "roles", "constants", "assignments"]
    assert len(w["assignments"]) == 5


def test_inconclusive_exit_three(capsys):
    assert main(verify("--unsafe", NU, "--max-iters", "1", sas="hiring_weak.sas")) == 3
    assert json.loads(capsys.readouterr().out)["status"] == "inconclusive"


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--onto", "missing.onto", "--sas", "x.sas", "--unsafe", "A(x)"],
        ["verify", "--onto", ONTO, "--sas", gen.corpus_path("hiring.sas")],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_parse_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.onto"
    bad.write_text("A <= <=\n")
    assert main(["check-onto", str(bad)]) == 2
    assert f"{bad}:1:" in capsys.readouterr().err


def test_unsafe_formula_with_unknown_name(capsys):
    assert main(verify("--unsafe", "Nope(x_winner) & x_whatever = u")) == 2
    err = capsys.readouterr().err
    assert "'Nope'" in err and "'x_whatever'" in err


def test_translate_and_check(capsys):
    assert main(["translate", ONTO]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert sum(1 for l in lines if l.startswith("forall")) == 12
    assert main(["check-onto", ONTO]) == 0
    assert "12 concept inclusions" in capsys.readouterr().out


def test_qe(capsys):
    assert main(["qe", "--onto", ONTO, "--constraint", "suitableFor(x, y) & Graduate(x)", "--drop", "y"]) == 0
    assert capsys.readouterr().out == "Graduate(x) & PositivelyEvaluated(x) & User(x)\n"
    assert main(["qe", "--onto", ONTO, "--constraint", "appliesFor(x, y) & AcademicPosition(y) & x = z", "--drop", "x,y"]) == 0
    assert capsys.readouterr().out == "User(z)\n"


def test_oracle_subcommand(capsys):
    argv = ["oracle", "verify", "--onto", ONTO, "--sas", gen.corpus_path("hiring_weak.sas"), "--unsafe", NU]
    assert main(argv + ["--domain", "5", "--depth", "5"]) == 1
    assert json.loads(capsys.readouterr().out)["status"] == "violation"


def test_byte_identical_runs(capsys):
    argv = verify("--unsafe", NU, sas="hiring_weak.sas")
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    assert first.endswith("}\n")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "oreach", "translate", ONTO], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.count("forall") == 12


def test_log_env_var(capsys, monkeypatch):
    import logging

    monkeypatch.setenv("OREACH_LOG", "INFO")
    root = logging.getLogger()
    old = root.handlers[:]
    root.handlers.clear()
    try:
        main(verify("--unsafe", NU))
        assert "iteration 0" in capsys.readouterr().err
    finally:
        root.handlers[:] = old
        root.setLevel(logging.WARNING)
