"""Command line behaviour: eval, repl, demo, store persistence."""

import pytest

from hpk.kernel import Kernel
from hpk.workbench.cli import main
from hpk.workbench.hsrc import render_hsrc
from hpk.hyperprog import concat_all, mk_link
from hpk.lang.values import AnyValue
from hpk.typerep import INT


def test_eval_prints_result(tmp_path, capsys):
    f = tmp_path / "prog.src"
    f.write_text("1 + 2\n")
    assert main(["eval", str(f)]) == 0
    assert capsys.readouterr().out.strip() == "3"


def test_eval_prints_program_output_before_result(tmp_path, capsys):
    f = tmp_path / "prog.src"
    f.write_text('writeString( "side" )\n40 + 2')
    assert main(["eval", str(f)]) == 0
    assert capsys.readouterr().out.splitlines() == ["side", "42"]


def test_eval_reports_compile_error(tmp_path, capsys):
    f = tmp_path / "bad.src"
    f.write_text("3 +")
    assert main(["eval", str(f)]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error at line 1")


def test_eval_reports_fault(tmp_path, capsys):
    f = tmp_path / "fault.src"
    f.write_text("3 / 0")
    assert main(["eval", str(f)]) == 1
    assert "fault:" in capsys.readouterr().err


def test_eval_missing_file(tmp_path, capsys):
    assert main(["eval", str(tmp_path / "absent.src")]) == 1
    assert capsys.readouterr().err != ""


def test_eval_runs_hsrc_files(tmp_path, capsys):
    kernel = Kernel()
    hs = concat_all(["1 + ", mk_link(AnyValue(INT, 41), "answer")])
    f = tmp_path / "prog.hsrc"
    f.write_text(render_hsrc(kernel, hs))
    assert main(["eval", str(f)]) == 0
    assert capsys.readouterr().out.strip() == "42"


def test_eval_hsrc_with_dead_path_names_it(tmp_path, capsys):
    store = str(tmp_path / "img.hpk")
    seed = tmp_path / "seed.src"
    seed.write_text("in PS() let pinned = struct( n = 1 )")
    assert main(["eval", str(seed), "--store", store]) == 0
    kernel = Kernel()
    ok = kernel.run_box(kernel.compile_string("in PS() let pinned = struct( n = 1 )"))
    from hpk.store import resolve_path

    pinned = resolve_path(kernel.image, "/pinned").value
    hs = concat_all(["( ", mk_link(AnyValue(pinned.type_rep, pinned), "row"),
                     " )( n )"])
    f = tmp_path / "prog.hsrc"
    f.write_text(render_hsrc(kernel, hs))
    assert main(["eval", str(f)]) == 1
    assert "/pinned" in capsys.readouterr().err


def test_store_persists_between_invocations(tmp_path, capsys):
    store = str(tmp_path / "img.hpk")
    first = tmp_path / "a.src"
    first.write_text("in PS() let counterBase := 41")
    second = tmp_path / "b.src"
    second.write_text("use PS() with counterBase : int in counterBase + 1")
    assert main(["eval", str(first), "--store", store]) == 0
    capsys.readouterr()
    assert main(["eval", str(second), "--store", store]) == 0
    assert capsys.readouterr().out.strip() == "42"


def test_repl_evaluates_lines(monkeypatch, capsys):
    lines = iter(["1 + 1", "writeString( \"done\" )", ""])

    def fake_input(prompt=""):
        try:
            return next(lines)
        except StopIteration:
            raise EOFError

    monkeypatch.setattr("builtins.input", fake_input)
    assert main(["repl"]) == 0
    out = capsys.readouterr().out
    assert "2" in out
    assert "done" in out


def test_demo_natural_join_passes(capsys):
    assert main(["demo", "natural-join"]) == 0
    out = capsys.readouterr().out
    assert "generated join procedure:" in out
    assert "ann works in sales under dee" in out
    assert "bob works in labs under eve" in out
    assert "cid works in sales under dee" in out
    assert out.strip().endswith("PASS")
