"""Run-time compiler: boxes, error conventions, table search order."""

import pytest

from hpk.hyperprog import (
    SymbolTable,
    ValueBinding,
    binding_to_entry,
    mk_link,
)
from hpk.kernel import Kernel, RuntimeFault, is_error_box
from hpk.lang.values import AnyValue
from hpk.typerep import INT, ProcType, equal_type, write_type


def test_compile_produces_thunk_box(kernel):
    box = kernel.compile_string("3 + 4")
    assert isinstance(box, AnyValue)
    assert equal_type(box.type_rep, ProcType((), INT))
    assert kernel.run_box(box) == 7


def test_compile_error_is_a_string_box(kernel):
    box = kernel.compile_string("abc")
    assert is_error_box(box)
    assert box.value.startswith("error at line 1")


def test_error_line_numbers_count_newlines(kernel):
    box = kernel.compile_string("let x = 1\nlet y = 2\nzzz")
    assert is_error_box(box)
    assert box.value.startswith("error at line 3")


def test_compiled_proc_value(kernel):
    box = kernel.compile_string("proc( i : int -> int ) ; i + 1")
    assert write_type(box.type_rep) == "proc( -> proc( int -> int ) )"
    inc = kernel.run_box(box)
    assert kernel.call(inc, [3]) == 4


def test_run_box_raises_on_error_box(kernel):
    box = kernel.compile_string("(((")
    with pytest.raises(RuntimeFault, match="error at line"):
        kernel.run_box(box)


def test_eval_source_returns_error_boxes(kernel):
    out = kernel.eval_source("((")
    assert is_error_box(out)


def test_unknown_compile_option(kernel):
    box = kernel.compile_with_tables("1", (), ("fastmath",))
    assert is_error_box(box)
    assert "unknown option" in box.value


def test_user_table_resolves_free_names(kernel):
    table = SymbolTable()
    table.add(binding_to_entry("seven", ValueBinding(INT, 7)))
    box = kernel.compile_with_tables("seven + 1", [table], ())
    assert kernel.run_box(box) == 8


def test_user_table_shadows_standard_names(kernel):
    table = SymbolTable()
    table.add(binding_to_entry("size", ValueBinding(INT, 99)))
    box = kernel.compile_with_tables("size + 1", [table], ())
    assert kernel.run_box(box) == 100


def test_shared_table_between_user_and_standard(kernel):
    kernel.eval_source("in PS() let width := 10")
    from hpk.store import resolve_path

    kernel.add_shared_binding("width",
                              resolve_path(kernel.image, "/width",
                                           want="location"))
    assert kernel.eval_source("width * 2") == 20
    table = SymbolTable()
    table.add(binding_to_entry("width", ValueBinding(INT, 1)))
    box = kernel.compile_with_tables("width * 2", [table], ())
    assert kernel.run_box(box) == 2


def test_compile_as_a_value_inside_the_language(kernel):
    prog = """let box = compile( "40 + 2" )
project box as f onto
proc( -> int ) : f( )
default : -1"""
    assert kernel.eval_source(prog) == 42


def test_compile_error_box_projects_as_string(kernel):
    prog = """let box = compile( "((" )
project box as msg onto
string : msg
default : "no error" """
    out = kernel.eval_source(prog)
    assert out.startswith("error at line 1")


def test_link_compiles_against_value(kernel):
    hs = mk_link(AnyValue(INT, 41), "answer")
    from hpk.hyperprog import concat_all

    box = kernel.compile_hyper(concat_all(["1 + ", hs]))
    assert kernel.run_box(box) == 42
