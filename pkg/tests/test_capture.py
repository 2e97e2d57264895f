"""Source recovery for procedure values.

Every procedure literal keeps its exact source span; free identifiers
show up as frame locations bound to the live activation record.
"""

from hpk.hyperprog import (
    FrameLocBinding,
    ValueBinding,
    concat_all,
    mk_link,
)
from hpk.lang.values import AnyValue, Closure
from hpk.typerep import INT


def link_text(hs, i):
    region, _ = hs.substitutions[i]
    return hs.code[region.start - 1:region.finish]


def test_plain_literal_keeps_exact_span(kernel):
    text = "proc( x : int -> int ) ; x * 2"
    f = kernel.run_box(kernel.compile_string(text))
    src = kernel.get_proc_source(f)
    assert src.code == text
    assert src.substitutions == ()


def test_builtin_names_stay_plain_text(kernel):
    text = 'proc( -> int ) begin writeString( "hi" ) 3 end'
    f = kernel.run_box(kernel.compile_string(text))
    src = kernel.get_proc_source(f)
    assert src.code == text
    assert src.substitutions == ()


def test_parameter_is_not_free_but_outer_binding_is(kernel):
    prog = "let a := 5\nproc( b : int -> int ) ; a + b"
    f = kernel.run_box(kernel.compile_string(prog))
    src = kernel.get_proc_source(f)
    assert src.code == "proc( b : int -> int ) ; a + b"
    assert len(src.substitutions) == 1
    region, binding = src.substitutions[0]
    assert src.code[region.start - 1:region.finish] == "a"
    assert isinstance(binding, FrameLocBinding)
    assert binding.mutable
    assert binding.frame.slots[binding.slot].value == 5


P1_BODY = ("proc( -> proc( -> int ) )\n"
           "begin\n"
           "let y = x + ")
P1_REST = ("\n"
           "let p2 = proc( -> int )\n"
           "begin\n"
           "x + y + 2\n"
           "end\n"
           "p2\n"
           "end")


def nested_program(kernel):
    prog = concat_all(["let x := 10\nlet p1 = ",
                       P1_BODY, mk_link(AnyValue(INT, 5), "z"), P1_REST,
                       "\np1"])
    p1 = kernel.run_box(kernel.compile_hyper(prog))
    p2 = kernel.call(p1, [])
    return p1, p2


def test_nested_outer_capture(kernel):
    p1, _ = nested_program(kernel)
    src = kernel.get_proc_source(p1)
    assert src.code == P1_BODY + "z" + P1_REST
    texts = [link_text(src, i) for i in range(len(src.substitutions))]
    assert texts == ["x", "z", "x"]
    first_x, z_link, second_x = (b for _, b in src.substitutions)
    assert isinstance(z_link, ValueBinding)
    assert z_link.value == 5
    assert isinstance(first_x, FrameLocBinding)
    assert first_x.frame is second_x.frame
    assert first_x.slot == second_x.slot


def test_nested_inner_capture(kernel):
    p1, p2 = nested_program(kernel)
    assert isinstance(p2, Closure)
    src = kernel.get_proc_source(p2)
    assert src.code == "proc( -> int )\nbegin\nx + y + 2\nend"
    texts = [link_text(src, i) for i in range(len(src.substitutions))]
    assert texts == ["x", "y"]
    x_loc, y_loc = (b for _, b in src.substitutions)
    assert isinstance(x_loc, FrameLocBinding)
    assert isinstance(y_loc, FrameLocBinding)
    assert x_loc.frame.slots[x_loc.slot].value == 10
    assert y_loc.frame.slots[y_loc.slot].value == 15
    assert not y_loc.mutable


def test_inner_and_outer_share_the_x_location(kernel):
    p1, p2 = nested_program(kernel)
    outer_x = kernel.get_proc_source(p1).substitutions[0][1]
    inner_x = kernel.get_proc_source(p2).substitutions[0][1]
    cell = inner_x.frame.slots[inner_x.slot]
    assert outer_x.frame.slots[outer_x.slot] is cell
    assert kernel.call(p2, []) == 10 + 15 + 2
    cell.value = 100
    assert kernel.call(p2, []) == 100 + 15 + 2


def test_each_call_captures_its_own_frame(kernel):
    prog = ("let mk = proc( n : int -> proc( -> int ) )\n"
            "begin\n"
            "proc( -> int ) ; n * n\n"
            "end\nmk")
    mk = kernel.run_box(kernel.compile_string(prog))
    f3 = kernel.call(mk, [3])
    f9 = kernel.call(mk, [9])
    b3 = kernel.get_proc_source(f3).substitutions[0][1]
    b9 = kernel.get_proc_source(f9).substitutions[0][1]
    assert b3.frame is not b9.frame
    assert b3.frame.slots[b3.slot].value == 3
    assert b9.frame.slots[b9.slot].value == 9


def test_use_clause_capture_marks_env_location(kernel):
    kernel.run_box(kernel.compile_string("in PS() let yearX := 1900"))
    f = kernel.run_box(kernel.compile_string(
        "use PS() with yearX : int in proc( -> int ) ; yearX + 1"))
    src = kernel.get_proc_source(f)
    assert src.code == "proc( -> int ) ; yearX + 1"
    (_, binding), = src.substitutions
    assert isinstance(binding, FrameLocBinding)
    assert binding.is_env_loc
    assert kernel.call(f, []) == 1901
    kernel.run_box(kernel.compile_string(
        "use PS() with yearX : int in yearX := 2000"))
    assert kernel.call(f, []) == 2001
