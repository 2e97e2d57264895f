"""The standard symbol table.

Every compilation can see these names after its own tables and the shared
table.  The set procedure surface follows the generator library: values of
library-private kinds (sources, generators, comparisons) travel through
`any`, so user code can pass them around but never take them apart.
"""

from __future__ import annotations

from . import generator as G
from . import genlib as L
from .hyperprog import (
    HYPER_SOURCE_REP,
    LinkError,
    SymbolEntry,
    SymbolTable,
    box_hyper_source,
    concat_hyper_source,
    extract_hyper_source,
    mk_env_loc_link,
    mk_hyper_source,
    mk_link,
    mk_struct_loc_link,
    mk_type_link,
    mk_vec_loc_link,
    unbox_hyper_source,
)
from .lang.interp import RuntimeFault
from .lang.values import AnyValue, BuiltinClosure, Closure, EnvValue
from .typerep import (
    ANY,
    BOOL,
    ENV,
    INT,
    SET,
    STRING,
    TYPEREP,
    DuplicateFieldError,
    ProcType,
    TypeRep,
    equal_type,
    type_of,
    write_type,
)


def _need_any(v, what="an any value"):
    if not isinstance(v, AnyValue):
        raise RuntimeFault(f"expected {what}")
    return v


def _need_set(v):
    if not isinstance(v, L.SetValue):
        raise RuntimeFault("expected a set")
    return v


def _need_type(v):
    if not isinstance(v, TypeRep):
        raise RuntimeFault("expected a type representation")
    return v


def _need_proc(v):
    if isinstance(v, AnyValue):
        v = v.value
    if not isinstance(v, (Closure, BuiltinClosure)):
        raise RuntimeFault("expected a procedure value")
    return v


def _hs(v):
    try:
        return unbox_hyper_source(v)
    except LinkError as exc:
        raise RuntimeFault(str(exc)) from exc


def _gs(v):
    if isinstance(v, AnyValue):
        v = v.value
    if isinstance(v, G.GeneratorSource):
        return v
    raise RuntimeFault("expected a generator source value")


def _gen(v):
    try:
        return G.unbox_generator(v)
    except G.GenError as exc:
        raise RuntimeFault(str(exc)) from exc


def build_builtins(kernel) -> dict[str, BuiltinClosure]:
    """All named builtins, bound to one kernel."""
    out: dict[str, BuiltinClosure] = {}

    def define(name, params, result, fn):
        out[name] = BuiltinClosure(name, ProcType(tuple(params), result), fn)

    # core

    define("PS", (), ENV, lambda: kernel.image.root)
    define("writeString", (STRING,), None, kernel.interp.write)
    define("writeInt", (INT,), None, lambda n: kernel.interp.write(str(n)))
    define("readString", (), STRING, kernel.interp.read_line)
    define("compile", (STRING,), ANY, kernel.compile_string)

    # types

    define("equalType", (TYPEREP, TYPEREP), BOOL,
           lambda a, b: equal_type(_need_type(a), _need_type(b)))
    define("typeOf", (ANY,), TYPEREP, lambda box: type_of(_need_any(box)))
    define("writeType", (TYPEREP,), STRING, lambda t: write_type(_need_type(t)))

    def get_structure_fields(t):
        return L.structure_fields_set(_need_type(t))

    define("getStructureFields", (TYPEREP,), SET, get_structure_fields)

    def mk_structure_type(s):
        try:
            return L.mk_structure_type_from_set(_need_set(s))
        except (DuplicateFieldError, L.LibError, ValueError) as exc:
            raise RuntimeFault(str(exc)) from exc

    define("mkStructureType", (SET,), TYPEREP, mk_structure_type)

    # sets

    def mk_comparison(box):
        f = _need_proc(box)
        return L.box_comparison(L.Comparison(eq_value=f))

    define("mkComparison", (ANY,), ANY, mk_comparison)

    def mk_empty_set(t, cmp_box):
        return L.empty_set(_need_type(t), L.unbox_comparison(cmp_box))

    define("mkEmptySet", (TYPEREP, ANY), SET, mk_empty_set)

    def check_elem(s, box):
        box = _need_any(box, "a boxed set element")
        if not equal_type(box.type_rep, s.elem_type):
            raise RuntimeFault(
                f"set element type mismatch: expected "
                f"{write_type(s.elem_type)}, found {write_type(box.type_rep)}")
        return box.value

    def wrap_lib(fn, *args):
        try:
            return fn(*args)
        except L.LibError as exc:
            raise RuntimeFault(str(exc)) from exc

    define("insert", (SET, ANY), SET,
           lambda s, b: wrap_lib(L.insert, _need_set(s), check_elem(_need_set(s), b)))
    define("memberOf", (ANY, SET), BOOL,
           lambda b, s: wrap_lib(L.member, _need_set(s), check_elem(_need_set(s), b)))
    define("union", (SET, SET), SET,
           lambda a, b: wrap_lib(L.union, _need_set(a), _need_set(b)))
    define("intersection", (SET, SET), SET,
           lambda a, b: wrap_lib(L.intersection, _need_set(a), _need_set(b)))
    define("difference", (SET, SET), SET,
           lambda a, b: wrap_lib(L.difference, _need_set(a), _need_set(b)))
    define("delete", (SET, ANY), SET,
           lambda s, b: wrap_lib(L.delete, _need_set(s), check_elem(_need_set(s), b)))
    define("choose", (SET,), ANY,
           lambda s: AnyValue(_need_set(s).elem_type, wrap_lib(L.choose, s)))
    define("rest", (SET,), SET, lambda s: wrap_lib(L.rest, _need_set(s)))
    define("includes", (SET, SET), BOOL,
           lambda a, b: wrap_lib(L.includes, _need_set(a), _need_set(b)))
    define("size", (SET,), INT, lambda s: L.set_size(_need_set(s)))

    def iterate(s, visit):
        s = _need_set(s)
        f = _need_proc(visit)
        L.iterate(s, lambda e: kernel.call(f, [AnyValue(s.elem_type, e)]))

    define("iterate", (SET, ProcType((ANY,), BOOL)), None, iterate)

    def map_set(s, f_box, cmp_box):
        s = _need_set(s)
        f = _need_proc(f_box)
        result_t = f.proc_type.result
        if result_t is None:
            raise RuntimeFault("map needs a value-returning procedure")
        cmp = L.unbox_comparison(cmp_box)
        return L.map_set(s, lambda e: kernel.call(f, [e]), result_t, cmp)

    define("map", (SET, ANY, ANY), SET, map_set)

    # source fragments

    def wrap_link(fn, *args):
        try:
            return box_hyper_source(fn(*args))
        except LinkError as exc:
            raise RuntimeFault(str(exc)) from exc

    define("mkHyperSource", (STRING,), ANY, lambda s: wrap_link(mk_hyper_source, s))
    define("mkLink", (ANY,), ANY, lambda b: wrap_link(mk_link, _need_any(b)))

    def env_loc_link(env, name):
        if not isinstance(env, EnvValue):
            raise RuntimeFault("expected an environment")
        return wrap_link(mk_env_loc_link, env, name)

    define("mkEnvLocLink", (ENV, STRING), ANY, env_loc_link)
    define("mkStructLocLink", (ANY, STRING), ANY,
           lambda b, f: wrap_link(mk_struct_loc_link, _need_any(b), f))
    define("mkVecLocLink", (ANY, INT), ANY,
           lambda b, i: wrap_link(mk_vec_loc_link, _need_any(b), i))
    define("mkTypeLink", (TYPEREP,), ANY,
           lambda t: wrap_link(mk_type_link, _need_type(t)))
    define("concatHyperSource", (ANY, ANY), ANY,
           lambda a, b: wrap_link(concat_hyper_source, _hs(a), _hs(b)))
    define("extractHyperSource", (ANY, INT, INT), ANY,
           lambda h, i, j: wrap_link(extract_hyper_source, _hs(h), i, j))

    def and_compose(s):
        return box_hyper_source(wrap_lib(L.and_compose, _need_set(s)))

    def or_compose(s):
        return box_hyper_source(wrap_lib(L.or_compose, _need_set(s)))

    def mk_struct(s):
        return box_hyper_source(wrap_lib(L.mk_struct, _need_set(s)))

    define("andCompose", (SET,), ANY, and_compose)
    define("orCompose", (SET,), ANY, or_compose)
    define("mkStruct", (SET,), ANY, mk_struct)

    # generators

    def gen_wrap(fn, *args):
        try:
            return fn(*args)
        except G.GenError as exc:
            raise RuntimeFault(str(exc)) from exc

    define("mkGeneratorSource", (ANY,), ANY,
           lambda h: G.box_generator_source(G.mk_generator_source(_hs(h))))
    define("concatGeneratorSource", (ANY, ANY), ANY,
           lambda a, b: G.box_generator_source(
               gen_wrap(G.concat_generator_source, _gs(a), _gs(b))))
    define("extractGeneratorSource", (ANY, INT, INT), ANY,
           lambda g, i, j: G.box_generator_source(
               gen_wrap(G.extract_generator_source, _gs(g), i, j)))
    define("expandGenerator", (ANY, ENV), ANY,
           lambda g, env: box_hyper_source(
               gen_wrap(G.expand_generator, _gen(g), env, kernel)))
    define("evalWithString", (ANY, STRING), ANY,
           lambda g, s: box_hyper_source(
               gen_wrap(G.eval_with_string, _gen(g), s, kernel)))

    def compile_and_process(h, consumer):
        G.compile_and_process(_hs(h), _need_proc(consumer), kernel)

    define("compileAndProcess", (ANY, ProcType((ANY,), None)), None,
           compile_and_process)

    # workbench hooks

    from .workbench.browser import build_display_builtins

    out.update(build_display_builtins(kernel))
    return out


def build_standard_table(kernel) -> SymbolTable:
    table = SymbolTable()
    for name, bc in kernel.builtins.items():
        table.add(SymbolEntry(name, "value", bc.proc_type, False, value=bc))
    cmp_box = L.box_comparison(L.Comparison(name="hyperSource"))
    table.add(SymbolEntry("compareHyperSource", "value", ANY, False,
                          value=cmp_box))
    return table
