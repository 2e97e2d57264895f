"""The kernel: a run-time-callable compiler over a persistent store.

Compilation never raises for user errors: the result of compiling is an
any-box holding either a parameterless procedure (the program thunk) or an
error string of the form "error at line L: message".  Each invocation of
the thunk runs the program in a fresh top-level frame.

Symbol lookup during compilation searches, in order: the hyper-source's
own link table, caller-supplied tables, the store's shared table, and the
standard table.
"""

from __future__ import annotations

import threading

from .hyperprog import (
    HyperSource,
    LinkError,
    Region,
    SymbolTable,
    binding_to_entry,
    extract_hyper_source,
    map_point_back,
    mk_hyper_source,
    to_compiler_form,
)
from .lang import nodes as N
from .lang.check import CheckError, check_program
from .lang.interp import Interpreter, RuntimeFault
from .lang.lexer import LexError
from .lang.parser import ParseError, parse_program
from .lang.values import AnyValue, BuiltinClosure, Closure
from .typerep import STRING, ProcType
from .store import StoreImage


def error_box(line: int, message: str) -> AnyValue:
    return AnyValue(STRING, f"error at line {line}: {message}")


def is_error_box(box) -> bool:
    return (isinstance(box, AnyValue) and isinstance(box.value, str)
            and box.value.startswith("error at line "))


def read_source(reader) -> str:
    """Accept a string, a callable producing one, or a .read() object."""
    if isinstance(reader, str):
        return reader
    if hasattr(reader, "read"):
        return reader.read()
    if callable(reader):
        return reader()
    raise TypeError("unreadable source")


class SharedTableView:
    """Symbol-table adapter over the store's shared bindings.

    Lookup is lazy so compilations see the table as it stands.
    """

    def __init__(self, shared):
        self.shared = shared

    def lookup(self, name):
        binding = self.shared.get(name)
        if binding is None:
            return None
        return binding_to_entry(name, binding)


def attach_templates(proc_ctxs, hyper: HyperSource, region_map):
    """Give every procedure literal (and the program) its source attachment:

    the literal's span of the original hyper-source plus one frame-location
    placeholder per free identifier occurrence.
    """
    for ctx in proc_ctxs:
        node = ctx.node
        start = map_point_back(region_map, node.start)
        finish = map_point_back(region_map, node.finish, end=True)
        span = extract_hyper_source(hyper, start, finish)
        placeholders = []
        for (s, f, level, slot, type_rep, is_use, mutable) in ctx.free_occurrences:
            os_ = map_point_back(region_map, s) - start + 1
            of_ = map_point_back(region_map, f, end=True) - start + 1
            placeholders.append(N.Placeholder(os_, of_, level, slot, type_rep,
                                              is_use, mutable))
        node.template = N.SourceTemplate(span, placeholders)


class Kernel:
    """One store image plus the machinery to compile and run against it."""

    def __init__(self, image: StoreImage | None = None, input_lines=None):
        self.image = image if image is not None else StoreImage()
        self.interp = Interpreter(input_lines)
        self.lock = threading.RLock()
        self._std_table = None
        self.builtins: dict | None = None
        self.display_compiles = 0
        self._collectors: list[list] = []
        self.std_table

    @property
    def root(self):
        return self.image.root

    @property
    def std_table(self) -> SymbolTable:
        if self._std_table is None:
            from .stdenv import build_builtins, build_standard_table
            from .workbench.browser import seed_display_cache

            self.builtins = build_builtins(self)
            self._std_table = build_standard_table(self)
            self.image.adopt_builtins(self.builtins)
            seed_display_cache(self)
        return self._std_table

    def attach_image(self, image: StoreImage):
        """Swap in a loaded image; live builtins carry over."""
        with self.lock:
            self.image = image
            if self.builtins is not None:
                image.adopt_builtins(self.builtins)
                from .workbench.browser import seed_display_cache

                seed_display_cache(self)

    def table_chain(self, tables=()):
        return list(tables) + [SharedTableView(self.image.shared), self.std_table]

    # compilation

    def compile_string(self, reader) -> AnyValue:
        return self.compile_with_tables(reader, (), ())

    def compile_with_tables(self, reader, tables, options) -> AnyValue:
        if options:
            first = next(iter(options))
            return error_box(1, f"unknown option: {first}")
        if isinstance(reader, HyperSource):
            return self.compile_hyper(reader, tables)
        try:
            text = read_source(reader)
        except Exception as exc:
            return error_box(1, str(exc))
        return self.compile_hyper(mk_hyper_source(text), tables)

    def compile_hyper(self, hyper: HyperSource, tables=(), options=()) -> AnyValue:
        if options:
            first = next(iter(options))
            return error_box(1, f"unknown option: {first}")
        with self.lock:
            try:
                text, link_table, region_map = to_compiler_form(hyper)
            except LinkError as exc:
                return error_box(1, str(exc))
            try:
                prog = parse_program(text)
            except (LexError, ParseError) as exc:
                return error_box(exc.line, exc.message)
            chain = [link_table] + self.table_chain(tables)
            try:
                t, proc_ctxs = check_program(prog, text, chain)
            except CheckError as exc:
                return error_box(exc.line, exc.message)
            attach_templates(proc_ctxs, hyper, region_map)
            thunk = self.interp.make_closure(prog, None)
            return AnyValue(ProcType((), t), thunk)

    # execution

    def call(self, f, args):
        with self.lock:
            return self.interp.call(f, args)

    def run_box(self, box: AnyValue):
        """Invoke a compilation result's thunk."""
        if is_error_box(box):
            raise RuntimeFault(box.value)
        return self.call(box.value, [])

    def eval_source(self, reader):
        """Compile and run in one step; error boxes come back unraised."""
        box = self.compile_string(reader)
        if is_error_box(box):
            return box
        return self.call(box.value, [])

    # source recovery

    def get_proc_source(self, f) -> HyperSource | None:
        if isinstance(f, Closure):
            return f.source
        return None

    # shared table

    def add_shared_binding(self, name: str, binding):
        self.image.shared.add(name, binding)

    def remove_shared_binding(self, name: str):
        self.image.shared.remove(name)


__all__ = [
    "Kernel",
    "attach_templates",
    "error_box",
    "is_error_box",
    "SharedTableView",
]
