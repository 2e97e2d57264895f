"""Object browsing.

Two ways to produce a display model for a value.  The direct path walks
the value from the host.  The reflective path fetches a display procedure
for the value's type, generating and compiling one per type equivalence
class and caching it in the image; invoking that procedure rebuilds the
same model through the menu builtins.  The two answers must agree, which
the test suite checks over a mixed corpus.

Menu entry order is canonical (sorted names) so that every representation
of a type class displays identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..generator import GENERATOR_REP, GENERATOR_SOURCE_REP
from ..genlib import COMPARISON_REP
from ..hyperprog import HYPER_SOURCE_REP
from ..kernel import is_error_box
from ..lang.lexer import KEYWORDS
from ..lang.values import (
    NIL,
    AnyValue,
    BuiltinClosure,
    Closure,
    EnvValue,
    VectorValue,
    value_type,
)
from ..store import resolve_path
from ..typerep import (
    ANY,
    BOOL,
    ENV,
    INT,
    NULL,
    REAL,
    SET,
    STRING,
    TYPEREP,
    AnyType,
    BoolType,
    EnvType,
    IntType,
    NullType,
    ProcType,
    RealType,
    SetType,
    StringType,
    StructureType,
    TypeRep,
    TypeRepType,
    VariantType,
    VectorType,
    canonical_key,
    equal_type,
    write_type,
)

# Elements view of a vector, reached from the "all elements" menu entry.
VECTOR_ELEMENTS_REP = VariantType((("vector-elements", NULL),))

_MARKER_TAGS = {
    canonical_key(HYPER_SOURCE_REP): "hyperSource",
    canonical_key(GENERATOR_REP): "generator",
    canonical_key(GENERATOR_SOURCE_REP): "generatorSource",
    canonical_key(COMPARISON_REP): "comparison",
    canonical_key(VECTOR_ELEMENTS_REP): "vectorElements",
}


class BrowserError(Exception):
    pass


# display models


@dataclass
class Entry:
    label: str
    selectable: bool
    target: int | None = None

    def to_json(self):
        return {"label": self.label, "selectable": self.selectable,
                "target": self.target}


@dataclass
class ScalarText:
    text: str
    kind: str = "scalarText"

    def to_json(self):
        return {"kind": self.kind, "text": self.text}


@dataclass
class Menu:
    title: str
    entries: list[Entry] = field(default_factory=list)
    kind: str = "menu"

    def to_json(self):
        return {"kind": self.kind, "title": self.title,
                "entries": [e.to_json() for e in self.entries]}


@dataclass
class ProcMenu:
    entries: list[Entry]
    kind: str = "procMenu"

    def to_json(self):
        return {"kind": self.kind,
                "entries": [e.to_json() for e in self.entries]}


@dataclass
class VectorMenu:
    lwb: int
    upb: int
    entries: list[Entry]
    kind: str = "vectorMenu"

    def to_json(self):
        return {"kind": self.kind, "lwb": self.lwb, "upb": self.upb,
                "entries": [e.to_json() for e in self.entries]}


def _scalar_text(t, v) -> str:
    if isinstance(t, BoolType):
        return "true" if v else "false"
    if isinstance(t, NullType):
        return "nil"
    if isinstance(t, StringType):
        return v
    return str(v)


def _sorted_fields(t):
    return sorted(t.fields, key=lambda nt: nt[0])


def _sorted_branches(t):
    return sorted(t.branches, key=lambda nt: nt[0])


# the direct path


def describe_value(kernel, box: AnyValue):
    """Display model for a boxed value, built by host introspection."""
    t, v = box.type_rep, box.value
    tag = _MARKER_TAGS.get(canonical_key(t)) if isinstance(t, VariantType) else None
    if tag == "hyperSource":
        return ScalarText(v.code)
    if tag == "generatorSource":
        return ScalarText(v.source.code)
    if tag == "generator":
        return ScalarText("a generator")
    if tag == "comparison":
        return ScalarText("a comparison")
    if tag == "vectorElements":
        return _elements_menu(kernel, v)
    if isinstance(t, (IntType, RealType, BoolType, StringType, NullType)):
        return ScalarText(_scalar_text(t, v))
    if isinstance(t, TypeRepType):
        return ScalarText(write_type(v))
    if isinstance(t, StructureType):
        entries = [Entry(f"{n} : {write_type(ft)}", True,
                         _target(kernel, AnyValue(ft, v.get(n))))
                   for n, ft in _sorted_fields(t)]
        return Menu("structure", entries)
    if isinstance(t, VariantType):
        entries = []
        for n, bt in _sorted_branches(t):
            present = v.branch == n
            target = _target(kernel, AnyValue(bt, v.payload)) if present else None
            entries.append(Entry(f"{n} : {write_type(bt)}", present, target))
        return Menu("variant", entries)
    if isinstance(t, VectorType):
        return vector_model(kernel, box)
    if isinstance(t, EnvType):
        return _env_menu(kernel, v)
    if isinstance(t, SetType):
        elem_t = v.elem_type
        entries = [Entry(f"element {i + 1} : {write_type(elem_t)}", True,
                         _target(kernel, AnyValue(elem_t, e)))
                   for i, e in enumerate(v.elems)]
        return Menu("set", entries)
    if isinstance(t, AnyType):
        inner = v
        return Menu("any", [Entry(f"contents : {write_type(inner.type_rep)}",
                                  True, _target(kernel, inner))])
    if isinstance(t, ProcType):
        has_source = isinstance(v, Closure) and v.source is not None
        return ProcMenu([Entry("source", has_source,
                               kernel.image.id_of(v) if has_source else None)])
    return ScalarText(f"a value of {write_type(t)}")


def _target(kernel, child_box) -> int:
    return kernel.image.id_of(child_box)


def _env_menu(kernel, env: EnvValue):
    entries = []
    for name in env.names():
        b = env.lookup(name)
        entries.append(Entry(f"{name} : {write_type(b.type_rep)}", True,
                             _target(kernel, AnyValue(b.type_rep, b.cell.value))))
    return Menu("env", entries)


def _elements_menu(kernel, v: VectorValue):
    elem_t = v.type_rep.elem
    entries = [Entry(f"element {i} : {write_type(elem_t)}", True,
                     _target(kernel, AnyValue(elem_t, v.cell_at(i).value)))
               for i in range(v.lwb, v.upb + 1)]
    return Menu("elements", entries)


def vector_model(kernel, box: AnyValue):
    v = box.value
    entries = [
        Entry("bounds", True,
              _target(kernel, AnyValue(STRING, f"{v.lwb} to {v.upb}"))),
        Entry("element...", False, None),
        Entry("all elements", True,
              _target(kernel, AnyValue(VECTOR_ELEMENTS_REP, v))),
        Entry("type", True, _target(kernel, AnyValue(TYPEREP, box.type_rep))),
    ]
    return VectorMenu(v.lwb, v.upb, entries)


def describe_object(kernel, ref):
    """Display model for an object id or a store path."""
    if isinstance(ref, int):
        obj = kernel.image.lookup(ref)
        if obj is None:
            raise BrowserError(f"unknown object: {ref}")
        box = obj if isinstance(obj, AnyValue) else AnyValue(value_type(obj), obj)
        return describe_value(kernel, box)
    binding = resolve_path(kernel.image, ref, want="value")
    return describe_value(kernel, AnyValue(binding.type_rep, binding.value))


# the reflective path


def _writable_name(name: str) -> bool:
    return (bool(name) and name[0].isalpha() and name.isalnum()
            and name not in KEYWORDS)


def _writable_type(t: TypeRep) -> bool:
    if isinstance(t, StructureType):
        return all(_writable_name(n) and _writable_type(ft) for n, ft in t.fields)
    if isinstance(t, VariantType):
        return all(_writable_name(n) and _writable_type(bt) for n, bt in t.branches)
    if isinstance(t, VectorType):
        return _writable_type(t.elem)
    if isinstance(t, ProcType):
        ok = all(_writable_type(p) for p in t.params)
        return ok and (t.result is None or _writable_type(t.result))
    return True


_DEAD_ACTION = "proc() begin end"
_DEFAULT_ARM = 'default : writeString( "unexpected display subject" )'


def _entry_text(label: str, live: bool, action: str) -> str:
    live_text = "true" if live else "false"
    return f'struct( label = "{label}" ; live = {live_text} ; action = {action} )'


def _structure_display_source(t: StructureType) -> str:
    entries = []
    for n, ft in _sorted_fields(t):
        action = f"proc() ; browser( any( x( {n} ) ) )"
        entries.append(_entry_text(f"{n} : {write_type(ft)}", True, action))
    body = ",\n".join(entries)
    return (f"proc( subject : any ) ;\n"
            f"project subject as x onto\n"
            f"{write_type(t)} :\n"
            f'menu( "structure", @1 of [\n{body}\n] )\n'
            f"{_DEFAULT_ARM}")


def _variant_display_source(t: VariantType) -> str:
    branches = _sorted_branches(t)
    arms = []
    for present, _ in branches:
        entries = []
        for n, bt in branches:
            if n == present:
                entries.append(_entry_text(f"{n} : {write_type(bt)}", True,
                                           "proc() ; browser( any( y ) )"))
            else:
                entries.append(_entry_text(f"{n} : {write_type(bt)}", False,
                                           _DEAD_ACTION))
        body = ",\n".join(entries)
        arms.append(f'{present} :\nmenu( "variant", @1 of [\n{body}\n] )')
    arm_text = "\n".join(arms)
    return (f"proc( subject : any ) ;\n"
            f"project subject as x onto\n"
            f"{write_type(t)} :\n"
            f"project x as y onto\n"
            f"{arm_text}\n"
            f"{_DEFAULT_ARM}\n"
            f"{_DEFAULT_ARM}")


def _vector_display_source(t: VectorType) -> str:
    return (f"proc( subject : any ) ;\n"
            f"project subject as x onto\n"
            f"{write_type(t)} : vectorMenu( subject )\n"
            f"{_DEFAULT_ARM}")


def display_proc_for(kernel, t: TypeRep):
    """Display procedure for a type, compiled once per equivalence class."""
    kernel.std_table
    cached = kernel.image.cached_display(t)
    if cached is not None:
        return cached
    direct = kernel.builtins["display:direct"]
    generative = isinstance(t, (StructureType, VariantType, VectorType))
    degenerate = (isinstance(t, StructureType) and not t.fields) or (
        isinstance(t, VariantType) and not t.branches)
    if not generative or degenerate or not _writable_type(t):
        kernel.image.cache_display(t, direct)
        return direct
    if isinstance(t, StructureType):
        text = _structure_display_source(t)
    elif isinstance(t, VariantType):
        text = _variant_display_source(t)
    else:
        text = _vector_display_source(t)
    box = kernel.compile_string(text)
    if is_error_box(box):
        raise BrowserError(f"display generation failed: {box.value}")
    kernel.display_compiles += 1
    closure = kernel.run_box(box)
    kernel.image.cache_display(t, closure)
    return closure


def display_value(kernel, box: AnyValue):
    """Display model via the reflective path."""
    proc = display_proc_for(kernel, box.type_rep)
    kernel._collectors.append([])
    try:
        kernel.call(proc, [box])
    finally:
        items = kernel._collectors.pop()
    for tag, payload in items:
        if tag == "model":
            return payload
    raise BrowserError("display procedure produced no model")


def seed_display_cache(kernel):
    """Preload display procedures that need no generated code."""
    direct = kernel.builtins["display:direct"]
    for t in (INT, REAL, BOOL, STRING, NULL, ANY, ENV, TYPEREP, SET,
              StructureType(())):
        if kernel.image.cached_display(t) is None:
            kernel.image.cache_display(t, direct)


# builtins used by generated display code

ENTRY_REC = StructureType((("label", STRING), ("live", BOOL),
                           ("action", ProcType((), None))))


def _emit(kernel, item):
    if kernel._collectors:
        kernel._collectors[-1].append(item)
        return True
    return False


def build_display_builtins(kernel) -> dict:
    def browser_fn(box):
        if not isinstance(box, AnyValue):
            raise_fault("browser needs an any value")
        if not _emit(kernel, ("child", box)):
            kernel.interp.write(render_text(describe_value(kernel, box)) + "\n")

    def menu_fn(title, entries_vec):
        entries = []
        for cell in entries_vec.cells:
            rec = cell.value
            label, live, action = rec.get("label"), rec.get("live"), rec.get("action")
            target = None
            if live:
                kernel._collectors.append([])
                try:
                    kernel.call(action, [])
                finally:
                    items = kernel._collectors.pop()
                for tag, payload in items:
                    if tag == "child":
                        target = kernel.image.id_of(payload)
                        break
            entries.append(Entry(label, bool(live), target))
        model = Menu(title, entries)
        if not _emit(kernel, ("model", model)):
            kernel.interp.write(render_text(model) + "\n")

    def vector_menu_fn(box):
        if not isinstance(box, AnyValue) or not isinstance(box.value, VectorValue):
            raise_fault("vectorMenu needs a boxed vector")
        model = vector_model(kernel, box)
        if not _emit(kernel, ("model", model)):
            kernel.interp.write(render_text(model) + "\n")

    def direct_fn(box):
        model = describe_value(kernel, box)
        if not _emit(kernel, ("model", model)):
            kernel.interp.write(render_text(model) + "\n")

    return {
        "browser": BuiltinClosure("browser", ProcType((ANY,), None), browser_fn),
        "menu": BuiltinClosure("menu", ProcType((STRING, VectorType(ENTRY_REC)), None),
                               menu_fn),
        "vectorMenu": BuiltinClosure("vectorMenu", ProcType((ANY,), None),
                                     vector_menu_fn),
        "display:direct": BuiltinClosure("display:direct", ProcType((ANY,), None),
                                         direct_fn),
    }


def raise_fault(message):
    from ..lang.interp import RuntimeFault

    raise RuntimeFault(message)


# agreement and rendering


def _boxes_agree(kernel, a_id, b_id) -> bool:
    if a_id is None or b_id is None:
        return a_id == b_id
    a, b = kernel.image.lookup(a_id), kernel.image.lookup(b_id)
    if isinstance(a, AnyValue) and isinstance(b, AnyValue):
        if not equal_type(a.type_rep, b.type_rep):
            return False
        if a.value is b.value:
            return True
        scalar = (int, float, bool, str)
        if isinstance(a.value, scalar) and isinstance(b.value, scalar):
            return a.value == b.value
        if a.value is NIL and b.value is NIL:
            return True
        if isinstance(a.value, TypeRep) and isinstance(b.value, TypeRep):
            return equal_type(a.value, b.value)
        return False
    return a is b


def models_agree(kernel, a, b) -> bool:
    """Same shape, labels, selectability; targets resolve to the same value."""
    if type(a) is not type(b):
        return False
    if isinstance(a, ScalarText):
        return a.text == b.text
    if isinstance(a, Menu) and a.title != b.title:
        return False
    if isinstance(a, VectorMenu) and (a.lwb, a.upb) != (b.lwb, b.upb):
        return False
    if len(a.entries) != len(b.entries):
        return False
    for ea, eb in zip(a.entries, b.entries):
        if ea.label != eb.label or ea.selectable != eb.selectable:
            return False
        if not _boxes_agree(kernel, ea.target, eb.target):
            return False
    return True


def render_text(model, indent: str = "") -> str:
    """Plain-text rendering used by the command line."""
    if isinstance(model, ScalarText):
        return indent + model.text
    if isinstance(model, ProcMenu):
        lines = [indent + "procedure"]
        for e in model.entries:
            mark = "*" if e.selectable else " "
            lines.append(f"{indent}  [{mark}] {e.label}")
        return "\n".join(lines)
    if isinstance(model, VectorMenu):
        lines = [f"{indent}vector @{model.lwb}..{model.upb}"]
    else:
        lines = [indent + model.title]
    for e in model.entries:
        mark = "*" if e.selectable else " "
        lines.append(f"{indent}  [{mark}] {e.label}")
    return "\n".join(lines)
