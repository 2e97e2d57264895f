"""Runtime values and frames.

Scalars are carried as native Python values (int, float, bool, str); every
compound value is a class here.  Mutable storage always goes through Cell
so that locations have identity: two references to one location are two
references to one Cell object, which is what referential integrity and the
shared-location tests rely on.
"""

from __future__ import annotations

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
    ProcType,
    TypeRep,
)


class NullValue:
    """The single value of type null."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "nil"


NIL = NullValue()


class VoidValue:
    """Distinguished result of value-less evaluation; not a storable value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "void"


VOID = VoidValue()


class Cell:
    """One mutable location.

    owner marks cells that implement environment bindings so that frame
    slots aliasing them (use-clause bindings) can be recognised, e.g. when
    a store image is written out.
    """

    __slots__ = ("value", "owner")

    def __init__(self, value, owner=None):
        self.value = value
        self.owner = owner

    def __repr__(self):
        return f"Cell({self.value!r})"


class EnvBinding:
    __slots__ = ("cell", "type_rep", "mutable")

    def __init__(self, cell, type_rep, mutable):
        self.cell = cell
        self.type_rep = type_rep
        self.mutable = mutable


class EnvValue:
    """A mutable, extensible collection of named, typed locations."""

    def __init__(self):
        self.bindings: dict[str, EnvBinding] = {}

    def define(self, name, value, type_rep, mutable=True, *, redefine=False):
        """Add a binding.  Redefinition replaces the location (new Cell);

        existing location handles keep the old cell.  Only host callers may
        pass redefine=True; the language itself refuses duplicate names.
        """
        if name in self.bindings and not redefine:
            raise KeyError(f"already bound: {name}")
        cell = Cell(value, owner=("env", self, name))
        self.bindings[name] = EnvBinding(cell, type_rep, mutable)
        return cell

    def lookup(self, name):
        return self.bindings.get(name)

    def drop(self, name):
        if name not in self.bindings:
            raise KeyError(f"absent: {name}")
        del self.bindings[name]

    def names(self):
        return list(self.bindings.keys())

    def __repr__(self):
        return f"<env {list(self.bindings.keys())}>"


class StructureValue:
    """Structure instance: a TypeRep plus one mutable cell per field."""

    __slots__ = ("type_rep", "cells")

    def __init__(self, type_rep, values):
        self.type_rep = type_rep
        self.cells = {n: Cell(v) for (n, _), v in zip(type_rep.fields, values)}

    def get(self, field):
        return self.cells[field].value

    def set(self, field, value):
        self.cells[field].value = value

    def __repr__(self):
        inner = " ; ".join(f"{n} = {c.value!r}" for n, c in self.cells.items())
        return f"struct( {inner} )"


class VariantValue:
    __slots__ = ("type_rep", "branch", "payload")

    def __init__(self, type_rep, branch, payload):
        self.type_rep = type_rep
        self.branch = branch
        self.payload = payload

    def __repr__(self):
        return f"variant {self.branch}({self.payload!r})"


class VectorValue:
    """Vector instance with an explicit lower bound."""

    __slots__ = ("type_rep", "lwb", "cells")

    def __init__(self, type_rep, lwb, values):
        self.type_rep = type_rep
        self.lwb = lwb
        self.cells = [Cell(v) for v in values]

    @property
    def upb(self):
        return self.lwb + len(self.cells) - 1

    def cell_at(self, index):
        """Cell for a 1-based-style bounded index; None when out of bounds."""
        i = index - self.lwb
        if 0 <= i < len(self.cells):
            return self.cells[i]
        return None

    def __repr__(self):
        return f"@{self.lwb} of {[c.value for c in self.cells]!r}"


class AnyValue:
    """An any-box: a TypeRep together with the value it classifies."""

    __slots__ = ("type_rep", "value")

    def __init__(self, type_rep, value):
        self.type_rep = type_rep
        self.value = value

    def __repr__(self):
        return f"any[{self.type_rep!r}]({self.value!r})"


class Closure:
    """A compiled procedure value.

    body is the typed AST of the literal; frame is the frame active at the
    literal's evaluation (the static link for calls); source is the attached
    hyper-program representation, already resolved against live frames.
    """

    __slots__ = ("proc_type", "body", "frame", "source")

    def __init__(self, proc_type, body, frame, source=None):
        self.proc_type = proc_type
        self.body = body
        self.frame = frame
        self.source = source

    def __repr__(self):
        return f"<closure {self.proc_type!r}>"


class BuiltinClosure:
    """A host-provided procedure value; carries no source."""

    __slots__ = ("name", "proc_type", "fn")

    def __init__(self, name, proc_type, fn):
        self.name = name
        self.proc_type = proc_type
        self.fn = fn

    def __repr__(self):
        return f"<builtin {self.name}>"


class HostClosure(BuiltinClosure):
    """Like BuiltinClosure but anonymous and never serialisable.

    Used for procedure values manufactured at run time by host code, such
    as generator preludes built outside the language.
    """

    def __init__(self, proc_type, fn, name="host"):
        super().__init__(name, proc_type, fn)


class Frame:
    """Activation record: fixed slots plus the static link."""

    __slots__ = ("lex_level", "slots", "static_link")

    def __init__(self, lex_level, size, static_link):
        self.lex_level = lex_level
        self.slots = [Cell(VOID) for _ in range(size)]
        self.static_link = static_link

    def at_level(self, level):
        fr = self
        while fr is not None and fr.lex_level != level:
            fr = fr.static_link
        if fr is None:
            raise RuntimeError(f"no frame at lexical level {level}")
        return fr


class LocationValue:
    """Opaque handle on one location, for browsing and path resolution."""

    __slots__ = ("cell", "type_rep", "label")

    def __init__(self, cell, type_rep, label=""):
        self.cell = cell
        self.type_rep = type_rep
        self.label = label


def value_type(v) -> TypeRep:
    """TypeRep classifying a runtime value."""
    if isinstance(v, bool):
        return BOOL
    if isinstance(v, int):
        return INT
    if isinstance(v, float):
        return REAL
    if isinstance(v, str):
        return STRING
    if v is NIL:
        return NULL
    if isinstance(v, (StructureValue, VariantValue, VectorValue)):
        return v.type_rep
    if isinstance(v, AnyValue):
        return ANY
    if isinstance(v, (Closure, BuiltinClosure)):
        return v.proc_type
    if isinstance(v, EnvValue):
        return ENV
    if isinstance(v, TypeRep):
        return TYPEREP
    from ..genlib import SetValue

    if isinstance(v, SetValue):
        return SET
    raise TypeError(f"not a runtime value: {v!r}")


def is_callable_value(v):
    return isinstance(v, (Closure, BuiltinClosure))


def wrap_any(v) -> AnyValue:
    """Inject a value into any, recording its type."""
    return AnyValue(value_type(v), v)


WRAP64 = 1 << 64
SIGN64 = 1 << 63


def wrap_int(n: int) -> int:
    """Wrap to 64-bit two's complement."""
    n &= WRAP64 - 1
    return n - WRAP64 if n >= SIGN64 else n
