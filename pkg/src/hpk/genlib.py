"""Support library for program generators.

Host-level sets with explicit comparisons, name/type and name/value field
records, and the composition operators that assemble source fragments.
Sets are functional: every operation returns a new set, and element order
is insertion order, which keeps generated text deterministic.

Equality predicates may be language-level procedure values or named host
predicates from COMPARISON_REGISTRY; named ones survive the store.
"""

from __future__ import annotations

from .hyperprog import (
    HyperSource,
    compare_hyper_source,
    concat_all,
    mk_hyper_source,
)
from .lang.interp import Interpreter, RuntimeFault
from .lang.values import AnyValue, StructureValue
from .typerep import (
    ANY,
    NULL,
    STRING,
    NAME_AND_TYPE,
    StructureType,
    TypeRep,
    VariantType,
    equal_type,
    get_structure_fields,
)


class LibError(Exception):
    pass


# Predicates that come from the host rather than from compiled code.
# Registered by name so comparisons using them can be stored.


def _eq_hyper_source(a, b):
    av = a.value if isinstance(a, AnyValue) else a
    bv = b.value if isinstance(b, AnyValue) else b
    return compare_hyper_source(av, bv)


def _eq_name_and_type(a, b):
    return (a.get("name") == b.get("name")
            and equal_type(a.get("typeRep"), b.get("typeRep")))


def _eq_name(a, b):
    return a.get("name") == b.get("name")


COMPARISON_REGISTRY = {
    "hyperSource": (_eq_hyper_source, None),
    "nameAndType": (_eq_name_and_type, None),
    "fieldName": (_eq_name, None),
    "intValue": (lambda a, b: a == b, lambda a, b: a < b),
    "stringValue": (lambda a, b: a == b, lambda a, b: a < b),
}

# Comparisons call language-level predicates through a private evaluator;
# predicates must not perform input or output.
_PRED = Interpreter()


class Comparison:
    """Equality (and optionally ordering) over one element type."""

    __slots__ = ("ordered", "name", "eq_value", "lt_value")

    def __init__(self, ordered=False, *, name=None, eq_value=None, lt_value=None):
        if name is not None and name not in COMPARISON_REGISTRY:
            raise LibError(f"unknown comparison: {name}")
        if name is None and eq_value is None:
            raise LibError("comparison needs a predicate")
        self.ordered = ordered
        self.name = name
        self.eq_value = eq_value
        self.lt_value = lt_value

    def equal(self, a, b) -> bool:
        if self.name is not None:
            return bool(COMPARISON_REGISTRY[self.name][0](a, b))
        return bool(_PRED.call(self.eq_value, [a, b]))

    def less(self, a, b) -> bool:
        if not self.ordered:
            raise LibError("comparison is unordered")
        if self.name is not None:
            lt = COMPARISON_REGISTRY[self.name][1]
            if lt is None:
                raise LibError("comparison is unordered")
            return bool(lt(a, b))
        if self.lt_value is None:
            raise LibError("comparison is unordered")
        return bool(_PRED.call(self.lt_value, [a, b]))


class SetValue:
    """A set over one element type, ordered by insertion."""

    __slots__ = ("elem_type", "comparison", "elems")

    def __init__(self, elem_type: TypeRep, comparison: Comparison, elems=()):
        self.elem_type = elem_type
        self.comparison = comparison
        self.elems = list(elems)

    def __repr__(self):
        return f"<set of {len(self.elems)}>"


def empty_set(elem_type: TypeRep, comparison: Comparison) -> SetValue:
    return SetValue(elem_type, comparison)


def member(s: SetValue, v) -> bool:
    return any(s.comparison.equal(e, v) for e in s.elems)


def insert(s: SetValue, v) -> SetValue:
    if member(s, v):
        return s
    return SetValue(s.elem_type, s.comparison, s.elems + [v])


def union(a: SetValue, b: SetValue) -> SetValue:
    out = a
    for e in b.elems:
        out = insert(out, e)
    return out


def intersection(a: SetValue, b: SetValue) -> SetValue:
    out = SetValue(a.elem_type, a.comparison)
    for e in a.elems:
        if member(b, e):
            out = insert(out, e)
    return out


def difference(a: SetValue, b: SetValue) -> SetValue:
    out = SetValue(a.elem_type, a.comparison)
    for e in a.elems:
        if not member(b, e):
            out = insert(out, e)
    return out


def delete(s: SetValue, v) -> SetValue:
    return SetValue(s.elem_type, s.comparison,
                    [e for e in s.elems if not s.comparison.equal(e, v)])


def choose(s: SetValue):
    if not s.elems:
        raise LibError("choose on an empty set")
    return s.elems[0]


def rest(s: SetValue) -> SetValue:
    if not s.elems:
        raise LibError("rest on an empty set")
    return SetValue(s.elem_type, s.comparison, s.elems[1:])


def includes(a: SetValue, b: SetValue) -> bool:
    return all(member(a, e) for e in b.elems)


def set_size(s: SetValue) -> int:
    return len(s.elems)


def map_set(s: SetValue, fn, elem_type: TypeRep, comparison: Comparison) -> SetValue:
    out = SetValue(elem_type, comparison)
    for e in s.elems:
        out = insert(out, fn(e))
    return out


def iterate(s: SetValue, visit) -> None:
    """Apply visit to each element until it answers false."""
    for e in s.elems:
        if not visit(e):
            break


# Field records.  name/type pairs use the shared NAME_AND_TYPE structure;
# name/value pairs carry a source fragment in an any-box.

NAME_AND_VALUE = StructureType((("name", STRING), ("value", ANY)))


def name_and_type(name: str, type_rep: TypeRep) -> StructureValue:
    return StructureValue(NAME_AND_TYPE, [name, type_rep])


def name_and_value(name: str, value_box) -> StructureValue:
    return StructureValue(NAME_AND_VALUE, [name, value_box])


def structure_fields_set(t: TypeRep) -> SetValue:
    """The declared fields of a structure type, in declaration order."""
    elems = [name_and_type(f.name, f.type_rep) for f in get_structure_fields(t)]
    return SetValue(NAME_AND_TYPE, Comparison(name="nameAndType"), elems)


def hyper_source_set(elems=()) -> SetValue:
    from .hyperprog import HYPER_SOURCE_REP

    return SetValue(HYPER_SOURCE_REP, Comparison(name="hyperSource"), list(elems))


# Fragment composition.


def _as_fragment(e) -> HyperSource:
    if isinstance(e, HyperSource):
        return e
    if isinstance(e, AnyValue) and isinstance(e.value, HyperSource):
        return e.value
    raise LibError("set element is not a source fragment")


def and_compose(s: SetValue) -> HyperSource:
    """( e1 ) and ( e2 ) and ... and true; plain true when empty."""
    parts = []
    for e in s.elems:
        parts.extend(["( ", _as_fragment(e), " ) and "])
    parts.append("true")
    return concat_all(parts)


def or_compose(s: SetValue) -> HyperSource:
    """( e1 ) or ( e2 ) or ... or false; plain false when empty."""
    parts = []
    for e in s.elems:
        parts.extend(["( ", _as_fragment(e), " ) or "])
    parts.append("false")
    return concat_all(parts)


def mk_struct(s: SetValue) -> HyperSource:
    """struct( n1 = v1 ; n2 = v2 ; ... ) from name/value records."""
    if not s.elems:
        return mk_hyper_source("struct( )")
    seen = set()
    parts = ["struct( "]
    for i, e in enumerate(s.elems):
        if not isinstance(e, StructureValue) or "name" not in e.cells:
            raise LibError("mkStruct needs name and value records")
        name = e.get("name")
        if name in seen:
            raise LibError(f"duplicate field: {name}")
        seen.add(name)
        if i:
            parts.append(" ; ")
        parts.extend([name, " = ", _as_fragment(e.get("value"))])
    parts.append(" )")
    return concat_all(parts)


def mk_structure_type_from_set(s: SetValue) -> TypeRep:
    from .typerep import NameAndType, mk_structure_type

    fields = []
    for e in s.elems:
        if not isinstance(e, StructureValue) or "name" not in e.cells:
            raise LibError("mkStructureType needs name and type records")
        fields.append(NameAndType(e.get("name"), e.get("typeRep")))
    return mk_structure_type(fields)


# Marker type for comparisons crossing into the language in any-boxes.
COMPARISON_REP = VariantType((("comparison-value", NULL),))


def box_comparison(cmp: Comparison) -> AnyValue:
    return AnyValue(COMPARISON_REP, cmp)


def unbox_comparison(box) -> Comparison:
    if isinstance(box, AnyValue) and isinstance(box.value, Comparison):
        return box.value
    if isinstance(box, Comparison):
        return box
    raise RuntimeFault("expected a comparison value")
