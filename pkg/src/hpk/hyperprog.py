"""Hyper-program sources: program text with embedded links to store objects.

A HyperSource is immutable program text plus an ordered set of substitutions,
each mapping a disjoint code region to a binding.  Regions are 1-based and
inclusive at both ends, counted in Unicode scalar values.  All operations
return new HyperSource values; nothing here mutates its inputs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .typerep import NULL, TypeRep, VariantType, equal_type, write_type
from .lang.values import (
    AnyValue,
    BuiltinClosure,
    EnvValue,
    StructureValue,
    VectorValue,
    value_type,
)


class LinkError(Exception):
    """A source operation would break or dangle a link."""


@dataclass(frozen=True, slots=True)
class Region:
    """1-based inclusive span of Unicode scalars in a code text."""

    start: int
    finish: int

    def __post_init__(self):
        if self.start < 1 or self.finish < self.start:
            raise ValueError(f"bad region {self.start}..{self.finish}")

    def __len__(self):
        return self.finish - self.start + 1

    def shift(self, delta):
        return Region(self.start + delta, self.finish + delta)

    def contains(self, other: "Region"):
        return self.start <= other.start and other.finish <= self.finish

    def overlaps(self, other: "Region"):
        return self.start <= other.finish and other.start <= self.finish


class Binding:
    """Base of the link binding variants."""

    __slots__ = ()


class ValueBinding(Binding):
    """Link to a value, carried with its classifying type."""

    __slots__ = ("type_rep", "value")

    def __init__(self, type_rep, value):
        self.type_rep = type_rep
        self.value = value

    def __repr__(self):
        return f"value:{write_type(self.type_rep)}"


class EnvLocBinding(Binding):
    """Link to a named location in an environment."""

    __slots__ = ("env", "name", "type_rep")

    def __init__(self, env, name, type_rep):
        self.env = env
        self.name = name
        self.type_rep = type_rep

    def __repr__(self):
        return f"envloc:{self.name}"


class StructLocBinding(Binding):
    """Link to one field location of a structure instance."""

    __slots__ = ("container", "field")

    def __init__(self, container, field):
        self.container = container
        self.field = field

    def __repr__(self):
        return f"structloc:{self.field}"


class VecLocBinding(Binding):
    """Link to one element location of a vector instance."""

    __slots__ = ("container", "index")

    def __init__(self, container, index):
        self.container = container
        self.index = index

    def __repr__(self):
        return f"vecloc:{self.index}"


class FrameLocBinding(Binding):
    """Link to a slot of a live activation frame.

    is_env_loc marks slots that themselves alias an environment location
    (introduced by a use clause).  mutable is host-side metadata used when
    the link is recompiled.
    """

    __slots__ = ("frame", "slot", "type_rep", "is_env_loc", "mutable")

    def __init__(self, frame, slot, type_rep, is_env_loc, mutable=True):
        self.frame = frame
        self.slot = slot
        self.type_rep = type_rep
        self.is_env_loc = is_env_loc
        self.mutable = mutable

    def __repr__(self):
        return f"frameloc:{self.slot}@{self.frame.lex_level}"


class TypeBinding(Binding):
    """Link to a type representation used in a type position."""

    __slots__ = ("type_rep",)

    def __init__(self, type_rep):
        self.type_rep = type_rep

    def __repr__(self):
        return f"type:{write_type(self.type_rep)}"


def binding_write_type(b: Binding) -> TypeRep:
    """The type a link occurrence denotes in code."""
    if isinstance(b, ValueBinding):
        return b.type_rep
    if isinstance(b, EnvLocBinding):
        return b.type_rep
    if isinstance(b, StructLocBinding):
        return b.container.type_rep.field_type(b.field)
    if isinstance(b, VecLocBinding):
        return b.container.type_rep.elem
    if isinstance(b, FrameLocBinding):
        return b.type_rep
    if isinstance(b, TypeBinding):
        return b.type_rep
    raise TypeError(f"not a binding: {b!r}")


def _values_equal(a, b):
    if isinstance(a, (bool, int, float, str)) or isinstance(b, (bool, int, float, str)):
        return type(a) is type(b) and a == b
    return a is b


def bindings_equal(a: Binding, b: Binding) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, ValueBinding):
        return equal_type(a.type_rep, b.type_rep) and _values_equal(a.value, b.value)
    if isinstance(a, EnvLocBinding):
        return a.env is b.env and a.name == b.name
    if isinstance(a, StructLocBinding):
        return a.container is b.container and a.field == b.field
    if isinstance(a, VecLocBinding):
        return a.container is b.container and a.index == b.index
    if isinstance(a, FrameLocBinding):
        return a.frame is b.frame and a.slot == b.slot
    if isinstance(a, TypeBinding):
        return equal_type(a.type_rep, b.type_rep)
    return False


class HyperSource:
    """Immutable code text with substitutions (region, binding), kept

    sorted by region start and pairwise disjoint.
    """

    __slots__ = ("code", "substitutions")

    def __init__(self, code: str, substitutions=()):
        subs = sorted(substitutions, key=lambda rb: rb[0].start)
        last = 0
        for region, binding in subs:
            if region.start <= last:
                raise ValueError("overlapping link regions")
            if region.finish > len(code):
                raise ValueError("link region outside code text")
            if not isinstance(binding, Binding):
                raise TypeError(f"not a binding: {binding!r}")
            last = region.finish
        self.code = code
        self.substitutions = tuple(subs)

    def __repr__(self):
        return f"<hypersource {len(self.code)} chars, {len(self.substitutions)} links>"


def mk_hyper_source(text: str) -> HyperSource:
    return HyperSource(text)


def concat_hyper_source(a: HyperSource, b: HyperSource) -> HyperSource:
    delta = len(a.code)
    subs = list(a.substitutions)
    subs.extend((r.shift(delta), binding) for r, binding in b.substitutions)
    return HyperSource(a.code + b.code, subs)


def concat_all(parts) -> HyperSource:
    out = mk_hyper_source("")
    for p in parts:
        if isinstance(p, str):
            p = mk_hyper_source(p)
        out = concat_hyper_source(out, p)
    return out


def extract_hyper_source(hs: HyperSource, start: int, finish: int) -> HyperSource:
    """Sub-source between and including the given offsets.

    Links wholly inside come along, re-based; a link crossing either edge
    is an error.
    """
    if start < 1 or finish > len(hs.code) or finish < start:
        raise LinkError(f"extract range {start}..{finish} outside text")
    span = Region(start, finish)
    subs = []
    for region, binding in hs.substitutions:
        if span.contains(region):
            subs.append((region.shift(1 - start), binding))
        elif span.overlaps(region):
            raise LinkError("extract would split a link")
    return HyperSource(hs.code[start - 1 : finish], subs)


def substitute_region(hs: HyperSource, region: Region, replacement) -> HyperSource:
    """Replace a region with new source.

    Links wholly inside the replaced region are discarded with it; a link
    crossing the region's edge is an error.  Links in the replacement are
    carried in at their new offsets.
    """
    if isinstance(replacement, str):
        replacement = mk_hyper_source(replacement)
    if region.start < 1 or region.finish > len(hs.code):
        raise LinkError(f"substitute range {region.start}..{region.finish} outside text")
    delta = len(replacement.code) - len(region)
    subs = []
    for r, binding in hs.substitutions:
        if region.contains(r):
            continue
        if region.overlaps(r):
            raise LinkError("substitution would split a link")
        subs.append((r if r.finish < region.start else r.shift(delta), binding))
    subs.extend((r.shift(region.start - 1), b) for r, b in replacement.substitutions)
    code = hs.code[: region.start - 1] + replacement.code + hs.code[region.finish :]
    return HyperSource(code, subs)


def insert_source(hs: HyperSource, at: int, insertion) -> HyperSource:
    """Insert new source before offset `at` (1-based; len+1 appends)."""
    if isinstance(insertion, str):
        insertion = mk_hyper_source(insertion)
    if at < 1 or at > len(hs.code) + 1:
        raise LinkError(f"insert offset {at} outside text")
    delta = len(insertion.code)
    subs = []
    for r, binding in hs.substitutions:
        if r.finish < at:
            subs.append((r, binding))
        elif r.start >= at:
            subs.append((r.shift(delta), binding))
        else:
            raise LinkError("insertion would split a link")
    subs.extend((r.shift(at - 1), b) for r, b in insertion.substitutions)
    code = hs.code[: at - 1] + insertion.code + hs.code[at - 1 :]
    return HyperSource(code, subs)


def compare_hyper_source(a: HyperSource, b: HyperSource) -> bool:
    """Equality of text plus link-for-link equality of substitutions."""
    if a.code != b.code or len(a.substitutions) != len(b.substitutions):
        return False
    for (ra, ba), (rb, bb) in zip(a.substitutions, b.substitutions):
        if ra != rb or not bindings_equal(ba, bb):
            return False
    return True


# Link constructors.  Each returns a one-token HyperSource whose whole text
# is a single bound region; the token text is a placeholder label that the
# compiler form replaces, so it only matters for display.


def _whole(label: str, binding: Binding) -> HyperSource:
    if not label:
        label = "link"
    return HyperSource(label, [(Region(1, len(label)), binding)])


def mk_link(box: AnyValue, label: str = "") -> HyperSource:
    if not isinstance(box, AnyValue):
        box = AnyValue(value_type(box), box)
    if not label:
        if isinstance(box.value, BuiltinClosure):
            label = box.value.name
        else:
            label = "value"
    return _whole(label, ValueBinding(box.type_rep, box.value))


def mk_env_loc_link(env: EnvValue, name: str) -> HyperSource:
    binding = env.lookup(name)
    if binding is None:
        raise LinkError(f"absent binding: {name}")
    return _whole(name, EnvLocBinding(env, name, binding.type_rep))


def mk_struct_loc_link(box, field: str) -> HyperSource:
    container = box.value if isinstance(box, AnyValue) else box
    if not isinstance(container, StructureValue):
        raise LinkError("structure location needs a structure value")
    if field not in container.cells:
        raise LinkError(f"absent field: {field}")
    return _whole(field, StructLocBinding(container, field))


def mk_vec_loc_link(box, index: int) -> HyperSource:
    container = box.value if isinstance(box, AnyValue) else box
    if not isinstance(container, VectorValue):
        raise LinkError("vector location needs a vector value")
    if container.cell_at(index) is None:
        raise LinkError(f"index out of bounds: {index}")
    return _whole("element", VecLocBinding(container, index))


def mk_type_link(t: TypeRep, label: str = "type") -> HyperSource:
    if not isinstance(t, TypeRep):
        raise LinkError("type link needs a type representation")
    return _whole(label, TypeBinding(t))


# Compiler form: replace each linked region with a fresh identifier and
# describe what the identifier denotes in a symbol table.


class SymbolEntry:
    """What one external identifier denotes during compilation and after.

    kind is one of value, envloc, structloc, vecloc, frameloc, type.  The
    evaluator reads through the entry, so location entries hold live cells
    or containers, not copies.
    """

    __slots__ = ("name", "kind", "type_rep", "assignable", "value", "cell",
                 "container", "field", "index", "frame", "slot", "binding")

    def __init__(self, name, kind, type_rep, assignable=False, *, value=None,
                 cell=None, container=None, field=None, index=None,
                 frame=None, slot=None, binding=None):
        self.name = name
        self.kind = kind
        self.type_rep = type_rep
        self.assignable = assignable
        self.value = value
        self.cell = cell
        self.container = container
        self.field = field
        self.index = index
        self.frame = frame
        self.slot = slot
        self.binding = binding


class SymbolTable:
    """Name to SymbolEntry mapping with a lookup interface the checker uses."""

    def __init__(self, entries=None):
        self.entries = dict(entries or {})

    def lookup(self, name):
        return self.entries.get(name)

    def add(self, entry: SymbolEntry):
        self.entries[entry.name] = entry


def binding_to_entry(name: str, binding: Binding) -> SymbolEntry:
    if isinstance(binding, ValueBinding):
        return SymbolEntry(name, "value", binding.type_rep, False,
                           value=binding.value, binding=binding)
    if isinstance(binding, EnvLocBinding):
        live = binding.env.lookup(binding.name)
        if live is None:
            raise LinkError(f"absent binding: {binding.name}")
        if not equal_type(live.type_rep, binding.type_rep):
            raise LinkError(f"binding changed type: {binding.name}")
        return SymbolEntry(name, "envloc", binding.type_rep, live.mutable,
                           cell=live.cell, binding=binding)
    if isinstance(binding, StructLocBinding):
        return SymbolEntry(name, "structloc", binding.container.type_rep, False,
                           container=binding.container, field=binding.field,
                           binding=binding)
    if isinstance(binding, VecLocBinding):
        return SymbolEntry(name, "vecloc", binding.container.type_rep, False,
                           container=binding.container, index=binding.index,
                           binding=binding)
    if isinstance(binding, FrameLocBinding):
        return SymbolEntry(name, "frameloc", binding.type_rep, binding.mutable,
                           frame=binding.frame, slot=binding.slot, binding=binding)
    if isinstance(binding, TypeBinding):
        return SymbolEntry(name, "type", binding.type_rep, False, binding=binding)
    raise TypeError(f"not a binding: {binding!r}")


_UNIQUE_RE = re.compile(r"uniqueId\d+")


def to_compiler_form(hs: HyperSource):
    """Flatten to plain text for the compiler.

    Every linked region is replaced by a fresh identifier (uniqueIdN, the
    smallest N left to right not already occurring in the text); location
    links into structures and vectors also gain a dereference suffix so the
    emitted text denotes the location.  Returns (text, SymbolTable,
    region_map) where region_map pairs each original region with its span
    in the emitted text.
    """
    taken = set(_UNIQUE_RE.findall(hs.code))
    table = SymbolTable()
    pieces = []
    region_map = []
    pos = 1
    out_len = 0
    n = 0
    for region, binding in hs.substitutions:
        while f"uniqueId{n}" in taken:
            n += 1
        idn = f"uniqueId{n}"
        n += 1
        if isinstance(binding, StructLocBinding):
            emitted = f"{idn}( {binding.field} )"
        elif isinstance(binding, VecLocBinding):
            emitted = f"{idn}( {binding.index} )"
        else:
            emitted = idn
        table.add(binding_to_entry(idn, binding))
        before = hs.code[pos - 1 : region.start - 1]
        pieces.append(before)
        out_len += len(before)
        region_map.append((region, Region(out_len + 1, out_len + len(emitted))))
        pieces.append(emitted)
        out_len += len(emitted)
        pos = region.finish + 1
    pieces.append(hs.code[pos - 1 :])
    return "".join(pieces), table, region_map


def map_point_back(region_map, p: int, *, end: bool = False) -> int:
    """Translate an offset in compiler-form text to the original text.

    Points inside an emitted identifier clamp to the original region's
    matching edge.
    """
    delta = 0
    for orig, new in region_map:
        if p < new.start:
            break
        if p <= new.finish:
            return orig.finish if end else orig.start
        delta += len(orig) - len(new)
    return p + delta


# Marker type under which a HyperSource crosses into the language as an
# any-box.  The branch name cannot be written as an identifier, so user
# code can never project onto it.
HYPER_SOURCE_REP = VariantType((("hyper-source", NULL),))


def box_hyper_source(hs: HyperSource) -> AnyValue:
    return AnyValue(HYPER_SOURCE_REP, hs)


def unbox_hyper_source(box) -> HyperSource:
    if isinstance(box, AnyValue) and isinstance(box.value, HyperSource):
        return box.value
    if isinstance(box, HyperSource):
        return box
    raise LinkError("expected a source value")
