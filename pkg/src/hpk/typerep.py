"""Structural type representations.

TypeReps describe kernel-language types structurally.  They drive type
equivalence, run-time browsing, and code generation, and they are the
values of the language's own `typerep` type.  All representations are
immutable and freely shared.

Equivalence is order-insensitive for structure and variant fields: the
representation preserves the order the author wrote, but two permutations
of the same field set name the same type.  The built-in set type is a
single static type; element types live on set values, not on the type.
"""

from __future__ import annotations

from dataclasses import dataclass


class TypeRep:
    """Base class for all type representations."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class IntType(TypeRep):
    pass


@dataclass(frozen=True, slots=True)
class RealType(TypeRep):
    pass


@dataclass(frozen=True, slots=True)
class BoolType(TypeRep):
    pass


@dataclass(frozen=True, slots=True)
class StringType(TypeRep):
    pass


@dataclass(frozen=True, slots=True)
class NullType(TypeRep):
    pass


@dataclass(frozen=True, slots=True)
class AnyType(TypeRep):
    pass


@dataclass(frozen=True, slots=True)
class EnvType(TypeRep):
    pass


@dataclass(frozen=True, slots=True)
class TypeRepType(TypeRep):
    pass


INT = IntType()
REAL = RealType()
BOOL = BoolType()
STRING = StringType()
NULL = NullType()
ANY = AnyType()
ENV = EnvType()
TYPEREP = TypeRepType()


@dataclass(frozen=True, slots=True)
class SetType(TypeRep):
    """The built-in set type.

    The elem field is retained for completeness but every surface-level
    set type is set-of-any; equivalence ignores elem entirely.
    """

    elem: TypeRep = ANY


SET = SetType()


@dataclass(frozen=True, slots=True)
class VectorType(TypeRep):
    elem: TypeRep


@dataclass(frozen=True, slots=True)
class StructureType(TypeRep):
    fields: tuple[tuple[str, TypeRep], ...]

    def __post_init__(self):
        names = [n for n, _ in self.fields]
        if len(names) != len(set(names)):
            raise ValueError("duplicate field names in structure type")

    def field_type(self, name):
        for n, t in self.fields:
            if n == name:
                return t
        return None


@dataclass(frozen=True, slots=True)
class VariantType(TypeRep):
    branches: tuple[tuple[str, TypeRep], ...]

    def __post_init__(self):
        names = [n for n, _ in self.branches]
        if len(names) != len(set(names)):
            raise ValueError("duplicate branch names in variant type")

    def branch_type(self, name):
        for n, t in self.branches:
            if n == name:
                return t
        return None


@dataclass(frozen=True, slots=True)
class ProcType(TypeRep):
    params: tuple[TypeRep, ...]
    result: TypeRep | None


@dataclass(frozen=True, slots=True)
class NameAndType:
    """A (field name, type) pair, the element of field sets."""

    name: str
    type_rep: TypeRep

    def __post_init__(self):
        if not self.name:
            raise ValueError("empty field name")


NAME_AND_TYPE = StructureType((("name", STRING), ("typeRep", TYPEREP)))


class DuplicateFieldError(Exception):
    """Raised by mk_structure_type when field names collide."""


def equal_type(a: TypeRep, b: TypeRep) -> bool:
    """Structural equivalence, field-order-insensitive."""
    return canonical_key(a) == canonical_key(b)


def canonical_key(t: TypeRep):
    """Hashable canonical form; equal_type(a, b) iff keys are equal.

    Used as the cache key wherever behaviour must be uniform across an
    equivalence class (display procedures, type interning).
    """
    if isinstance(t, StructureType):
        return ("structure", tuple(sorted((n, canonical_key(ft)) for n, ft in t.fields)))
    if isinstance(t, VariantType):
        return ("variant", tuple(sorted((n, canonical_key(bt)) for n, bt in t.branches)))
    if isinstance(t, VectorType):
        return ("vector", canonical_key(t.elem))
    if isinstance(t, SetType):
        return ("set",)
    if isinstance(t, ProcType):
        result = canonical_key(t.result) if t.result is not None else None
        return ("proc", tuple(canonical_key(p) for p in t.params), result)
    return (type(t).__name__,)


def type_of(box) -> TypeRep:
    """Type carried by an any-box; unwraps exactly one level."""
    return box.type_rep


def get_structure_fields(t: TypeRep) -> tuple[NameAndType, ...]:
    """Fields of a structure type in declaration order; empty otherwise."""
    if isinstance(t, StructureType):
        return tuple(NameAndType(n, ft) for n, ft in t.fields)
    return ()


def mk_structure_type(fields) -> StructureType:
    """Structure type from (name, type) pairs in iteration order.

    Raises DuplicateFieldError when two pairs share a name: the caller
    (notably join generation over incompatible schemas) treats that as a
    reportable failure, not a crash.
    """
    pairs = []
    seen = set()
    for f in fields:
        if f.name in seen:
            raise DuplicateFieldError(f"duplicate field name: {f.name}")
        seen.add(f.name)
        pairs.append((f.name, f.type_rep))
    return StructureType(tuple(pairs))


def write_type(t: TypeRep) -> str:
    """Render a type in the language's own type syntax (ASCII arrow).

    The text parses back to an equal_type-equivalent representation.
    """
    if isinstance(t, IntType):
        return "int"
    if isinstance(t, RealType):
        return "real"
    if isinstance(t, BoolType):
        return "bool"
    if isinstance(t, StringType):
        return "string"
    if isinstance(t, NullType):
        return "null"
    if isinstance(t, AnyType):
        return "any"
    if isinstance(t, EnvType):
        return "env"
    if isinstance(t, TypeRepType):
        return "typerep"
    if isinstance(t, SetType):
        return "set"
    if isinstance(t, VectorType):
        return "*" + write_type(t.elem)
    if isinstance(t, StructureType):
        if not t.fields:
            return "structure()"
        inner = " ; ".join(f"{n} : {write_type(ft)}" for n, ft in t.fields)
        return f"structure( {inner} )"
    if isinstance(t, VariantType):
        if not t.branches:
            return "variant()"
        inner = " ; ".join(f"{n} : {write_type(bt)}" for n, bt in t.branches)
        return f"variant( {inner} )"
    if isinstance(t, ProcType):
        params = ", ".join(write_type(p) for p in t.params)
        if t.result is None:
            return f"proc( {params} )" if params else "proc()"
        if params:
            return f"proc( {params} -> {write_type(t.result)} )"
        return f"proc( -> {write_type(t.result)} )"
    raise TypeError(f"not a TypeRep: {t!r}")
