"""Abstract syntax.

Nodes are plain mutable dataclasses.  The parser fills the syntactic fields
plus start/finish (1-based inclusive offsets); the typechecker writes the
annotation fields (types, resolutions, slots).  Annotated trees are what
closures carry at run time, so every field must survive the store's
serialiser: keep values to primitives, TypeReps, nodes, and lists thereof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..typerep import TypeRep


@dataclass(frozen=True, slots=True)
class TName(TypeRep):
    """A not-yet-resolved type name inside type syntax."""

    name: str


@dataclass
class LocalRes:
    """Identifier resolved to a frame slot."""

    level: int
    slot: int
    mutable: bool
    type_rep: TypeRep
    is_use: bool = False


@dataclass
class ExternalRes:
    """Identifier resolved through a symbol table.

    entry is the live SymbolEntry; the evaluator reads and writes through
    it directly.
    """

    entry: object


@dataclass
class Param:
    name: str
    type_syntax: TypeRep
    start: int
    finish: int
    slot: int = -1
    t: TypeRep | None = None


@dataclass
class Arm:
    head: TypeRep
    expr: object
    start: int
    finish: int
    branch: str | None = None
    head_t: TypeRep | None = None


@dataclass
class FieldInit:
    name: str
    expr: object
    start: int
    finish: int


@dataclass
class UseBind:
    name: str
    type_syntax: TypeRep
    start: int
    finish: int
    slot: int = -1
    t: TypeRep | None = None
    assigned: bool = False


@dataclass
class Placeholder:
    """A free-identifier occurrence inside a procedure literal's source,

    to be resolved to a frame location when the literal is evaluated.
    Offsets are relative to the literal's own source span.
    """

    start: int
    finish: int
    level: int
    slot: int
    type_rep: TypeRep
    is_env: bool
    mutable: bool


@dataclass
class SourceTemplate:
    """Source attachment for a procedure literal: the literal's span as a

    hyper-source (original links included) plus frame placeholders.
    """

    hyper: object
    placeholders: list


@dataclass
class IntLit:
    value: int
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class RealLit:
    value: float
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class BoolLit:
    value: bool
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class StringLit:
    value: str
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class NilLit:
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class Ident:
    name: str
    start: int
    finish: int
    t: TypeRep | None = None
    res: object = None


@dataclass
class Apply:
    fn: object
    args: list
    start: int
    finish: int
    t: TypeRep | None = None
    mode: str = ""  # call | field | index
    field: str = ""


@dataclass
class AnyInject:
    expr: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class VariantInject:
    type_syntax: object
    branch: str
    expr: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class Bound:
    which: str  # upb | lwb
    expr: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class ProcLit:
    params: list
    result_syntax: TypeRep | None
    body: object
    start: int
    finish: int
    t: TypeRep | None = None
    lex_level: int = -1
    nslots: int = 0
    template: object = None


@dataclass
class Project:
    subject: object
    alias: str
    arms: list
    default_expr: object
    start: int
    finish: int
    t: TypeRep | None = None
    mode: str = ""  # any | variant
    alias_slot: int = -1


@dataclass
class If:
    cond: object
    then_clause: object
    else_clause: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class For:
    var: str
    lo: object
    hi: object
    body: object
    start: int
    finish: int
    t: TypeRep | None = None
    slot: int = -1


@dataclass
class While:
    cond: object
    body: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class StructLit:
    fields: list
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class VecLit:
    lwb_expr: object
    elems: list
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class BinOp:
    op: str
    left: object
    right: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class UnOp:
    op: str
    operand: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class Block:
    clauses: list
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class Assign:
    target: object
    expr: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class LetDecl:
    name: str
    mutable: bool
    expr: object
    start: int
    finish: int
    t: TypeRep | None = None
    slot: int = -1


@dataclass
class TypeDecl:
    name: str
    type_syntax: TypeRep
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class InLet:
    env_expr: object
    name: str
    mutable: bool
    expr: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class UseIn:
    env_expr: object
    binds: list
    body: object
    start: int
    finish: int
    t: TypeRep | None = None


@dataclass
class Program:
    clauses: list
    start: int
    finish: int
    t: TypeRep | None = None
    nslots: int = 0
    lex_level: int = 0
    template: object = None


NODE_CLASSES = {
    cls.__name__: cls
    for cls in (
        TName, LocalRes, ExternalRes, Param, Arm, FieldInit, UseBind,
        Placeholder, SourceTemplate,
        IntLit, RealLit, BoolLit, StringLit, NilLit, Ident, Apply,
        AnyInject, VariantInject, Bound, ProcLit, Project, If, For, While, StructLit,
        VecLit, BinOp, UnOp, Block, Assign, LetDecl, TypeDecl, InLet,
        UseIn, Program,
    )
}


def walk(node):
    """Yield node and every sub-node, pre-order."""
    yield node
    for f in node.__dataclass_fields__:
        v = getattr(node, f)
        if isinstance(v, list):
            for item in v:
                if hasattr(item, "__dataclass_fields__"):
                    yield from walk(item)
        elif hasattr(v, "__dataclass_fields__") and not isinstance(v, TypeRep):
            yield from walk(v)
