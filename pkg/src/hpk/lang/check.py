"""Typechecker.

Annotates the parse tree in place: expression types, identifier
resolutions (frame slot or symbol-table entry), slot allocation per
procedure, and the free-identifier occurrences each procedure literal
needs for its source attachment.

External names come from a chain of symbol tables searched in order after
the lexical scopes.  Entries of kind "type" are visible only in type
positions; everything else only in value positions.
"""

from __future__ import annotations

from ..typerep import (
    ANY,
    BOOL,
    ENV,
    INT,
    REAL,
    STRING,
    ProcType,
    SetType,
    StructureType,
    TypeRep,
    VariantType,
    VectorType,
    equal_type,
    write_type,
)
from . import nodes as N


class CheckError(Exception):
    def __init__(self, message, line):
        super().__init__(message)
        self.message = message
        self.line = line


class VarInfo:
    __slots__ = ("level", "slot", "type_rep", "mutable", "is_use", "assigned")

    def __init__(self, level, slot, type_rep, mutable, is_use=False):
        self.level = level
        self.slot = slot
        self.type_rep = type_rep
        self.mutable = mutable
        self.is_use = is_use
        self.assigned = False


class TypeInfo:
    __slots__ = ("type_rep",)

    def __init__(self, type_rep):
        self.type_rep = type_rep


class ProcCtx:
    """Per-procedure-literal state while its body is being checked."""

    __slots__ = ("lex_level", "nslots", "node", "free_occurrences")

    def __init__(self, lex_level, node):
        self.lex_level = lex_level
        self.nslots = 0
        self.node = node
        self.free_occurrences = []


class Checker:
    def __init__(self, source_text: str, tables=()):
        self.src = source_text
        self.tables = list(tables)
        self.scopes = []
        self.procs = []
        self.all_procs = []

    # diagnostics

    def line_of(self, offset: int) -> int:
        return self.src.count("\n", 0, max(offset - 1, 0)) + 1

    def error(self, node, message):
        raise CheckError(message, self.line_of(node.start))

    # scopes and slots

    def push_scope(self):
        self.scopes.append({})

    def pop_scope(self):
        self.scopes.pop()

    def declare(self, node, name, info):
        scope = self.scopes[-1]
        if name in scope:
            self.error(node, f"already declared: {name}")
        scope[name] = info

    def alloc_slot(self) -> int:
        ctx = self.procs[-1]
        slot = ctx.nslots
        ctx.nslots += 1
        return slot

    # entry point

    def check_program(self, prog: N.Program) -> TypeRep | None:
        ctx = ProcCtx(0, prog)
        self.procs.append(ctx)
        self.all_procs.append(ctx)
        self.push_scope()
        t = self.check_clauses(prog.clauses)
        self.pop_scope()
        self.procs.pop()
        prog.t = t
        prog.nslots = ctx.nslots
        prog.lex_level = 0
        return t

    def check_clauses(self, clauses) -> TypeRep | None:
        t = None
        for c in clauses:
            t = self.check_clause(c)
        return t

    # identifiers

    def resolve_ident(self, node: N.Ident) -> TypeRep:
        for scope in reversed(self.scopes):
            info = scope.get(node.name)
            if isinstance(info, VarInfo):
                node.res = N.LocalRes(info.level, info.slot, info.mutable,
                                      info.type_rep, info.is_use)
                node.t = info.type_rep
                self.note_occurrence(node, info)
                return info.type_rep
            if isinstance(info, TypeInfo):
                self.error(node, f"type used as a value: {node.name}")
        for table in self.tables:
            entry = table.lookup(node.name)
            if entry is not None:
                if entry.kind == "type":
                    self.error(node, f"type used as a value: {node.name}")
                node.res = N.ExternalRes(entry)
                node.t = entry.type_rep
                return entry.type_rep
        self.error(node, f"undeclared identifier: {node.name}")

    def note_occurrence(self, node: N.Ident, info: VarInfo):
        """Record this occurrence as free in every enclosing literal whose

        body sits at a deeper lexical level than the declaration.
        """
        for ctx in self.procs:
            if ctx.lex_level > info.level:
                ctx.free_occurrences.append(
                    (node.start, node.finish, info.level, info.slot,
                     info.type_rep, info.is_use, info.mutable))

    def local_info(self, name) -> VarInfo | None:
        for scope in reversed(self.scopes):
            info = scope.get(name)
            if isinstance(info, VarInfo):
                return info
            if isinstance(info, TypeInfo):
                return None
        return None

    # type syntax

    def resolve_type(self, ts: TypeRep, node) -> TypeRep:
        if isinstance(ts, N.TName):
            for scope in reversed(self.scopes):
                info = scope.get(ts.name)
                if isinstance(info, TypeInfo):
                    return info.type_rep
                if isinstance(info, VarInfo):
                    break
            for table in self.tables:
                entry = table.lookup(ts.name)
                if entry is not None and entry.kind == "type":
                    return entry.type_rep
            self.error(node, f"unknown type: {ts.name}")
        if isinstance(ts, VectorType):
            return VectorType(self.resolve_type(ts.elem, node))
        if isinstance(ts, StructureType):
            return StructureType(tuple(
                (n, self.resolve_type(ft, node)) for n, ft in ts.fields))
        if isinstance(ts, VariantType):
            return VariantType(tuple(
                (n, self.resolve_type(bt, node)) for n, bt in ts.branches))
        if isinstance(ts, ProcType):
            params = tuple(self.resolve_type(p, node) for p in ts.params)
            result = None if ts.result is None else self.resolve_type(ts.result, node)
            return ProcType(params, result)
        if isinstance(ts, SetType):
            return ts
        return ts

    # clauses

    def check_clause(self, node) -> TypeRep | None:
        method = getattr(self, "check_" + type(node).__name__)
        return method(node)

    def need_value(self, node, what="expression") -> TypeRep:
        t = self.check_clause(node)
        if t is None:
            self.error(node, f"{what} has no value")
        return t

    def check_IntLit(self, node):
        node.t = INT
        return INT

    def check_RealLit(self, node):
        node.t = REAL
        return REAL

    def check_BoolLit(self, node):
        node.t = BOOL
        return BOOL

    def check_StringLit(self, node):
        node.t = STRING
        return STRING

    def check_NilLit(self, node):
        from ..typerep import NULL

        node.t = NULL
        return NULL

    def check_Ident(self, node):
        return self.resolve_ident(node)

    def check_AnyInject(self, node):
        self.need_value(node.expr)
        node.t = ANY
        return ANY

    def check_VariantInject(self, node):
        vt = self.resolve_type(node.type_syntax, node)
        if not isinstance(vt, VariantType):
            self.error(node, "variant injection needs a variant type")
        bt = vt.branch_type(node.branch)
        if bt is None:
            self.error(node, f"no branch: {node.branch}")
        et = self.need_value(node.expr)
        if not equal_type(et, bt):
            self.error(node, f"branch {node.branch} needs "
                             f"{write_type(bt)}, found {write_type(et)}")
        node.type_syntax = vt
        node.t = vt
        return vt

    def check_Bound(self, node):
        t = self.need_value(node.expr)
        if not isinstance(t, VectorType):
            self.error(node, f"{node.which} needs a vector")
        node.t = INT
        return INT

    def check_Apply(self, node):
        fn_t = self.need_value(node.fn)
        if isinstance(fn_t, ProcType):
            node.mode = "call"
            if len(node.args) != len(fn_t.params):
                self.error(node, f"wrong number of arguments: expected "
                                 f"{len(fn_t.params)}, found {len(node.args)}")
            for arg, pt in zip(node.args, fn_t.params):
                at = self.need_value(arg)
                if not equal_type(at, pt):
                    self.error(arg, f"argument type mismatch: expected "
                                    f"{write_type(pt)}, found {write_type(at)}")
            node.t = fn_t.result
            return fn_t.result
        if isinstance(fn_t, StructureType):
            node.mode = "field"
            if len(node.args) != 1 or not isinstance(node.args[0], N.Ident):
                self.error(node, "field selection needs one field name")
            name = node.args[0].name
            ft = fn_t.field_type(name)
            if ft is None:
                self.error(node.args[0], f"no field {name}")
            node.field = name
            node.args[0].t = ft
            node.t = ft
            return ft
        if isinstance(fn_t, VectorType):
            node.mode = "index"
            if len(node.args) != 1:
                self.error(node, "vector indexing needs one index")
            it = self.need_value(node.args[0])
            if not equal_type(it, INT):
                self.error(node.args[0], "vector index must be int")
            node.t = fn_t.elem
            return fn_t.elem
        self.error(node, f"value of type {write_type(fn_t)} cannot be applied")

    def check_BinOp(self, node):
        op = node.op
        lt = self.need_value(node.left)
        rt = self.need_value(node.right)
        if op in ("and", "or"):
            if not (equal_type(lt, BOOL) and equal_type(rt, BOOL)):
                self.error(node, f"{op} needs bool operands")
            node.t = BOOL
            return BOOL
        if op in ("=", "~="):
            if not equal_type(lt, rt):
                self.error(node, "comparison of differently typed values")
            node.t = BOOL
            return BOOL
        if op in ("<", "<=", ">", ">="):
            ok = any(equal_type(lt, t) and equal_type(rt, t)
                     for t in (INT, REAL, STRING))
            if not ok:
                self.error(node, f"{op} needs int, real, or string operands")
            node.t = BOOL
            return BOOL
        if op == "++":
            if not (equal_type(lt, STRING) and equal_type(rt, STRING)):
                self.error(node, "++ needs string operands")
            node.t = STRING
            return STRING
        if op in ("+", "-", "*", "/"):
            if equal_type(lt, INT) and equal_type(rt, INT):
                node.t = INT
                return INT
            if equal_type(lt, REAL) and equal_type(rt, REAL):
                node.t = REAL
                return REAL
            self.error(node, f"{op} needs two ints or two reals")
        self.error(node, f"unknown operator {op}")

    def check_UnOp(self, node):
        t = self.need_value(node.operand)
        if node.op == "~":
            if not equal_type(t, BOOL):
                self.error(node, "~ needs a bool operand")
            node.t = BOOL
            return BOOL
        if node.op == "-":
            if equal_type(t, INT) or equal_type(t, REAL):
                node.t = t
                return t
            self.error(node, "unary - needs int or real")
        self.error(node, f"unknown operator {node.op}")

    def check_VecLit(self, node):
        lt = self.need_value(node.lwb_expr)
        if not equal_type(lt, INT):
            self.error(node.lwb_expr, "vector lower bound must be int")
        if not node.elems:
            self.error(node, "empty vector literal has no element type")
        elem_t = self.need_value(node.elems[0])
        for e in node.elems[1:]:
            et = self.need_value(e)
            if not equal_type(et, elem_t):
                self.error(e, "vector elements must share one type")
        t = VectorType(elem_t)
        node.t = t
        return t

    def check_StructLit(self, node):
        seen = set()
        fields = []
        for f in node.fields:
            if f.name in seen:
                self.error(f, f"duplicate field: {f.name}")
            seen.add(f.name)
            ft = self.need_value(f.expr, "field value")
            fields.append((f.name, ft))
        t = StructureType(tuple(fields))
        node.t = t
        return t

    def check_If(self, node):
        ct = self.need_value(node.cond)
        if not equal_type(ct, BOOL):
            self.error(node.cond, "condition must be bool")
        if node.else_clause is None:
            self.check_clause(node.then_clause)
            node.t = None
            return None
        tt = self.check_clause(node.then_clause)
        et = self.check_clause(node.else_clause)
        if tt is None and et is None:
            node.t = None
            return None
        if tt is None or et is None or not equal_type(tt, et):
            self.error(node, "if branches must have one type")
        node.t = tt
        return tt

    def check_While(self, node):
        ct = self.need_value(node.cond)
        if not equal_type(ct, BOOL):
            self.error(node.cond, "condition must be bool")
        self.check_clause(node.body)
        node.t = None
        return None

    def check_For(self, node):
        lo_t = self.need_value(node.lo)
        hi_t = self.need_value(node.hi)
        if not (equal_type(lo_t, INT) and equal_type(hi_t, INT)):
            self.error(node, "for bounds must be int")
        ctx = self.procs[-1]
        node.slot = self.alloc_slot()
        self.push_scope()
        self.declare(node, node.var, VarInfo(ctx.lex_level, node.slot, INT, False))
        self.check_clause(node.body)
        self.pop_scope()
        node.t = None
        return None

    def check_Block(self, node):
        self.push_scope()
        t = self.check_clauses(node.clauses)
        self.pop_scope()
        node.t = t
        return t

    def check_LetDecl(self, node):
        t = self.need_value(node.expr, "let initialiser")
        ctx = self.procs[-1]
        node.slot = self.alloc_slot()
        self.declare(node, node.name, VarInfo(ctx.lex_level, node.slot, t, node.mutable))
        node.t = None
        return None

    def check_TypeDecl(self, node):
        t = self.resolve_type(node.type_syntax, node)
        self.declare(node, node.name, TypeInfo(t))
        node.type_syntax = t
        node.t = None
        return None

    def check_InLet(self, node):
        et = self.need_value(node.env_expr)
        if not equal_type(et, ENV):
            self.error(node.env_expr, "in needs an environment")
        self.need_value(node.expr, "binding value")
        node.t = None
        return None

    def check_UseIn(self, node):
        et = self.need_value(node.env_expr)
        if not equal_type(et, ENV):
            self.error(node.env_expr, "use needs an environment")
        ctx = self.procs[-1]
        self.push_scope()
        infos = []
        for b in node.binds:
            b.t = self.resolve_type(b.type_syntax, b)
            b.slot = self.alloc_slot()
            info = VarInfo(ctx.lex_level, b.slot, b.t, True, is_use=True)
            self.declare(b, b.name, info)
            infos.append(info)
        t = self.check_clause(node.body)
        for b, info in zip(node.binds, infos):
            b.assigned = info.assigned
        self.pop_scope()
        node.t = t
        return t

    def check_Assign(self, node):
        target = node.target
        vt = self.need_value(node.expr, "assigned value")
        if isinstance(target, N.Ident):
            tt = self.resolve_ident(target)
            res = target.res
            if isinstance(res, N.LocalRes):
                if not res.mutable:
                    self.error(target, f"not assignable: {target.name}")
                if res.is_use:
                    info = self.local_info(target.name)
                    if info is not None:
                        info.assigned = True
            else:
                entry = res.entry
                if not entry.assignable:
                    self.error(target, f"not assignable: {target.name}")
        elif isinstance(target, N.Apply):
            tt = self.check_Apply(target)
            if target.mode == "call":
                self.error(target, "cannot assign to a call result")
        else:
            self.error(target, "not an assignable location")
        if not equal_type(vt, tt):
            self.error(node, f"type mismatch in assignment: expected "
                             f"{write_type(tt)}, found {write_type(vt)}")
        node.t = None
        return None

    def check_ProcLit(self, node):
        params = []
        for p in node.params:
            p.t = self.resolve_type(p.type_syntax, p)
            params.append(p.t)
        result = None
        if node.result_syntax is not None:
            result = self.resolve_type(node.result_syntax, node)
        proc_t = ProcType(tuple(params), result)
        parent_level = self.procs[-1].lex_level
        ctx = ProcCtx(parent_level + 1, node)
        self.procs.append(ctx)
        self.all_procs.append(ctx)
        self.push_scope()
        for p in node.params:
            p.slot = self.alloc_slot()
            self.declare(p, p.name, VarInfo(ctx.lex_level, p.slot, p.t, False))
        body_t = self.check_clause(node.body)
        self.pop_scope()
        self.procs.pop()
        if result is not None:
            if body_t is None or not equal_type(body_t, result):
                found = "void" if body_t is None else write_type(body_t)
                self.error(node, f"body type {found} does not match result "
                                 f"type {write_type(result)}")
        node.t = proc_t
        node.lex_level = ctx.lex_level
        node.nslots = ctx.nslots
        return proc_t

    def check_Project(self, node):
        subj_t = self.need_value(node.subject)
        is_variant = isinstance(subj_t, VariantType)
        if not is_variant and not equal_type(subj_t, ANY):
            self.error(node.subject, "project needs an any or a variant")
        node.mode = "variant" if is_variant else "any"
        ctx = self.procs[-1]
        node.alias_slot = self.alloc_slot()
        result_t = None
        result_set = False

        def merge(t, at_node):
            nonlocal result_t, result_set
            if not result_set:
                result_t = t
                result_set = True
                return
            if result_t is None and t is None:
                return
            if result_t is None or t is None or not equal_type(result_t, t):
                self.error(at_node, "project arms must share one type")

        for arm in node.arms:
            if node.mode == "variant":
                if not isinstance(arm.head, N.TName):
                    self.error(arm, "variant projection arms name branches")
                branch_t = subj_t.branch_type(arm.head.name)
                if branch_t is None:
                    self.error(arm, f"no branch {arm.head.name}")
                arm.branch = arm.head.name
                alias_t = branch_t
            else:
                alias_t = self.resolve_type(arm.head, arm)
                arm.head_t = alias_t
            self.push_scope()
            self.declare(arm, node.alias, VarInfo(ctx.lex_level, node.alias_slot,
                                                  alias_t, False))
            merge(self.check_clause(arm.expr), arm)
            self.pop_scope()
        default_alias_t = subj_t
        self.push_scope()
        self.declare(node, node.alias, VarInfo(ctx.lex_level, node.alias_slot,
                                               default_alias_t, False))
        merge(self.check_clause(node.default_expr), node.default_expr)
        self.pop_scope()
        node.t = result_t
        return result_t

    def check_Program(self, node):
        return self.check_program(node)


def check_program(prog: N.Program, source_text: str, tables=()):
    """Typecheck in place; returns (program type, list of ProcCtx)."""
    checker = Checker(source_text, tables)
    t = checker.check_program(prog)
    return t, checker.all_procs
