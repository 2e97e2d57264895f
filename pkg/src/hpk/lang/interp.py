"""Tree-walking evaluator over checked syntax.

Frames hold one Cell per allocated slot.  A use clause aliases the
environment's own cell into the frame slot, so assignment through the
bound name writes the environment's location; every other slot gets a
fresh cell per activation.

Run-time faults occur only at the defined dynamic points: use-clause
binding checks, vector index bounds, and division by zero, plus arity and
argument checks on calls that cross from host code into the language.
"""

from __future__ import annotations

from ..typerep import (
    ANY,
    BOOL,
    INT,
    NULL,
    REAL,
    STRING,
    ProcType,
    TypeRep,
    TYPEREP,
    equal_type,
    write_type,
)
from . import nodes as N
from .values import (
    NIL,
    VOID,
    AnyValue,
    BuiltinClosure,
    Cell,
    Closure,
    Frame,
    StructureValue,
    VariantValue,
    VectorValue,
    value_type,
    wrap_int,
)


class RuntimeFault(Exception):
    def __init__(self, message):
        super().__init__(message)
        self.message = message


def resolve_template(template, frame):
    """Turn a source template into a HyperSource against live frames."""
    from ..hyperprog import FrameLocBinding, HyperSource, Region

    if template is None:
        return None
    subs = list(template.hyper.substitutions)
    for ph in template.placeholders:
        fr = frame.at_level(ph.level) if frame is not None else None
        if fr is None:
            continue
        subs.append((Region(ph.start, ph.finish),
                     FrameLocBinding(fr, ph.slot, ph.type_rep, ph.is_env,
                                     ph.mutable)))
    return HyperSource(template.hyper.code, subs)


def scalar_equal(t: TypeRep, a, b) -> bool:
    if equal_type(t, TYPEREP):
        return equal_type(a, b)
    for s in (INT, REAL, BOOL, STRING, NULL):
        if equal_type(t, s):
            return a == b
    return a is b


class Interpreter:
    """Evaluator with its own input and output channels."""

    def __init__(self, input_lines=None, output=None):
        self.input = list(input_lines or [])
        self.output = output if output is not None else []

    def write(self, text: str):
        self.output.append(text)

    def read_line(self) -> str:
        return self.input.pop(0) if self.input else ""

    def fault(self, message):
        raise RuntimeFault(message)

    # procedure values

    def make_closure(self, node, frame):
        if isinstance(node, N.Program):
            proc_t = ProcType((), node.t)
        else:
            proc_t = node.t
        source = resolve_template(node.template, frame)
        return Closure(proc_t, node, frame, source)

    def call(self, f, args):
        if isinstance(f, BuiltinClosure):
            if len(args) != len(f.proc_type.params):
                self.fault(f"wrong number of arguments calling {f.name}")
            result = f.fn(*args)
            return VOID if result is None else result
        if not isinstance(f, Closure):
            self.fault("not a procedure value")
        node = f.body
        if isinstance(node, N.Program):
            if args:
                self.fault("wrong number of arguments")
            frame = Frame(0, node.nslots, None)
            return self.eval_clauses(node.clauses, frame)
        if len(args) != len(node.params):
            self.fault(f"wrong number of arguments: expected "
                       f"{len(node.params)}, found {len(args)}")
        frame = Frame(node.lex_level, node.nslots, f.frame)
        for p, a in zip(node.params, args):
            at = value_type(a)
            if not equal_type(at, p.t):
                self.fault(f"argument type mismatch for {p.name}: expected "
                           f"{write_type(p.t)}, found {write_type(at)}")
            frame.slots[p.slot].value = a
        return self.eval(node.body, frame)

    # dispatch

    def eval(self, node, frame):
        return getattr(self, "eval_" + type(node).__name__)(node, frame)

    def eval_clauses(self, clauses, frame):
        result = VOID
        for c in clauses:
            result = self.eval(c, frame)
        return result

    # literals and names

    def eval_IntLit(self, node, frame):
        return node.value

    def eval_RealLit(self, node, frame):
        return node.value

    def eval_BoolLit(self, node, frame):
        return node.value

    def eval_StringLit(self, node, frame):
        return node.value

    def eval_NilLit(self, node, frame):
        return NIL

    def eval_Ident(self, node, frame):
        res = node.res
        if isinstance(res, N.LocalRes):
            return frame.at_level(res.level).slots[res.slot].value
        entry = res.entry
        if entry.kind == "value":
            return entry.value
        if entry.kind == "envloc":
            return entry.cell.value
        if entry.kind == "frameloc":
            return entry.frame.slots[entry.slot].value
        if entry.kind in ("structloc", "vecloc"):
            return entry.container
        self.fault(f"unusable binding: {entry.name}")

    # operators

    def eval_BinOp(self, node, frame):
        op = node.op
        if op == "and":
            return self.eval(node.left, frame) and self.eval(node.right, frame)
        if op == "or":
            return self.eval(node.left, frame) or self.eval(node.right, frame)
        a = self.eval(node.left, frame)
        b = self.eval(node.right, frame)
        if op == "=":
            return scalar_equal(node.left.t, a, b)
        if op == "~=":
            return not scalar_equal(node.left.t, a, b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if op == "++":
            return a + b
        is_int = equal_type(node.t, INT)
        if op == "+":
            return wrap_int(a + b) if is_int else a + b
        if op == "-":
            return wrap_int(a - b) if is_int else a - b
        if op == "*":
            return wrap_int(a * b) if is_int else a * b
        if op == "/":
            if is_int:
                if b == 0:
                    self.fault("division by zero")
                q = abs(a) // abs(b)
                return wrap_int(q if (a >= 0) == (b >= 0) else -q)
            if b == 0.0:
                self.fault("division by zero")
            return a / b
        self.fault(f"unknown operator {op}")

    def eval_UnOp(self, node, frame):
        v = self.eval(node.operand, frame)
        if node.op == "~":
            return not v
        if equal_type(node.t, INT):
            return wrap_int(-v)
        return -v

    # compound construction

    def eval_VecLit(self, node, frame):
        lwb = self.eval(node.lwb_expr, frame)
        values = [self.eval(e, frame) for e in node.elems]
        return VectorValue(node.t, lwb, values)

    def eval_StructLit(self, node, frame):
        values = [self.eval(f.expr, frame) for f in node.fields]
        return StructureValue(node.t, values)

    def eval_AnyInject(self, node, frame):
        v = self.eval(node.expr, frame)
        return AnyValue(node.expr.t, v)

    def eval_VariantInject(self, node, frame):
        v = self.eval(node.expr, frame)
        return VariantValue(node.t, node.branch, v)

    def eval_ProcLit(self, node, frame):
        return self.make_closure(node, frame)

    # application and access

    def eval_Apply(self, node, frame):
        if node.mode == "call":
            f = self.eval(node.fn, frame)
            args = [self.eval(a, frame) for a in node.args]
            return self.call(f, args)
        subject = self.eval(node.fn, frame)
        if node.mode == "field":
            return subject.cells[node.field].value
        index = self.eval(node.args[0], frame)
        cell = subject.cell_at(index)
        if cell is None:
            self.fault(f"vector index out of bounds: {index}")
        return cell.value

    def eval_Bound(self, node, frame):
        v = self.eval(node.expr, frame)
        return v.lwb if node.which == "lwb" else v.upb

    # control

    def eval_If(self, node, frame):
        if self.eval(node.cond, frame):
            result = self.eval(node.then_clause, frame)
            return result if node.else_clause is not None else VOID
        if node.else_clause is None:
            return VOID
        return self.eval(node.else_clause, frame)

    def eval_While(self, node, frame):
        while self.eval(node.cond, frame):
            self.eval(node.body, frame)
        return VOID

    def eval_For(self, node, frame):
        lo = self.eval(node.lo, frame)
        hi = self.eval(node.hi, frame)
        cell = frame.slots[node.slot]
        i = lo
        while i <= hi:
            cell.value = i
            self.eval(node.body, frame)
            i += 1
        return VOID

    def eval_Block(self, node, frame):
        return self.eval_clauses(node.clauses, frame)

    def eval_Project(self, node, frame):
        subject = self.eval(node.subject, frame)
        cell = frame.slots[node.alias_slot]
        if node.mode == "any":
            for arm in node.arms:
                if equal_type(subject.type_rep, arm.head_t):
                    cell.value = subject.value
                    return self.eval(arm.expr, frame)
            cell.value = subject
            return self.eval(node.default_expr, frame)
        for arm in node.arms:
            if arm.branch == subject.branch:
                cell.value = subject.payload
                return self.eval(arm.expr, frame)
        cell.value = subject
        return self.eval(node.default_expr, frame)

    # declarations and bindings

    def eval_LetDecl(self, node, frame):
        frame.slots[node.slot].value = self.eval(node.expr, frame)
        return VOID

    def eval_TypeDecl(self, node, frame):
        return VOID

    def eval_InLet(self, node, frame):
        env = self.eval(node.env_expr, frame)
        v = self.eval(node.expr, frame)
        try:
            env.define(node.name, v, node.expr.t, node.mutable)
        except KeyError:
            self.fault(f"already bound: {node.name}")
        return VOID

    def eval_UseIn(self, node, frame):
        env = self.eval(node.env_expr, frame)
        for b in node.binds:
            binding = env.lookup(b.name)
            if binding is None:
                self.fault(f"use: absent binding: {b.name}")
            if not equal_type(binding.type_rep, b.t):
                self.fault(f"use: type mismatch for {b.name}: expected "
                           f"{write_type(b.t)}, found "
                           f"{write_type(binding.type_rep)}")
            if b.assigned and not binding.mutable:
                self.fault(f"use: constant binding assigned: {b.name}")
            frame.slots[b.slot] = binding.cell
        return self.eval(node.body, frame)

    def eval_Assign(self, node, frame):
        v = self.eval(node.expr, frame)
        target = node.target
        if isinstance(target, N.Ident):
            res = target.res
            if isinstance(res, N.LocalRes):
                frame.at_level(res.level).slots[res.slot].value = v
                return VOID
            entry = res.entry
            if entry.kind == "envloc":
                entry.cell.value = v
                return VOID
            if entry.kind == "frameloc":
                entry.frame.slots[entry.slot].value = v
                return VOID
            self.fault(f"not assignable: {entry.name}")
        if target.mode == "field":
            subject = self.eval(target.fn, frame)
            subject.cells[target.field].value = v
            return VOID
        subject = self.eval(target.fn, frame)
        index = self.eval(target.args[0], frame)
        cell = subject.cell_at(index)
        if cell is None:
            self.fault(f"vector index out of bounds: {index}")
        cell.value = v
        return VOID

    def eval_Program(self, node, frame):
        return self.eval_clauses(node.clauses, frame)
