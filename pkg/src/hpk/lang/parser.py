"""Recursive-descent parser.

Clause and expression parsing is greedy and newline-insensitive: an
operator continues the current expression wherever that parses, and `;`
between clauses is optional.  Keywords delimit everything that matters.
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
    StructureType,
    VariantType,
    VectorType,
)
from . import nodes as N
from .lexer import Token, tokenize


class ParseError(Exception):
    def __init__(self, message, line):
        super().__init__(message)
        self.message = message
        self.line = line


BASE_TYPES = {
    "int": INT, "real": REAL, "bool": BOOL, "string": STRING,
    "null": NULL, "env": ENV, "any": ANY, "typerep": TYPEREP, "set": SET,
}

CLAUSE_START_KWS = {
    "let", "type", "in", "use", "if", "while", "for", "begin", "proc",
    "project", "struct", "variant", "true", "false", "nil", "any",
    "upb", "lwb",
}
CLAUSE_START_OPS = {"(", "~", "-", "@"}


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    def peek(self, ahead=0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line)

    def expect_op(self, op) -> Token:
        t = self.peek()
        if not t.is_op(op):
            self.fail(f"expected '{op}'", t)
        return self.next()

    def expect_kw(self, word) -> Token:
        t = self.peek()
        if not t.is_kw(word):
            self.fail(f"expected '{word}'", t)
        return self.next()

    def expect_id(self) -> Token:
        t = self.peek()
        if t.kind != "id":
            self.fail("expected an identifier", t)
        return self.next()

    # programs and clause sequences

    def parse_program(self) -> N.Program:
        first = self.peek()
        clauses = self.parse_clauses(stop_kws=())
        t = self.peek()
        if t.kind != "eof":
            self.fail("unexpected input after program", t)
        finish = clauses[-1].finish if clauses else first.start
        return N.Program(clauses, first.start, finish)

    def parse_clauses(self, stop_kws) -> list:
        clauses = []
        while True:
            while self.peek().is_op(";"):
                self.next()
            t = self.peek()
            if t.kind == "eof" or (t.kind == "kw" and t.text in stop_kws):
                break
            if not self.starts_clause(t):
                self.fail("expected a clause", t)
            clauses.append(self.parse_clause())
        return clauses

    def starts_clause(self, t: Token) -> bool:
        if t.kind in ("int", "real", "string", "id"):
            return True
        if t.kind == "kw":
            return t.text in CLAUSE_START_KWS
        if t.kind == "op":
            return t.text in CLAUSE_START_OPS
        return False

    def parse_clause(self):
        t = self.peek()
        if t.is_kw("let"):
            return self.parse_let()
        if t.is_kw("type"):
            return self.parse_type_decl()
        if t.is_kw("in"):
            return self.parse_in_let()
        if t.is_kw("use"):
            return self.parse_use()
        expr = self.parse_expr()
        if self.peek().is_op(":="):
            self.next()
            value = self.parse_expr()
            return N.Assign(expr, value, expr.start, value.finish)
        return expr

    def parse_let(self):
        kw = self.expect_kw("let")
        name = self.expect_id()
        t = self.peek()
        if t.is_op(":="):
            mutable = True
        elif t.is_op("="):
            mutable = False
        else:
            self.fail("expected '=' or ':=' in let", t)
        self.next()
        expr = self.parse_clause()
        return N.LetDecl(name.text, mutable, expr, kw.start, expr.finish)

    def parse_type_decl(self):
        kw = self.expect_kw("type")
        name = self.expect_id()
        self.expect_kw("is")
        start_tok = self.peek()
        ts = self.parse_type_syntax()
        finish = self.tokens[self.pos - 1].finish if self.pos else start_tok.finish
        return N.TypeDecl(name.text, ts, kw.start, finish)

    def parse_in_let(self):
        kw = self.expect_kw("in")
        env_expr = self.parse_expr()
        self.expect_kw("let")
        name = self.expect_id()
        t = self.peek()
        if t.is_op(":="):
            mutable = True
        elif t.is_op("="):
            mutable = False
        else:
            self.fail("expected '=' or ':=' in let", t)
        self.next()
        expr = self.parse_clause()
        return N.InLet(env_expr, name.text, mutable, expr, kw.start, expr.finish)

    def parse_use(self):
        kw = self.expect_kw("use")
        env_expr = self.parse_expr()
        self.expect_kw("with")
        binds = []
        while True:
            names = [self.expect_id()]
            while self.peek().is_op(","):
                self.next()
                names.append(self.expect_id())
            self.expect_op(":")
            ts = self.parse_type_syntax()
            finish = self.tokens[self.pos - 1].finish
            for nm in names:
                binds.append(N.UseBind(nm.text, ts, nm.start, finish))
            if self.peek().is_op(";"):
                self.next()
                continue
            break
        self.expect_kw("in")
        body = self.parse_clause()
        return N.UseIn(env_expr, binds, body, kw.start, body.finish)

    # expressions

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        left = self.parse_and()
        while self.peek().is_kw("or"):
            self.next()
            right = self.parse_and()
            left = N.BinOp("or", left, right, left.start, right.finish)
        return left

    def parse_and(self):
        left = self.parse_cmp()
        while self.peek().is_kw("and"):
            self.next()
            right = self.parse_cmp()
            left = N.BinOp("and", left, right, left.start, right.finish)
        return left

    def parse_cmp(self):
        left = self.parse_add()
        while self.peek().is_op("=", "~=", "<", "<=", ">", ">="):
            op = self.next().text
            right = self.parse_add()
            left = N.BinOp(op, left, right, left.start, right.finish)
        return left

    def parse_add(self):
        left = self.parse_mul()
        while self.peek().is_op("+", "-", "++"):
            op = self.next().text
            right = self.parse_mul()
            left = N.BinOp(op, left, right, left.start, right.finish)
        return left

    def parse_mul(self):
        left = self.parse_unary()
        while self.peek().is_op("*", "/"):
            op = self.next().text
            right = self.parse_unary()
            left = N.BinOp(op, left, right, left.start, right.finish)
        return left

    def parse_unary(self):
        t = self.peek()
        if t.is_op("~") or t.is_op("-"):
            self.next()
            operand = self.parse_unary()
            return N.UnOp(t.text, operand, t.start, operand.finish)
        return self.parse_postfix()

    def parse_postfix(self):
        expr = self.parse_primary()
        while self.peek().is_op("("):
            self.next()
            args = []
            if not self.peek().is_op(")"):
                args.append(self.parse_expr())
                while self.peek().is_op(","):
                    self.next()
                    args.append(self.parse_expr())
            close = self.expect_op(")")
            expr = N.Apply(expr, args, expr.start, close.finish)
        return expr

    def parse_primary(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return N.IntLit(t.value, t.start, t.finish)
        if t.kind == "real":
            self.next()
            return N.RealLit(t.value, t.start, t.finish)
        if t.kind == "string":
            self.next()
            return N.StringLit(t.value, t.start, t.finish)
        if t.is_kw("true") or t.is_kw("false"):
            self.next()
            return N.BoolLit(t.text == "true", t.start, t.finish)
        if t.is_kw("nil"):
            self.next()
            return N.NilLit(t.start, t.finish)
        if t.kind == "id":
            self.next()
            return N.Ident(t.text, t.start, t.finish)
        if t.is_op("("):
            self.next()
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if t.is_kw("any"):
            self.next()
            self.expect_op("(")
            inner = self.parse_expr()
            close = self.expect_op(")")
            return N.AnyInject(inner, t.start, close.finish)
        if t.is_kw("upb") or t.is_kw("lwb"):
            self.next()
            self.expect_op("(")
            inner = self.parse_expr()
            close = self.expect_op(")")
            return N.Bound(t.text, inner, t.start, close.finish)
        if t.is_op("@"):
            return self.parse_vector_literal()
        if t.is_kw("struct"):
            return self.parse_struct_literal()
        if t.is_kw("variant"):
            return self.parse_variant_injection()
        if t.is_kw("proc"):
            return self.parse_proc_literal()
        if t.is_kw("begin"):
            return self.parse_block()
        if t.is_kw("if"):
            return self.parse_if()
        if t.is_kw("while"):
            return self.parse_while()
        if t.is_kw("for"):
            return self.parse_for()
        if t.is_kw("project"):
            return self.parse_project()
        self.fail("expected an expression", t)

    def parse_vector_literal(self):
        at = self.expect_op("@")
        lwb_expr = self.parse_expr()
        self.expect_kw("of")
        self.expect_op("[")
        elems = []
        if not self.peek().is_op("]"):
            elems.append(self.parse_expr())
            while self.peek().is_op(","):
                self.next()
                elems.append(self.parse_expr())
        close = self.expect_op("]")
        return N.VecLit(lwb_expr, elems, at.start, close.finish)

    def parse_struct_literal(self):
        kw = self.expect_kw("struct")
        self.expect_op("(")
        fields = []
        while not self.peek().is_op(")"):
            name = self.expect_id()
            self.expect_op("=")
            expr = self.parse_expr()
            fields.append(N.FieldInit(name.text, expr, name.start, expr.finish))
            if self.peek().is_op(";") or self.peek().is_op(","):
                self.next()
                continue
            break
        close = self.expect_op(")")
        return N.StructLit(fields, kw.start, close.finish)

    def parse_variant_injection(self):
        kw = self.expect_kw("variant")
        self.expect_op("(")
        t_syntax = self.parse_type_syntax()
        self.expect_op(";")
        branch = self.expect_id()
        self.expect_op("=")
        expr = self.parse_expr()
        close = self.expect_op(")")
        return N.VariantInject(t_syntax, branch.text, expr, kw.start, close.finish)

    def parse_proc_literal(self):
        kw = self.expect_kw("proc")
        self.expect_op("(")
        params = []
        result_syntax = None
        if not self.peek().is_op(")"):
            while not self.peek().is_op("->") and not self.peek().is_op(")"):
                names = [self.expect_id()]
                while self.peek().is_op(","):
                    self.next()
                    names.append(self.expect_id())
                self.expect_op(":")
                ts = self.parse_type_syntax()
                finish = self.tokens[self.pos - 1].finish
                for nm in names:
                    params.append(N.Param(nm.text, ts, nm.start, finish))
                if self.peek().is_op(";"):
                    self.next()
                    continue
                break
            if self.peek().is_op("->"):
                self.next()
                result_syntax = self.parse_type_syntax()
        self.expect_op(")")
        t = self.peek()
        if t.is_op(";"):
            self.next()
            body = self.parse_clause()
        elif t.is_kw("begin"):
            body = self.parse_block()
        else:
            self.fail("expected procedure body", t)
        return N.ProcLit(params, result_syntax, body, kw.start, body.finish)

    def parse_block(self):
        kw = self.expect_kw("begin")
        clauses = self.parse_clauses(stop_kws=("end",))
        close = self.expect_kw("end")
        return N.Block(clauses, kw.start, close.finish)

    def parse_if(self):
        kw = self.expect_kw("if")
        cond = self.parse_expr()
        t = self.peek()
        if t.is_kw("then"):
            self.next()
            then_clause = self.parse_clause()
            self.expect_kw("else")
            else_clause = self.parse_clause()
            return N.If(cond, then_clause, else_clause, kw.start, else_clause.finish)
        if t.is_kw("do"):
            self.next()
            then_clause = self.parse_clause()
            return N.If(cond, then_clause, None, kw.start, then_clause.finish)
        self.fail("expected 'then' or 'do'", t)

    def parse_while(self):
        kw = self.expect_kw("while")
        cond = self.parse_expr()
        self.expect_kw("do")
        body = self.parse_clause()
        return N.While(cond, body, kw.start, body.finish)

    def parse_for(self):
        kw = self.expect_kw("for")
        var = self.expect_id()
        self.expect_op("=")
        lo = self.parse_expr()
        self.expect_kw("to")
        hi = self.parse_expr()
        self.expect_kw("do")
        body = self.parse_clause()
        return N.For(var.text, lo, hi, body, kw.start, body.finish)

    def parse_project(self):
        kw = self.expect_kw("project")
        subject = self.parse_expr()
        self.expect_kw("as")
        alias = self.expect_id()
        self.expect_kw("onto")
        arms = []
        while not self.peek().is_kw("default"):
            head_start = self.peek()
            head = self.parse_type_syntax()
            self.expect_op(":")
            expr = self.parse_clause()
            arms.append(N.Arm(head, expr, head_start.start, expr.finish))
            while self.peek().is_op(";"):
                self.next()
            if self.peek().kind == "eof":
                self.fail("expected 'default' arm", self.peek())
        self.expect_kw("default")
        self.expect_op(":")
        default_expr = self.parse_clause()
        return N.Project(subject, alias.text, arms, default_expr,
                         kw.start, default_expr.finish)

    # type syntax

    def parse_type_syntax(self):
        t = self.peek()
        if t.kind == "kw" and t.text in BASE_TYPES:
            self.next()
            return BASE_TYPES[t.text]
        if t.is_op("*"):
            self.next()
            return VectorType(self.parse_type_syntax())
        if t.is_kw("structure"):
            self.next()
            fields = self.parse_name_type_groups()
            try:
                return StructureType(fields)
            except Exception as exc:
                self.fail(str(exc), t)
        if t.is_kw("variant"):
            self.next()
            branches = self.parse_name_type_groups()
            try:
                return VariantType(branches)
            except Exception as exc:
                self.fail(str(exc), t)
        if t.is_kw("proc"):
            self.next()
            self.expect_op("(")
            params = []
            result = None
            if not self.peek().is_op(")"):
                while not self.peek().is_op("->") and not self.peek().is_op(")"):
                    params.append(self.parse_type_syntax())
                    if self.peek().is_op(","):
                        self.next()
                        continue
                    break
                if self.peek().is_op("->"):
                    self.next()
                    result = self.parse_type_syntax()
            self.expect_op(")")
            return ProcType(tuple(params), result)
        if t.kind == "id":
            self.next()
            return N.TName(t.text)
        self.fail("expected a type", t)

    def parse_name_type_groups(self):
        self.expect_op("(")
        fields = []
        while not self.peek().is_op(")"):
            names = [self.expect_id()]
            while self.peek().is_op(","):
                self.next()
                names.append(self.expect_id())
            self.expect_op(":")
            ts = self.parse_type_syntax()
            for nm in names:
                fields.append((nm.text, ts))
            if self.peek().is_op(";"):
                self.next()
                continue
            break
        self.expect_op(")")
        return tuple(fields)


def parse_program(source: str) -> N.Program:
    return Parser(source).parse_program()
