"""Tokeniser.

Offsets are 1-based inclusive Unicode scalar positions in the source text;
every downstream region (hyper-link regions, closure source spans) uses the
same convention, so token spans here are the single source of truth.
"""

from __future__ import annotations

from dataclasses import dataclass


class LexError(Exception):
    def __init__(self, message, line):
        super().__init__(message)
        self.message = message
        self.line = line


KEYWORDS = {
    "let", "type", "is", "in", "use", "with", "proc", "begin", "end",
    "project", "as", "onto", "default", "if", "then", "else", "do",
    "for", "to", "while", "struct", "true", "false", "nil",
    "and", "or", "upb", "lwb", "of", "any",
    "int", "real", "bool", "string", "null", "env", "typerep", "set",
    "structure", "variant", "vector",
}

OPERATORS = [
    ":=", "~=", "<=", ">=", "++", "->",
    "(", ")", "[", "]", ",", ";", ":", "=", "~", "<", ">",
    "+", "-", "*", "/", "@",
]

STRING_ESCAPES = {"n": "\n", "t": "\t", "'": "'", '"': '"'}


@dataclass
class Token:
    kind: str  # int real string id kw op eof
    text: str
    value: object
    start: int
    finish: int
    line: int

    def is_kw(self, *words):
        return self.kind == "kw" and self.text in words

    def is_op(self, *ops):
        return self.kind == "op" and self.text in ops


def tokenize(source: str) -> list[Token]:
    tokens = []
    i = 0
    n = len(source)
    line = 1
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            continue
        if c == "!":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start = i + 1
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            is_real = False
            if j + 1 < n and source[j] == "." and source[j + 1].isdigit():
                is_real = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if is_real and j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            if is_real:
                tokens.append(Token("real", text, float(text), start, j, line))
            else:
                tokens.append(Token("int", text, int(text), start, j, line))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and (source[j].isalnum()):
                j += 1
            text = source[i:j]
            kind = "kw" if text in KEYWORDS else "id"
            tokens.append(Token(kind, text, text, start, j, line))
            i = j
            continue
        if c == '"':
            j = i + 1
            out = []
            while True:
                if j >= n:
                    raise LexError("unterminated string", line)
                ch = source[j]
                if ch == '"':
                    j += 1
                    break
                if ch == "\n":
                    raise LexError("unterminated string", line)
                if ch == "'":
                    if j + 1 >= n:
                        raise LexError("unterminated string", line)
                    esc = source[j + 1]
                    if esc not in STRING_ESCAPES:
                        raise LexError(f"unknown string escape: '{esc}", line)
                    out.append(STRING_ESCAPES[esc])
                    j += 2
                    continue
                out.append(ch)
                j += 1
            tokens.append(Token("string", source[i:j], "".join(out), start, j, line))
            i = j
            continue
        if c == "→":
            tokens.append(Token("op", "->", "->", start, start, line))
            i += 1
            continue
        matched = None
        for op in OPERATORS:
            if source.startswith(op, i):
                matched = op
                break
        if matched is None:
            raise LexError(f"unexpected character: {c!r}", line)
        j = i + len(matched)
        tokens.append(Token("op", matched, matched, start, j, line))
        i = j
    tokens.append(Token("eof", "", None, n + 1, n + 1, line))
    return tokens
