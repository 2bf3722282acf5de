"""Text format for presentations.

::

    theory Cantor2;
    op mu/2; op nu1/1; op nu2/1;
    eq 2: nu1(mu(x1,x2)) = x1;   # comments run to end of line
    end

Terms are prefix applications; ``xN`` is a variable; constants may be written
``c`` or ``c()``.
"""

from __future__ import annotations

import re

from .terms import App, Equation, Presentation, Signature, Term, TermError, Var

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z0-9_]+)|(?P<punct>[(),=:/;]))")
_VAR = re.compile(r"x([1-9][0-9]*)$")


class ParseError(ValueError):
    def __init__(self, message, line=0, column=0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


def _tokenize(text):
    toks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos:].strip() == "":
                break
            m = _TOKEN.match(line, pos)
            if m is None or m.end() == pos:
                col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
                raise ParseError(f"unexpected character {line[col - 1]!r}",
                                 lineno, col)
            kind = "name" if m.group("name") else "punct"
            val = m.group(kind)
            col = m.start(kind) + 1
            toks.append((kind, val, lineno, col))
            pos = m.end()
    toks.append(("eof", "", len(text.splitlines()) + 1, 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.ops: list[tuple[str, int]] = []
        self.arity: dict[str, int] = {}

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value=None, kind=None):
        tok = self.next()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", tok[2], tok[3])
        return tok

    def integer(self):
        tok = self.expect(kind="name")
        if not tok[1].isdigit():
            raise ParseError(f"expected integer, got {tok[1]!r}", tok[2], tok[3])
        return int(tok[1])

    def parse(self) -> Presentation:
        self.expect("theory")
        name = self.expect(kind="name")[1]
        self.expect(";")
        equations = []
        while True:
            tok = self.peek()
            if tok[1] == "end":
                self.next()
                break
            if tok[1] == "op":
                self.next()
                op = self.expect(kind="name")
                if _VAR.match(op[1]):
                    raise ParseError(f"operation name {op[1]!r} clashes with variable syntax",
                                     op[2], op[3])
                self.expect("/")
                ar = self.integer()
                self.expect(";")
                if op[1] in self.arity:
                    raise ParseError(f"duplicate operation name {op[1]!r}", op[2], op[3])
                self.arity[op[1]] = ar
                self.ops.append((op[1], ar))
            elif tok[1] == "eq":
                self.next()
                ctx = self.integer()
                self.expect(":")
                lhs = self.term(ctx)
                self.expect("=")
                rhs = self.term(ctx)
                self.expect(";")
                equations.append(Equation(lhs, rhs, ctx))
            else:
                raise ParseError(f"expected 'op', 'eq' or 'end', got {tok[1] or 'end of input'!r}",
                                 tok[2], tok[3])
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2], tok[3])
        try:
            return Presentation(name, Signature(tuple(self.ops)), tuple(equations))
        except TermError as exc:
            raise ParseError(str(exc)) from exc

    def term(self, ctx) -> Term:
        tok = self.expect(kind="name")
        name = tok[1]
        if name not in self.arity:
            m = _VAR.match(name)
            if m:
                idx = int(m.group(1))
                if idx > ctx:
                    raise ParseError(f"variable {name} outside context {ctx}", tok[2], tok[3])
                return Var(idx)
            raise ParseError(f"unknown operation {name!r}", tok[2], tok[3])
        args = []
        if self.peek()[1] == "(":
            self.next()
            if self.peek()[1] != ")":
                args.append(self.term(ctx))
                while self.peek()[1] == ",":
                    self.next()
                    args.append(self.term(ctx))
            self.expect(")")
        if len(args) != self.arity[name]:
            raise ParseError(f"arity mismatch: {name} expects {self.arity[name]} "
                             f"argument(s), got {len(args)}", tok[2], tok[3])
        return App(name, args)


def parse_presentation(text: str) -> Presentation:
    return _Parser(text).parse()


def parse_term(text: str, signature: Signature, context: int) -> Term:
    p = _Parser(text)
    p.arity = signature.arity
    t = p.term(context)
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2], tok[3])
    return t


def format_term(t: Term) -> str:
    return str(t)


def format_presentation(p: Presentation) -> str:
    lines = [f"theory {p.name};"]
    for name, ar in p.signature.operations:
        lines.append(f"op {name}/{ar};")
    for eq in p.equations:
        lines.append(f"eq {eq.context}: {eq.left} = {eq.right};")
    lines.append("end")
    return "\n".join(lines) + "\n"
