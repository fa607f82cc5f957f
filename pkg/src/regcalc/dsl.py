"""Tokenizer, AST and recursive-descent parser for the annotation language.

    let f : lp-holder const:6 beta:id k:2 on bounded
    query class(mul(f,f), 2)

Lines are significant; ``#`` starts a comment.  ``pretty`` prints a program
back in a form that reparses to an equal AST.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DslSyntaxError, DuplicateName, UnboundVariable, UnknownFamily
from .families import FAMILY_KINDS

__all__ = [
    "Var", "Add", "Mul", "Conv", "Compose", "Deriv", "Expr", "Decl", "Query",
    "Program", "parse_program", "parse_expr", "pretty", "pretty_expr",
]


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Var:
    name: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Conv:
    left: "Expr"
    right: "Expr"
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Compose:
    outer: "Expr"
    inner: "Expr"
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Deriv:
    expr: "Expr"
    order: int
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


Expr = (Var, Add, Mul, Conv, Compose, Deriv)
_BINARY = {"add": Add, "mul": Mul, "conv": Conv, "compose": Compose}


@dataclass(frozen=True)
class Decl:
    """``let NAME : FAMILY SPEC* [on DOMAIN]``.

    Map specs are kept as text (``id``, ``const:N``, ``table:a,b,c``).
    """

    name: str
    family: str
    grading: str | None = None
    beta: str | None = None
    k: str | None = None
    n: str | None = None
    p: str | None = None
    q: str | None = None
    r: str | None = None
    mode: str | None = None
    domain: str | None = None
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Query:
    expr: object
    order: int
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    items: tuple

    @property
    def decls(self) -> list[Decl]:
        return [x for x in self.items if isinstance(x, Decl)]

    @property
    def queries(self) -> list[Query]:
        return [x for x in self.items if isinstance(x, Query)]


# ---------------------------------------------------------------------------
# tokens

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<punct>[:,()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str   # num, ident, punct, nl, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            out.append(Token("nl", "\\n", line, pos - start + 1))
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "end of input", line, pos - start + 1))
    return out


# ---------------------------------------------------------------------------
# parser

_NUM_KEYS = ("k", "n", "p", "q", "r")


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.bound: set[str] = set()

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected, tok: Token | None = None):
        tok = tok or self.tok
        shown = "end of line" if tok.kind == "nl" else repr(tok.text) if tok.kind != "eof" else tok.text
        raise DslSyntaxError(f"unexpected {shown}", tok.line, tok.col, expected)

    def take(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect_punct(self, ch: str) -> Token:
        if self.tok.kind == "punct" and self.tok.text == ch:
            return self.take()
        self.fail([repr(ch)])

    def expect_word(self, *words) -> Token:
        if self.tok.kind == "ident" and self.tok.text in words:
            return self.take()
        self.fail([repr(w) for w in words])

    def ident(self) -> Token:
        if self.tok.kind == "ident":
            return self.take()
        self.fail(["identifier"])

    def number(self) -> str:
        if self.tok.kind == "num" or (self.tok.kind == "ident" and self.tok.text == "inf"):
            return self.take().text
        self.fail(["integer", "'inf'"])

    def integer(self) -> int:
        if self.tok.kind == "num":
            return int(self.take().text)
        self.fail(["integer"])

    def end_of_line(self):
        if self.tok.kind in ("nl", "eof"):
            if self.tok.kind == "nl":
                self.take()
            return
        self.fail(["end of line"])

    # program ---------------------------------------------------------
    def program(self) -> Program:
        items = []
        while self.tok.kind != "eof":
            if self.tok.kind == "nl":
                self.take()
                continue
            if self.tok.kind == "ident" and self.tok.text == "let":
                items.append(self.decl())
            elif self.tok.kind == "ident" and self.tok.text == "query":
                items.append(self.query())
            else:
                self.fail(["'let'", "'query'"])
            self.end_of_line()
        return Program(tuple(items))

    def decl(self) -> Decl:
        start = self.take()
        name_tok = self.ident()
        if name_tok.text in self.bound:
            raise DuplicateName(f"duplicate name {name_tok.text}", name_tok.line, name_tok.col)
        self.expect_punct(":")
        fam_tok = self.tok
        if fam_tok.kind != "ident":
            self.fail([repr(f) for f in FAMILY_KINDS])
        if fam_tok.text not in FAMILY_KINDS:
            raise UnknownFamily(
                f"unknown family {fam_tok.text}; expected one of {', '.join(FAMILY_KINDS)}",
                fam_tok.line, fam_tok.col)
        self.take()
        fields: dict[str, str] = {}

        def put(key: str, value: str, tok: Token):
            if key in fields:
                raise DslSyntaxError(f"{key} given twice", tok.line, tok.col)
            fields[key] = value

        spec_words = ["'const'", "'id'", "'table'", "'beta'", "'mode'", "'on'"] + [f"'{k}'" for k in _NUM_KEYS]
        while self.tok.kind == "ident" and self.tok.text != "on":
            t = self.tok
            if t.text in ("const", "id", "table"):
                put("grading", self.map_spec(), t)
            elif t.text == "beta":
                self.take()
                self.expect_punct(":")
                put("beta", self.map_spec(), t)
            elif t.text in _NUM_KEYS:
                self.take()
                self.expect_punct(":")
                put(t.text, self.number(), t)
            elif t.text == "mode":
                self.take()
                self.expect_punct(":")
                put("mode", self.expect_word("strict", "int").text, t)
            else:
                self.fail(spec_words)
        if self.tok.kind == "ident" and self.tok.text == "on":
            self.take()
            fields["domain"] = self.expect_word("bounded", "unbounded").text
        elif self.tok.kind not in ("nl", "eof"):
            self.fail(spec_words + ["end of line"])
        self.bound.add(name_tok.text)
        return Decl(name_tok.text, fam_tok.text, pos=(start.line, start.col), **fields)

    def map_spec(self) -> str:
        t = self.expect_word("const", "id", "table")
        if t.text == "id":
            return "id"
        self.expect_punct(":")
        if t.text == "const":
            return f"const:{self.number()}"
        vals = [self.number()]
        while self.tok.kind == "punct" and self.tok.text == ",":
            self.take()
            vals.append(self.number())
        return "table:" + ",".join(vals)

    def query(self) -> Query:
        start = self.take()
        self.expect_word("class")
        self.expect_punct("(")
        e = self.expr()
        self.expect_punct(",")
        order = self.integer()
        self.expect_punct(")")
        return Query(e, order, (start.line, start.col))

    def expr(self):
        t = self.tok
        if t.kind != "ident":
            self.fail(["identifier", "'add'", "'mul'", "'conv'", "'compose'", "'deriv'"])
        nxt = self.toks[self.i + 1]
        is_call = nxt.kind == "punct" and nxt.text == "("
        if is_call and t.text in _BINARY:
            self.take()
            self.take()
            a = self.expr()
            self.expect_punct(",")
            b = self.expr()
            self.expect_punct(")")
            return _BINARY[t.text](a, b, (t.line, t.col))
        if is_call and t.text == "deriv":
            self.take()
            self.take()
            a = self.expr()
            self.expect_punct(",")
            n_tok = self.tok
            order = self.integer()
            if order < 1:
                raise DslSyntaxError("deriv order must be >= 1", n_tok.line, n_tok.col)
            self.expect_punct(")")
            return Deriv(a, order, (t.line, t.col))
        self.take()
        if t.text not in self.bound:
            raise UnboundVariable(f"unbound variable {t.text}", t.line, t.col)
        return Var(t.text, (t.line, t.col))


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_expr(text: str, names=()) -> object:
    p = _Parser(text)
    p.bound.update(names)
    e = p.expr()
    if p.tok.kind not in ("nl", "eof"):
        p.fail(["end of input"])
    return e


# ---------------------------------------------------------------------------
# printing

def pretty_expr(e) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Deriv):
        return f"deriv({pretty_expr(e.expr)},{e.order})"
    name = {Add: "add", Mul: "mul", Conv: "conv", Compose: "compose"}[type(e)]
    a, b = (e.outer, e.inner) if isinstance(e, Compose) else (e.left, e.right)
    return f"{name}({pretty_expr(a)},{pretty_expr(b)})"


def pretty_decl(d: Decl) -> str:
    parts = [f"let {d.name} : {d.family}"]
    if d.grading:
        parts.append(d.grading)
    if d.beta:
        parts.append(f"beta:{d.beta}")
    for key in _NUM_KEYS:
        v = getattr(d, key)
        if v is not None:
            parts.append(f"{key}:{v}")
    if d.mode:
        parts.append(f"mode:{d.mode}")
    if d.domain:
        parts.append(f"on {d.domain}")
    return " ".join(parts)


def pretty(program: Program) -> str:
    lines = []
    for item in program.items:
        if isinstance(item, Decl):
            lines.append(pretty_decl(item))
        else:
            lines.append(f"query class({pretty_expr(item.expr)}, {item.order})")
    return "\n".join(lines) + "\n"
