"""Recursive-descent parser for the formula surface syntax."""

from __future__ import annotations

import re

from .ast import (
    Add,
    And,
    Eq,
    EqLen,
    Exists,
    FalseF,
    Forall,
    Formula,
    Iff,
    Implies,
    InLang,
    Last,
    Lit,
    Not,
    Num,
    Or,
    Prefix,
    RelApp,
    SuccP,
    TrueF,
    Var,
)


class SyntaxError(Exception):  # noqa: A001 - deliberate, mirrors the error contract
    def __init__(self, position: int, expected, found: str = ""):
        self.position = position
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"at offset {position}: expected one of {{{exp}}}, found {found or 'end of input'!r}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<str>"[^"]*")
  | (?P<num>[01]+(?![A-Za-z0-9_']))
  | (?P<op><=>|<=p|=>|!=|[!&|=.,()])
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

KEYWORDS = {"true", "false", "E", "A", "in", "lang", "succp", "eqlen", "add"}


def tokenize(text: str):
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise SyntaxError(i, {"token"}, text[i])
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), i))
        i = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind in ("op", "id") and v == value

    def take(self, value: str):
        kind, v, pos = self.peek()
        if kind in ("op", "id") and v == value:
            self.i += 1
            return pos
        raise SyntaxError(pos, {value}, v)

    def fail(self, expected):
        _, v, pos = self.peek()
        raise SyntaxError(pos, expected, v)

    # phi grammar, loosest binding first
    def formula(self) -> Formula:
        left = self.implication()
        while self.at("<=>"):
            self.i += 1
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("=>"):
            self.i += 1
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("|"):
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, v, pos = self.peek()
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if kind == "id" and v in ("E", "A") and self.peek(1)[0] == "id":
            self.i += 1
            names = [self.ident()]
            while self.at(","):
                self.i += 1
                names.append(self.ident())
            if not self.at("."):
                self.fail({",", "."})
            self.i += 1
            body = self.formula()
            return (Exists if v == "E" else Forall)(tuple(names), body)
        return self.primary()

    def ident(self) -> str:
        kind, v, pos = self.peek()
        if kind != "id" or v in KEYWORDS:
            raise SyntaxError(pos, {"variable"}, v)
        self.i += 1
        return v

    def primary(self) -> Formula:
        kind, v, pos = self.peek()
        if self.at("("):
            self.i += 1
            f = self.formula()
            if not self.at(")"):
                self.fail({")", "&", "|", "=>", "<=>"})
            self.i += 1
            return f
        if kind == "id":
            if v == "true":
                self.i += 1
                return TrueF()
            if v == "false":
                self.i += 1
                return FalseF()
            if self.peek(1)[1] == "(" and self.peek(1)[0] == "op":
                return self.application()
        if kind in ("id", "str", "num"):
            return self.infix_atom()
        self.fail({"formula"})

    def application(self) -> Formula:
        kind, name, pos = self.peek()
        self.i += 1
        self.take("(")
        args = [self.term()]
        while self.at(","):
            self.i += 1
            args.append(self.term())
        if not self.at(")"):
            self.fail({",", ")"})
        self.i += 1
        if name in ("succp", "eqlen"):
            self._arity(name, args, 2, pos)
            return (SuccP if name == "succp" else EqLen)(*args)
        if name == "add":
            self._arity(name, args, 3, pos)
            return Add(*args)
        if name.startswith("last_") and len(name) > 5:
            self._arity(name, args, 1, pos)
            return Last(name[5:], args[0])
        return RelApp(name, tuple(args))

    @staticmethod
    def _arity(name, args, n, pos):
        if len(args) != n:
            raise SyntaxError(pos, {f"{n} arguments for {name}"}, f"{len(args)} arguments")

    def infix_atom(self) -> Formula:
        left = self.term()
        kind, v, pos = self.peek()
        if self.at("="):
            self.i += 1
            return Eq(left, self.term())
        if self.at("!="):
            self.i += 1
            return Not(Eq(left, self.term()))
        if self.at("<=p"):
            self.i += 1
            return Prefix(left, self.term())
        if self.at("in"):
            self.i += 1
            self.take("lang")
            self.take("(")
            _, name, npos = self.peek()
            if self.peek()[0] != "id":
                raise SyntaxError(npos, {"language name"}, name)
            self.i += 1
            self.take(")")
            return InLang(left, name)
        self.fail({"=", "!=", "<=p", "in"})

    def term(self):
        kind, v, pos = self.peek()
        if kind == "str":
            self.i += 1
            return Lit(v[1:-1], pos)
        if kind == "num":
            self.i += 1
            return Num(v, pos)
        if kind == "id" and v not in KEYWORDS:
            self.i += 1
            return Var(v, pos)
        raise SyntaxError(pos, {"variable", "string", "numeral"}, v)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "eof":
        p.fail({"end of input", "&", "|", "=>", "<=>"})
    return f


def parse_term(text: str):
    p = _Parser(text)
    t = p.term()
    if p.peek()[0] != "eof":
        p.fail({"end of input"})
    return t
