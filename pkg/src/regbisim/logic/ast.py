"""Formula syntax trees. Positions are carried but ignored by equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str
    pos: int | None = field(default=None, compare=False, repr=False)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Lit:
    """Word literal, kept as source text until an alphabet is known."""

    text: str
    pos: int | None = field(default=None, compare=False, repr=False)

    def __str__(self):
        return '"' + self.text + '"'


@dataclass(frozen=True)
class Num:
    """Binary numeral literal, most significant digit first."""

    digits: str
    pos: int | None = field(default=None, compare=False, repr=False)

    def __str__(self):
        return self.digits


Term = Union[Var, Lit, Num]


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class TrueF(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class FalseF(Formula):
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __str__(self):
        return f"!{_wrap(self.body)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} | {_wrap(self.right)}"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} => {_wrap(self.right)}"


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} <=> {_wrap(self.right)}"


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple[str, ...]
    body: Formula

    def __str__(self):
        return f"E {', '.join(self.vars)} . {self.body}"


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple[str, ...]
    body: Formula

    def __str__(self):
        return f"A {', '.join(self.vars)} . {self.body}"


@dataclass(frozen=True)
class Prefix(Formula):
    x: Term
    y: Term

    def __str__(self):
        return f"{self.x} <=p {self.y}"


@dataclass(frozen=True)
class EqLen(Formula):
    x: Term
    y: Term

    def __str__(self):
        return f"eqlen({self.x}, {self.y})"


@dataclass(frozen=True)
class SuccP(Formula):
    x: Term
    y: Term

    def __str__(self):
        return f"succp({self.x}, {self.y})"


@dataclass(frozen=True)
class Last(Formula):
    symbol: str
    x: Term

    def __str__(self):
        return f"last_{self.symbol}({self.x})"


@dataclass(frozen=True)
class Eq(Formula):
    x: Term
    y: Term

    def __str__(self):
        return f"{self.x} = {self.y}"


@dataclass(frozen=True)
class InLang(Formula):
    x: Term
    name: str

    def __str__(self):
        return f"{self.x} in lang({self.name})"


@dataclass(frozen=True)
class Add(Formula):
    """``y = x + z`` on binary numerals."""

    x: Term
    z: Term
    y: Term

    def __str__(self):
        return f"add({self.x}, {self.z}, {self.y})"


@dataclass(frozen=True)
class RelApp(Formula):
    name: str
    args: tuple[Term, ...]

    def __str__(self):
        return f"{self.name}({', '.join(map(str, self.args))})"


_ATOMS = (TrueF, FalseF, Prefix, EqLen, SuccP, Last, Eq, InLang, Add, RelApp)


def _wrap(f: Formula) -> str:
    return str(f) if isinstance(f, _ATOMS + (Not,)) else f"({f})"


def terms(f: Formula) -> tuple[Term, ...]:
    if isinstance(f, (Prefix, EqLen, SuccP, Eq)):
        return (f.x, f.y)
    if isinstance(f, (Last, InLang)):
        return (f.x,)
    if isinstance(f, Add):
        return (f.x, f.z, f.y)
    if isinstance(f, RelApp):
        return f.args
    return ()


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or, Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def free_vars(f: Formula) -> tuple[str, ...]:
    """Free variables in first-occurrence order."""
    out: dict[str, None] = {}

    def go(g: Formula, bound: frozenset) -> None:
        for t in terms(g):
            if isinstance(t, Var) and t.name not in bound:
                out.setdefault(t.name)
        if isinstance(g, (Exists, Forall)):
            go(g.body, bound | set(g.vars))
        else:
            for c in children(g):
                go(c, bound)

    go(f, frozenset())
    return tuple(out)


def all_vars(f: Formula) -> tuple[str, ...]:
    """Every variable name, free or bound, in first-occurrence order."""
    out: dict[str, None] = {}

    def go(g: Formula) -> None:
        if isinstance(g, (Exists, Forall)):
            for v in g.vars:
                out.setdefault(v)
        for t in terms(g):
            if isinstance(t, Var):
                out.setdefault(t.name)
        for c in children(g):
            go(c)

    go(f)
    return tuple(out)


def conj(*fs: Formula) -> Formula:
    fs = [f for f in fs if not isinstance(f, TrueF)]
    if not fs:
        return TrueF()
    r = fs[0]
    for f in fs[1:]:
        r = And(r, f)
    return r


def disj(*fs: Formula) -> Formula:
    fs = [f for f in fs if not isinstance(f, FalseF)]
    if not fs:
        return FalseF()
    r = fs[0]
    for f in fs[1:]:
        r = Or(r, f)
    return r


def var(*names: str):
    vs = tuple(Var(n) for n in names)
    return vs[0] if len(vs) == 1 else vs
