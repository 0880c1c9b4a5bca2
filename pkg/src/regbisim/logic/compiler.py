"""Compile formulas over the universal automatic structure to automata."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

from .. import automata as A
from ..automata import Alphabet, Automaton, TapedAlphabet
from . import builtins as B
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
    all_vars,
    free_vars,
)


class CompileError(Exception):
    pass


class UnboundName(CompileError):
    pass


class ArityMismatch(CompileError):
    pass


@dataclass
class Environment:
    base: Alphabet
    bindings: dict[str, Automaton] = field(default_factory=dict)

    def __post_init__(self):
        for name, a in self.bindings.items():
            self._check(name, a)

    def _check(self, name: str, a: Automaton) -> None:
        if a.base != self.base:
            raise CompileError(f"binding {name!r} uses a different alphabet")

    def bind(self, name: str, a: Automaton) -> None:
        self._check(name, a)
        self.bindings[name] = a

    def lookup(self, name: str) -> Automaton:
        try:
            return self.bindings[name]
        except KeyError:
            raise UnboundName(name) from None

    def child(self, **extra: Automaton) -> "Environment":
        env = Environment(self.base, dict(self.bindings))
        for k, v in extra.items():
            env.bind(k, v)
        return env


@dataclass(frozen=True)
class CompiledRelation:
    formula: Formula
    free_vars: tuple[str, ...]
    automaton: Automaton | None
    truth: bool | None = None

    @property
    def is_sentence(self) -> bool:
        return not self.free_vars


# a compiled node: variables sorted by rank, and either an automaton or a bool
Node = tuple


class Compiler:
    """Holds an environment and a structural memo; safe to share across threads."""

    def __init__(self, env: Environment):
        self.env = env
        self.base = env.base
        self._memo: dict = {}
        self._lock = threading.Lock()

    def alphabet(self, k: int) -> TapedAlphabet:
        return TapedAlphabet(self.base, k)

    # ------------------------------------------------------------ public
    def compile(self, f: Formula, order: Sequence[str] | None = None) -> CompiledRelation:
        fv = free_vars(f)
        if order is None:
            order = fv
        else:
            order = tuple(order)
            if not set(fv) <= set(order) or len(set(order)) != len(order):
                raise CompileError(f"variable order {order} does not cover free variables {fv}")
        rank = {v: i for i, v in enumerate(order)}
        for v in all_vars(f):
            rank.setdefault(v, len(rank))
        vs, val = self._go(f, rank)
        if not order:
            return CompiledRelation(f, (), None, bool(val))
        if not vs:
            return CompiledRelation(f, tuple(order), self._align(((), val), tuple(order)))
        tape_map = [order.index(v) for v in vs]
        return CompiledRelation(f, tuple(order), A.lift(val, len(order), tape_map))

    def decide(self, f: Formula) -> bool:
        fv = free_vars(f)
        if fv:
            raise CompileError(f"not a sentence; free variables {fv}")
        return self.compile(f).truth

    # ------------------------------------------------------------ core
    def _go(self, f: Formula, rank: dict) -> Node:
        fv = tuple(sorted(free_vars(f), key=rank.__getitem__))
        key = (f, fv)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        res = self._compute(f, rank, fv)
        with self._lock:
            self._memo.setdefault(key, res)
        return res

    def _align(self, node: Node, target: tuple) -> Automaton:
        vs, val = node
        if not vs:
            return A.universal(self.alphabet(len(target))) if val else A.empty(self.alphabet(len(target)))
        return A.lift(val, len(target), [target.index(v) for v in vs])

    def _binary(self, l: Node, r: Node, op, rank: dict) -> Node:
        if not l[0] and not r[0]:
            return (), op(bool(l[1]), bool(r[1]))
        target = tuple(sorted(set(l[0]) | set(r[0]), key=rank.__getitem__))
        return target, A.combine(self._align(l, target), self._align(r, target), op)

    def _compute(self, f: Formula, rank: dict, fv: tuple) -> Node:
        if isinstance(f, TrueF):
            return (), True
        if isinstance(f, FalseF):
            return (), False
        if isinstance(f, Not):
            vs, val = self._go(f.body, rank)
            return (vs, (not val) if not vs else A.complement(val))
        if isinstance(f, And):
            l = self._go(f.left, rank)
            if not l[0] and not l[1]:
                return (), False
            return self._binary(l, self._go(f.right, rank), lambda x, y: x and y, rank)
        if isinstance(f, Or):
            l = self._go(f.left, rank)
            if not l[0] and l[1]:
                return (), True
            return self._binary(l, self._go(f.right, rank), lambda x, y: x or y, rank)
        if isinstance(f, Implies):
            return self._binary(self._go(f.left, rank), self._go(f.right, rank), lambda x, y: (not x) or y, rank)
        if isinstance(f, Iff):
            return self._binary(self._go(f.left, rank), self._go(f.right, rank), lambda x, y: x == y, rank)
        if isinstance(f, Exists):
            conjs = _conjuncts(f.body)
            if len(conjs) > 1:
                return self._exists_conj(f.vars, conjs, rank)
            return self._exists(f.vars, self._go(f.body, rank))
        if isinstance(f, Forall):
            conjs = _negated_conjuncts(f.body)
            if len(conjs) > 1:
                vs, val = self._exists_conj(f.vars, conjs, rank)
            else:
                vs, val = self._go(f.body, rank)
                inner = (vs, (not val) if not vs else A.complement(val))
                vs, val = self._exists(f.vars, inner)
            return (vs, (not val) if not vs else A.complement(val))
        return self._atom(f, rank)

    def _exists_conj(self, names, conjs, rank: dict) -> Node:
        """Early quantification: join only the conjuncts mentioning a variable, then drop it."""
        nodes = []
        for c in conjs:
            vs, val = self._go(c, rank)
            if not vs:
                if not val:
                    return (), False
                continue
            nodes.append((vs, val))
        pending = list(dict.fromkeys(names))
        and_ = lambda x, y: x and y  # noqa: E731
        while pending:
            def cost(v):
                return len(set().union(*[n[0] for n in nodes if v in n[0]]))

            v = min(pending, key=lambda v: (cost(v), pending.index(v)))
            pending.remove(v)
            group = [n for n in nodes if v in n[0]]
            if not group:
                continue
            nodes = [n for n in nodes if v not in n[0]]
            acc = group[0]
            for n in group[1:]:
                acc = self._binary(acc, n, and_, rank)
            acc = self._exists((v,), acc)
            if not acc[0]:
                if not acc[1]:
                    return (), False
                continue
            nodes.append(acc)
        if not nodes:
            return (), True
        acc = nodes[0]
        for n in nodes[1:]:
            acc = self._binary(acc, n, and_, rank)
        return acc

    def _exists(self, names, node: Node) -> Node:
        vs, val = node
        for v in names:
            if v not in vs:
                continue
            if len(vs) == 1:
                return (), not val.is_empty()
            i = vs.index(v)
            val = A.project(val, i)
            vs = vs[:i] + vs[i + 1 :]
        return vs, val

    # ------------------------------------------------------------ atoms
    def _atom_automaton(self, f: Formula):
        base = self.base
        if isinstance(f, Prefix):
            return B.prefix(base), (f.x, f.y)
        if isinstance(f, EqLen):
            return B.eqlen(base), (f.x, f.y)
        if isinstance(f, SuccP):
            return B.succ_prefix(base), (f.x, f.y)
        if isinstance(f, Eq):
            return B.equal(base), (f.x, f.y)
        if isinstance(f, Last):
            if f.symbol not in base.symbols:
                raise CompileError(f"last_{f.symbol}: symbol not in alphabet")
            return B.last(base, f.symbol), (f.x,)
        if isinstance(f, Add):
            return B.add(base), (f.x, f.z, f.y)
        if isinstance(f, InLang):
            a = self.env.lookup(f.name)
            if a.tapes != 1:
                raise ArityMismatch(f"{f.name} has {a.tapes} tapes, used as a language")
            return a, (f.x,)
        if isinstance(f, RelApp):
            a = self.env.lookup(f.name)
            if a.tapes != len(f.args):
                raise ArityMismatch(f"{f.name} has {a.tapes} tapes, applied to {len(f.args)} arguments")
            return a, tuple(f.args)
        raise CompileError(f"unknown formula node {type(f).__name__}")

    def literal_word(self, t) -> tuple[str, ...]:
        if isinstance(t, Num):
            B._digits(self.base)
            return B.numeral_word(t.digits)
        return self.base.word(t.text)

    def _atom(self, f: Formula, rank: dict) -> Node:
        a, args = self._atom_automaton(f)
        k = len(args)
        drop = []
        first: dict[str, int] = {}
        for i, t in enumerate(args):
            if isinstance(t, (Lit, Num)):
                lit = A.from_words(self.alphabet(1), [(self.literal_word(t),)])
                a = A.intersect(a, A.lift(lit, k, (i,)))
                drop.append(i)
            elif t.name in first:
                a = A.intersect(a, A.lift(B.equal(self.base), k, (first[t.name], i)))
                drop.append(i)
            else:
                first[t.name] = i
        if len(drop) == k:
            return (), not a.is_empty()
        for i in sorted(drop, reverse=True):
            a = A.project(a, i)
        names = [t.name for i, t in enumerate(args) if i not in drop]
        target = tuple(sorted(names, key=rank.__getitem__))
        return target, A.lift(a, len(target), [target.index(v) for v in names])


def _conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _negated_conjuncts(f: Formula) -> list:
    """Conjuncts of the negation of ``f``, pushing the negation through => and |."""
    if isinstance(f, Implies):
        return _conjuncts(f.left) + _negated_conjuncts(f.right)
    if isinstance(f, Or):
        return _negated_conjuncts(f.left) + _negated_conjuncts(f.right)
    if isinstance(f, Not):
        return _conjuncts(f.body)
    return [Not(f)]


def compile_formula(f: Formula, env: Environment, free: Sequence[str] | None = None) -> CompiledRelation:
    return Compiler(env).compile(f, free)


def decide_sentence(f: Formula, env: Environment) -> bool:
    return Compiler(env).decide(f)


def compile_text(text: str, env: Environment, free: Sequence[str] | None = None) -> CompiledRelation:
    from .parser import parse_formula

    return compile_formula(parse_formula(text), env, free)
