"""Regular expressions over tuple letters, and prefix-rewriting relations.

Syntax, loosest first: ``a | b``, concatenation, postfix ``* + ?``. Atoms:
a run of symbol characters (split by longest match against the alphabet,
so ``pXX'`` is three letters), ``.`` for any base symbol, ``[s t]`` or
``[^s t]`` for symbol classes, ``()`` for the empty word, ``(e)`` for
grouping, and ``<c1, ..., ck>`` for a k-tape letter whose components are
symbols, ``_`` (pad), ``.`` or classes. A bare symbol is only a letter on
one tape.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import _mdd as M
from .automata import Automaton, AutomataError, TapedAlphabet, _SetTable, _determinize, from_dfa


class RegexError(AutomataError):
    pass


_TOK = re.compile(r"\s+|(?P<op>[|*+?().<>,_\[\]^])|(?P<sym>[A-Za-z0-9'#$@%~!/-]+)")


@dataclass(frozen=True)
class _Node:
    kind: str  # "letter", "eps", "cat", "alt", "star"
    parts: tuple = ()
    letter: tuple = ()  # per tape: frozenset of allowed value indices


class _Parser:
    def __init__(self, text: str, alph: TapedAlphabet):
        self.alph = alph
        self.toks = []
        i = 0
        while i < len(text):
            m = _TOK.match(text, i)
            if not m:
                raise RegexError(f"bad character {text[i]!r} at offset {i}")
            if m.group("op"):
                self.toks.append(("op", m.group("op"), i))
            elif m.group("sym"):
                self.toks.append(("sym", m.group("sym"), i))
            i = m.end()
        self.toks.append(("eof", "", len(text)))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def eat(self, v: str):
        k, t, pos = self.peek()
        if k != "op" or t != v:
            raise RegexError(f"expected {v!r} at offset {pos}, found {t!r}")
        self.i += 1

    def alt(self) -> _Node:
        parts = [self.cat()]
        while self.peek()[:2] == ("op", "|"):
            self.i += 1
            parts.append(self.cat())
        return parts[0] if len(parts) == 1 else _Node("alt", tuple(parts))

    def cat(self) -> _Node:
        parts = []
        while True:
            k, t, _ = self.peek()
            if k == "eof" or (k == "op" and t in "|)>,]"):
                break
            parts.append(self.postfix())
        if not parts:
            return _Node("eps")
        return parts[0] if len(parts) == 1 else _Node("cat", tuple(parts))

    def postfix(self) -> _Node:
        n = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] in "*+?":
            op = self.peek()[1]
            self.i += 1
            if op == "*":
                n = _Node("star", (n,))
            elif op == "+":
                n = _Node("cat", (n, _Node("star", (n,))))
            else:
                n = _Node("alt", (n, _Node("eps")))
        return n

    def component(self, allow_pad: bool):
        b = self.alph.base
        k, t, pos = self.peek()
        if k == "op" and t == "_" and allow_pad:
            self.i += 1
            return frozenset([self.alph.pad])
        if k == "op" and t == ".":
            self.i += 1
            return frozenset(range(len(b)))
        if k == "op" and t == "[":
            self.i += 1
            neg = False
            if self.peek()[:2] == ("op", "^"):
                neg = True
                self.i += 1
            vals = set()
            while self.peek()[0] == "sym":
                vals.update(b.index(s) for s in b.word(self.peek()[1]))
                self.i += 1
            self.eat("]")
            if neg:
                vals = set(range(len(b))) - vals
            return frozenset(vals)
        if k == "sym":
            w = b.word(t)
            if len(w) != 1:
                raise RegexError(f"{t!r} is not a single symbol (offset {pos})")
            self.i += 1
            return frozenset([b.index(w[0])])
        raise RegexError(f"expected a letter component at offset {pos}, found {t!r}")

    def atom(self) -> _Node:
        k, t, pos = self.peek()
        K = self.alph.tapes
        if k == "op" and t == "(":
            self.i += 1
            if self.peek()[:2] == ("op", ")"):
                self.i += 1
                return _Node("eps")
            n = self.alt()
            self.eat(")")
            return n
        if k == "op" and t == "<":
            self.i += 1
            comps = [self.component(True)]
            while self.peek()[:2] == ("op", ","):
                self.i += 1
                comps.append(self.component(True))
            self.eat(">")
            if len(comps) != K:
                raise RegexError(f"letter at offset {pos} has {len(comps)} components, need {K}")
            return _Node("letter", letter=tuple(comps))
        if K != 1:
            raise RegexError(f"bare letter at offset {pos} on a {K}-tape expression; use <...>")
        if k == "sym":
            self.i += 1
            w = self.alph.base.word(t)
            parts = tuple(_Node("letter", letter=(frozenset([self.alph.base.index(s)]),)) for s in w)
            return parts[0] if len(parts) == 1 else _Node("cat", parts)
        if k == "op" and t in ".[":
            return _Node("letter", letter=(self.component(False),))
        raise RegexError(f"unexpected {t!r} at offset {pos}")


def _glushkov(root: _Node):
    """Positions, nullable, first, last and follow sets."""
    letters: list[tuple] = []
    follow: dict[int, set[int]] = {}

    def go(n: _Node):
        if n.kind == "eps":
            return True, set(), set()
        if n.kind == "letter":
            p = len(letters)
            letters.append(n.letter)
            follow[p] = set()
            return False, {p}, {p}
        if n.kind == "alt":
            nul, fi, la = False, set(), set()
            for c in n.parts:
                cn, cf, cl = go(c)
                nul |= cn
                fi |= cf
                la |= cl
            return nul, fi, la
        if n.kind == "cat":
            nul, fi, la = True, set(), set()
            for c in n.parts:
                cn, cf, cl = go(c)
                for p in la:
                    follow[p] |= cf
                if nul:
                    fi |= cf
                la = (la | cl) if cn else cl
                nul = nul and cn
            return nul, fi, la
        if n.kind == "star":
            cn, cf, cl = go(n.parts[0])
            for p in cl:
                follow[p] |= cf
            return True, cf, cl
        raise AssertionError(n.kind)

    nul, first, last = go(root)
    return letters, nul, first, last, follow


def compile_regex(text: str, alph: TapedAlphabet) -> Automaton:
    p = _Parser(text, alph)
    root = p.alt()
    if p.peek()[0] != "eof":
        raise RegexError(f"trailing input at offset {p.peek()[2]}")
    letters, nullable, first, last, follow = _glushkov(root)
    tab = _SetTable()
    none = M.leaf(tab.get(()))
    width = alph.width
    memo: dict = {}
    start = len(letters)  # extra start state
    succ = {start: first, **follow}
    cubes = [M.cube(list(l), width, M.leaf(tab.get((i,))), none) for i, l in enumerate(letters)]
    step_cache: dict[int, int] = {}

    def set_step(q: int) -> int:
        r = step_cache.get(q)
        if r is None:
            r = none
            for t in sorted(succ[q]):
                r = M.apply2(r, cubes[t], width, tab.union, memo)
            step_cache[q] = r
        return r

    finals = set(last) | ({start} if nullable else set())
    return _determinize(alph, tab, tab.get((start,)), set_step, finals.__contains__)


def rewrite_relation(lhs, rhs, alph: TapedAlphabet) -> Automaton:
    """Pairs (lhs·u, rhs·u) for every word u, over two tapes."""
    if alph.tapes != 2:
        raise RegexError("rewrite relations have two tapes")
    b = alph.base
    L = tuple(b.index(s) for s in b.word(lhs))
    R = tuple(b.index(s) for s in b.word(rhs))
    pad = alph.pad
    gap = abs(len(L) - len(R))
    cap = max(len(L), len(R))
    # state: (position capped, which tape is ahead, pending u-symbols)
    ids: dict = {}
    keys: list = []

    def sid(key) -> int:
        if key not in ids:
            ids[key] = len(keys)
            keys.append(key)
        return ids[key]

    SINK = sid("sink")
    start = sid((0, 0, (), False, False))

    def step(s: int, letter) -> int:
        key = keys[s] if s < len(keys) else "sink"
        if key == "sink":
            return SINK
        i, ahead, pend, xend, yend = key
        pend = list(pend)
        for tape, fixed in ((0, L), (1, R)):
            v = letter[tape]
            ended = xend if tape == 0 else yend
            if v == pad:
                if i < len(fixed):
                    return SINK
                if tape == 0:
                    xend = True
                else:
                    yend = True
                continue
            if ended:
                return SINK
            if i < len(fixed):
                if v != fixed[i]:
                    return SINK
                continue
            # v is the next symbol of u as read on this tape
            me = tape + 1
            if not pend or ahead == me:
                pend.append(v)
                ahead = me
            elif pend[0] == v:
                pend.pop(0)
            else:
                return SINK
        if len(pend) > gap:
            return SINK
        if not pend:
            ahead = 0
        return sid((min(i + 1, cap), ahead, tuple(pend), xend, yend))

    def is_final(s: int) -> bool:
        key = keys[s]
        return key != "sink" and key[0] >= cap and not key[2]

    return from_dfa(alph, start, is_final, step)
