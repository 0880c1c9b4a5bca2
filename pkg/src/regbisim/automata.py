"""Deterministic automata over padded product alphabets.

A k-tape automaton reads convolutions ``w_1 ⊗ ... ⊗ w_k``: one letter per
position, each letter a k-tuple of base symbols or the pad ``⊥``. Every
automaton here is a complete DFA whose per-state transition function is an
MDD (see ``_mdd``). All constructors route through ``_build``, which
intersects with the padding-validity automaton, minimizes and renumbers
states breadth-first. Two automata with the same language are therefore
structurally equal, so ``==`` is language equality.
"""

from __future__ import annotations

import contextlib
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import _mdd as M

PAD = "⊥"

Word = tuple  # tuple of symbol strings
Letter = tuple  # tuple of symbol strings, PAD allowed


class AutomataError(Exception):
    pass


class AlphabetMismatch(AutomataError):
    pass


class BadTapeIndex(AutomataError):
    pass


class ResourceExceeded(AutomataError):
    def __init__(self, states: int, cap: int):
        super().__init__(f"automaton construction exceeded {cap} states")
        self.states = states
        self.cap = cap


class FormatError(AutomataError):
    pass


# state budget shared by every construction on this thread
_budget = threading.local()


@contextlib.contextmanager
def state_budget(cap: int | None):
    old = getattr(_budget, "cap", None)
    _budget.cap = cap
    try:
        yield
    finally:
        _budget.cap = old


def _check_budget(n: int) -> None:
    cap = getattr(_budget, "cap", None)
    if cap is not None and n > cap:
        raise ResourceExceeded(n, cap)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        object.__setattr__(self, "symbols", syms)
        if not syms:
            raise AutomataError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise AutomataError("alphabet symbols must be distinct")
        if PAD in syms or "_" in syms:
            raise AutomataError("pad symbol cannot be part of the alphabet")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(syms)})

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, sym: str) -> int:
        if sym == PAD:
            return len(self.symbols)
        try:
            return self._index[sym]
        except KeyError:
            raise AutomataError(f"symbol {sym!r} not in alphabet") from None

    def symbol(self, i: int) -> str:
        return PAD if i == len(self.symbols) else self.symbols[i]

    def word(self, text: str | Sequence[str]) -> Word:
        """Read a word given as a symbol sequence or as a string.

        Strings are split on whitespace when they contain any, and otherwise
        tokenized by longest match against the symbols.
        """
        if not isinstance(text, str):
            w = tuple(text)
            for s in w:
                self.index(s)
            return w
        if any(c.isspace() for c in text):
            return self.word(text.split())
        out = []
        i = 0
        longest = max(len(s) for s in self.symbols)
        while i < len(text):
            for ln in range(min(longest, len(text) - i), 0, -1):
                if text[i : i + ln] in self._index:
                    out.append(text[i : i + ln])
                    i += ln
                    break
            else:
                raise AutomataError(f"cannot read {text!r} at offset {i}")
        return tuple(out)

    def show(self, w: Sequence[str]) -> str:
        if all(len(s) == 1 for s in self.symbols):
            return "".join(w)
        return " ".join(w)


@dataclass(frozen=True)
class TapedAlphabet:
    base: Alphabet
    tapes: int

    def __post_init__(self):
        if self.tapes < 1:
            raise AutomataError("need at least one tape")

    @property
    def width(self) -> int:
        return len(self.base) + 1

    @property
    def pad(self) -> int:
        return len(self.base)

    def with_tapes(self, k: int) -> "TapedAlphabet":
        return TapedAlphabet(self.base, k)

    def letters(self):
        """All effective letters as index tuples, in tuple order."""
        import itertools

        allpad = (self.pad,) * self.tapes
        for t in itertools.product(range(self.width), repeat=self.tapes):
            if t != allpad:
                yield t


def convolve(words: Sequence[Sequence[str]]) -> tuple[Letter, ...]:
    n = max((len(w) for w in words), default=0)
    return tuple(tuple(w[i] if i < len(w) else PAD for w in words) for i in range(n))


def deconvolve(conv: Sequence[Letter], tapes: int | None = None) -> tuple[Word, ...]:
    if tapes is None:
        if not conv:
            raise AutomataError("tape count needed for the empty convolution")
        tapes = len(conv[0])
    out = []
    for j in range(tapes):
        w = []
        padded = False
        for letter in conv:
            s = letter[j]
            if s == PAD:
                padded = True
            elif padded:
                raise AutomataError("pad followed by a symbol")
            else:
                w.append(s)
        out.append(tuple(w))
    return tuple(out)


# ---------------------------------------------------------------- validity

_valid_cache: dict[tuple[int, int], tuple[int, ...]] = {}


def _validity(k: int, width: int) -> tuple[int, ...]:
    """Transition MDDs of the validity DFA; state = mask of padded tapes.

    The full mask doubles as the dead state.
    """
    key = (k, width)
    hit = _valid_cache.get(key)
    if hit is not None:
        return hit
    pad = width - 1
    full = (1 << k) - 1
    dead = M.leaf(full)
    trans = []
    for mask in range(full + 1):
        if mask == full:
            trans.append(dead)
            continue
        memo: dict = {}

        def go(j: int, bits: int) -> int:
            if j == k:
                return dead if bits == full else M.leaf(bits)
            r = memo.get((j, bits))
            if r is not None:
                return r
            if mask >> j & 1:
                kids = [dead] * pad + [go(j + 1, bits | 1 << j)]
            else:
                base = go(j + 1, bits)
                kids = [base] * pad + [go(j + 1, bits | 1 << j)]
            r = M.mk(j, kids)
            memo[(j, bits)] = r
            return r

        trans.append(go(0, 0))
    res = tuple(trans)
    _valid_cache[key] = res
    return res


# ---------------------------------------------------------------- core type


@dataclass(frozen=True, eq=False)
class Automaton:
    """Canonical minimal complete DFA; equality is language equality."""

    alphabet: TapedAlphabet
    trans: tuple[int, ...]
    initial: int
    finals: frozenset
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_key", (self.alphabet, self.trans, self.initial, self.finals))

    def __eq__(self, other):
        return isinstance(other, Automaton) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def tapes(self) -> int:
        return self.alphabet.tapes

    @property
    def base(self) -> Alphabet:
        return self.alphabet.base

    @property
    def num_states(self) -> int:
        return len(self.trans)

    deterministic_complete = True

    def step(self, state: int, letter_idx) -> int:
        return M.evaluate(self.trans[state], letter_idx)

    def accepts_conv(self, conv: Iterable[Letter]) -> bool:
        b = self.base
        s = self.initial
        for letter in conv:
            if len(letter) != self.tapes:
                raise AutomataError("letter arity differs from tape count")
            s = M.evaluate(self.trans[s], tuple(b.index(x) for x in letter))
        return s in self.finals

    def accepts(self, *words) -> bool:
        if len(words) != self.tapes:
            raise AutomataError(f"expected {self.tapes} words, got {len(words)}")
        return self.accepts_conv(convolve([self.base.word(w) for w in words]))

    def padfree_size(self) -> int:
        """Reachable states using letters without any pad.

        For one tape this is the size of the minimal complete DFA over the
        base alphabet alone.
        """
        seen = {self.initial}
        stack = [self.initial]
        pad = self.alphabet.pad
        while stack:
            s = stack.pop()
            for letter, t in M.iter_letters(self.trans[s], self.tapes, self.alphabet.width):
                if pad not in letter and t not in seen:
                    seen.add(t)
                    stack.append(t)
        return len(seen)

    def is_empty(self) -> bool:
        return not self.finals

    def is_universal(self) -> bool:
        return self == universal(self.alphabet)

    def __repr__(self) -> str:
        return f"Automaton(tapes={self.tapes}, states={self.num_states}, finals={len(self.finals)})"


# ---------------------------------------------------------------- building


def _build(alph: TapedAlphabet, init, step: Callable, is_final: Callable) -> Automaton:
    """Explore ``step`` from ``init``, intersect with validity, minimize.

    ``step(s)`` must return an MDD whose leaf payloads are ints naming
    successor states in the caller's own numbering.
    """
    k, width = alph.tapes, alph.width
    valid = _validity(k, width)
    dead_mask = (1 << k) - 1
    ids: dict[tuple[int, int], int] = {}
    pairs: list[tuple[int, int]] = []

    def intern(u: int, mask: int) -> int:
        key = (u, mask)
        i = ids.get(key)
        if i is None:
            if mask == dead_mask:
                key = (-1, dead_mask)
                i = ids.get(key)
                if i is not None:
                    return i
            i = len(pairs)
            ids[key] = i
            pairs.append(key)
            _check_budget(i + 1)
        return i

    memo: dict = {}
    raw: list[int] = []
    finals = []
    start = intern(init, 0)
    i = 0
    while i < len(pairs):
        u, mask = pairs[i]
        if mask == dead_mask:
            raw.append(M.leaf(i))
            finals.append(False)
        else:
            raw.append(M.apply2(step(u), valid[mask], width, intern, memo))
            finals.append(bool(is_final(u)))
        i += 1
    return _minimize(alph, raw, start, finals)


def _minimize(alph: TapedAlphabet, trans: list[int], init: int, finals: list[bool]) -> Automaton:
    n = len(trans)
    blk = [1 if f else 0 for f in finals]
    # Moore refinement with stable block ids: a state's mapped transition
    # function can only change when a successor changed block, so each pass
    # recomputes just the predecessors of the states that moved.
    preds: list[list[int]] = [[] for _ in range(n)]
    for s in range(n):
        for t in M.leaves_in_order(trans[s]):
            preds[t].append(s)
    members: dict[int, list[int]] = {}
    for s in range(n):
        members.setdefault(blk[s], []).append(s)
    sig: list = [None] * n
    fresh = 2
    dirty = set(range(n))
    while dirty:
        memo: dict = {}
        for s in dirty:
            sig[s] = M.map_leaves(trans[s], blk.__getitem__, memo)
        moved = []
        for b in {blk[s] for s in dirty}:
            groups: dict = {}
            for s in members[b]:
                groups.setdefault(sig[s], []).append(s)
            if len(groups) == 1:
                continue
            first = True
            for g in groups.values():
                if first:
                    members[b] = g
                    first = False
                    continue
                nb, fresh = fresh, fresh + 1
                members[nb] = g
                for s in g:
                    blk[s] = nb
                moved.extend(g)
        dirty = {p for t in moved for p in preds[t]}
    memo = {}
    rep: dict[int, int] = {}
    for s in range(n):
        rep.setdefault(blk[s], s)
    qtrans = {b: M.map_leaves(trans[s], blk.__getitem__, memo) for b, s in rep.items()}
    # breadth-first canonical numbering, successors in letter order
    order = {blk[init]: 0}
    queue = [blk[init]]
    i = 0
    while i < len(queue):
        b = queue[i]
        i += 1
        for t in M.leaves_in_order(qtrans[b]):
            if t not in order:
                order[t] = len(queue)
                queue.append(t)
    memo = {}
    out = tuple(M.map_leaves(qtrans[b], order.__getitem__, memo) for b in queue)
    fin = frozenset(order[b] for b in queue if finals[rep[b]])
    return Automaton(alph, out, 0, fin)


def universal(alph: TapedAlphabet) -> Automaton:
    return _build(alph, 0, lambda s: M.leaf(0), lambda s: True)


def empty(alph: TapedAlphabet) -> Automaton:
    return _build(alph, 0, lambda s: M.leaf(0), lambda s: False)


def mdd_from_function(alph: TapedAlphabet, fn: Callable[[tuple], int]) -> int:
    """MDD of a letter function given pointwise (exponential in tapes)."""
    k, width = alph.tapes, alph.width

    def go(j: int, prefix: tuple) -> int:
        if j == k:
            return M.leaf(fn(prefix))
        return M.mk(j, [go(j + 1, prefix + (v,)) for v in range(width)])

    return go(0, ())


def from_dfa(
    alph: TapedAlphabet,
    initial: int,
    finals: Iterable[int],
    step: Callable[[int, tuple], int],
    states: int | None = None,
) -> Automaton:
    """Automaton from a letter-level step function on index tuples.

    ``step`` may return any int; callers use a spare int as a sink.
    ``finals`` is a collection of states or a predicate on them.
    """
    fin = finals if callable(finals) else frozenset(finals).__contains__
    cache: dict[int, int] = {}

    def trans(s: int) -> int:
        r = cache.get(s)
        if r is None:
            r = mdd_from_function(alph, lambda letter: step(s, letter))
            cache[s] = r
        return r

    return _build(alph, initial, trans, fin)


def from_words(alph: TapedAlphabet, tuples: Iterable[Sequence]) -> Automaton:
    """Finite relation given as word tuples."""
    b = alph.base
    convs = []
    for t in tuples:
        if len(t) != alph.tapes:
            raise AutomataError("tuple arity differs from tape count")
        convs.append(tuple(tuple(b.index(x) for x in letter) for letter in convolve([b.word(w) for w in t])))
    # trie over index tuples
    nodes: list[dict] = [{}]
    final = set()
    for c in convs:
        cur = 0
        for letter in c:
            nxt = nodes[cur].get(letter)
            if nxt is None:
                nxt = len(nodes)
                nodes.append({})
                nodes[cur][letter] = nxt
            cur = nxt
        final.add(cur)
    sink = len(nodes)
    return from_dfa(alph, 0, final, lambda s, l: sink if s == sink else nodes[s].get(l, sink))


# ---------------------------------------------------------------- set-valued MDDs


class _SetTable:
    """Interning table for frozensets of states used as MDD leaf payloads."""

    def __init__(self):
        self.sets: list[frozenset] = []
        self.ids: dict[frozenset, int] = {}
        self._union: dict[tuple[int, int], int] = {}

    def get(self, s) -> int:
        s = frozenset(s)
        i = self.ids.get(s)
        if i is None:
            i = len(self.sets)
            self.sets.append(s)
            self.ids[s] = i
        return i

    def union(self, a: int, b: int) -> int:
        if a == b:
            return a
        key = (a, b) if a < b else (b, a)
        r = self._union.get(key)
        if r is None:
            r = self.get(self.sets[a] | self.sets[b])
            self._union[key] = r
        return r


def _determinize(alph: TapedAlphabet, tab: _SetTable, init_set: int, set_step: Callable[[int], int], final_member: Callable[[int], bool]) -> Automaton:
    """Subset construction; ``set_step(q)`` gives an MDD with set-id leaves."""
    width = alph.width
    memo: dict = {}
    step_cache: dict[int, int] = {}

    def step(sid: int) -> int:
        r = step_cache.get(sid)
        if r is None:
            members = sorted(tab.sets[sid])
            r = M.leaf(tab.get(()))
            for q in members:
                r = M.apply2(r, set_step(q), width, tab.union, memo)
            step_cache[sid] = r
        return r

    return _build(alph, init_set, step, lambda sid: any(final_member(q) for q in tab.sets[sid]))


# ---------------------------------------------------------------- boolean ops


def _same(a: Automaton, b: Automaton) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"{a.alphabet} vs {b.alphabet}")


def complement(a: Automaton) -> Automaton:
    return _build(a.alphabet, a.initial, a.trans.__getitem__, lambda s: s not in a.finals)


def _product(a: Automaton, b: Automaton, final_op) -> Automaton:
    _same(a, b)
    width = a.alphabet.width
    ids: dict[tuple[int, int], int] = {}
    pairs: list[tuple[int, int]] = []

    def intern(x: int, y: int) -> int:
        key = (x, y)
        i = ids.get(key)
        if i is None:
            i = len(pairs)
            ids[key] = i
            pairs.append(key)
            _check_budget(i + 1)
        return i

    memo: dict = {}
    start = intern(a.initial, b.initial)

    def step(p: int) -> int:
        x, y = pairs[p]
        return M.apply2(a.trans[x], b.trans[y], width, intern, memo)

    def fin(p: int) -> bool:
        x, y = pairs[p]
        return final_op(x in a.finals, y in b.finals)

    return _build(a.alphabet, start, step, fin)


def intersect(a: Automaton, b: Automaton) -> Automaton:
    return _product(a, b, lambda x, y: x and y)


def union(a: Automaton, b: Automaton) -> Automaton:
    return _product(a, b, lambda x, y: x or y)


def difference(a: Automaton, b: Automaton) -> Automaton:
    return _product(a, b, lambda x, y: x and not y)


def combine(a: Automaton, b: Automaton, op: Callable[[bool, bool], bool]) -> Automaton:
    """Product with an arbitrary boolean acceptance condition."""
    return _product(a, b, op)


def product(a: Automaton, b: Automaton, mode: str = "intersect") -> Automaton:
    if mode == "intersect":
        return intersect(a, b)
    if mode == "union":
        return union(a, b)
    raise ValueError(f"unknown product mode {mode!r}")


# ---------------------------------------------------------------- tapes


def _dead_states(a: Automaton) -> set[int]:
    """States from which no final state is reachable."""
    rev: dict[int, set[int]] = {}
    for s, code in enumerate(a.trans):
        for t in M.leaves_in_order(code):
            rev.setdefault(t, set()).add(s)
    alive = set(a.finals)
    stack = list(alive)
    while stack:
        t = stack.pop()
        for s in rev.get(t, ()):
            if s not in alive:
                alive.add(s)
                stack.append(s)
    return set(range(a.num_states)) - alive


def project(a: Automaton, tape: int) -> Automaton:
    """Existentially quantify one tape away."""
    k = a.tapes
    if not 0 <= tape < k:
        raise BadTapeIndex(f"tape {tape} out of range for {k} tapes")
    if k < 2:
        raise BadTapeIndex("cannot project the only tape; use is_empty")
    alph = a.alphabet.with_tapes(k - 1)
    width, pad = a.alphabet.width, a.alphabet.pad
    dead = _dead_states(a)
    tab = _SetTable()
    nothing = M.leaf(tab.get(()))
    union_memo: dict = {}
    ex_memo: dict = {}

    def ex(code: int) -> int:
        r = ex_memo.get(code)
        if r is not None:
            return r
        if code < 0:
            v = M.leaf_value(code)
            r = nothing if v in dead else M.leaf(tab.get((v,)))
        else:
            tj, ch = M.node(code)
            if tj == tape:
                r = nothing
                for c in ch:
                    r = M.apply2(r, ex(c), width, tab.union, union_memo)
            else:
                r = M.mk(tj - 1 if tj > tape else tj, [ex(c) for c in ch])
        ex_memo[code] = r
        return r

    # a state is final after projection if the quantified tape can run on
    # alone (all other tapes padded) into a final state
    only = [(pad,) * tape + (v,) + (pad,) * (k - tape - 1) for v in range(width - 1)]
    padfinal = set(a.finals)
    changed = True
    while changed:
        changed = False
        for s in range(a.num_states):
            if s not in padfinal and any(M.evaluate(a.trans[s], l) in padfinal for l in only):
                padfinal.add(s)
                changed = True
    return _determinize(alph, tab, tab.get((a.initial,)), lambda q: ex(a.trans[q]), padfinal.__contains__)


def lift(a: Automaton, tapes: int, tape_map: Sequence[int]) -> Automaton:
    """Cylindrify onto ``tapes`` tapes, old tape j becoming ``tape_map[j]``.

    New tapes are unconstrained and may outlast the old ones.
    """
    k = a.tapes
    if len(tape_map) != k or len(set(tape_map)) != k or not all(0 <= t < tapes for t in tape_map):
        raise BadTapeIndex(f"bad tape map {tape_map} for {k} -> {tapes}")
    tape_map = tuple(tape_map)
    if tapes == k and tape_map == tuple(range(k)):
        return a
    alph = a.alphabet.with_tapes(tapes)
    width, pad = alph.width, alph.pad
    n = a.num_states
    acc, sink = n, n + 1
    guard = M.cube([{pad} if j in tape_map else None for j in range(tapes)], width, M.leaf(1), M.leaf(0))
    rmemo: dict = {}
    cmemo: dict = {}
    monotone = all(x < y for x, y in zip(tape_map, tape_map[1:]))

    def moved(code: int) -> int:
        if monotone:
            return M.relabel(code, tape_map, rmemo)
        return M.remap(code, tape_map, width, rmemo, cmemo)

    gmemo: dict[int, dict] = {acc: {}, sink: {}}

    def step(s: int) -> int:
        if s == sink:
            return M.leaf(sink)
        if s == acc:
            return M.map_leaves(guard, lambda f: acc if f else sink)
        after = acc if s in a.finals else sink
        return M.apply2(guard, moved(a.trans[s]), width, lambda f, v: after if f else v, gmemo[after])

    fin = set(a.finals) | {acc}
    return _build(alph, a.initial, step, fin.__contains__)


# ---------------------------------------------------------------- queries


def _min_letters(code: int, k: int):
    """Successor states with their lex-least letter, in letter order."""
    found: dict[int, tuple] = {}
    seen: set[tuple[int, int]] = set()

    def go(c: int, j: int, prefix: tuple) -> None:
        if j == k:
            found.setdefault(M.leaf_value(c), prefix)
            return
        if (c, j) in seen:
            return
        seen.add((c, j))
        if c >= 0 and M.node(c)[0] == j:
            for v, child in enumerate(M.node(c)[1]):
                go(child, j + 1, prefix + (v,))
        else:
            go(c, j + 1, prefix + (0,))

    go(code, 0, ())
    return found


def shortest_member(a: Automaton) -> tuple[Letter, ...] | None:
    """Length-minimal accepted convolution, ties broken by tuple order."""
    if not a.finals:
        return None
    dead = _dead_states(a)
    parent: dict[int, tuple[int, tuple] | None] = {a.initial: None}
    queue = deque([a.initial])
    hit = a.initial if a.initial in a.finals else None
    while hit is None and queue:
        s = queue.popleft()
        for t, letter in _min_letters(a.trans[s], a.tapes).items():
            if t in parent or t in dead:
                continue
            parent[t] = (s, letter)
            if t in a.finals:
                hit = t
                break
            queue.append(t)
    letters = []
    s = hit
    while parent[s] is not None:
        s, letter = parent[s]
        letters.append(letter)
    b = a.base
    return tuple(tuple(b.symbol(v) for v in letter) for letter in reversed(letters))


def shortest_tuple(a: Automaton) -> tuple[Word, ...] | None:
    """Like ``shortest_member`` but decoded into one word per tape."""
    conv = shortest_member(a)
    return None if conv is None else deconvolve(conv, a.tapes)


@dataclass(frozen=True)
class Inclusion:
    holds: bool
    witness: tuple[Letter, ...] | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_subset(a: Automaton, b: Automaton) -> Inclusion:
    w = shortest_member(difference(a, b))
    return Inclusion(True) if w is None else Inclusion(False, w)


def members(a: Automaton, max_len: int):
    """All accepted word tuples with convolution length ≤ max_len, by length then tuple order."""
    dead = _dead_states(a)
    b = a.base
    level = [(a.initial, ())]
    for n in range(max_len + 1):
        nxt = []
        for s, conv in level:
            if s in a.finals:
                yield deconvolve(tuple(tuple(b.symbol(v) for v in l) for l in conv), a.tapes)
            if n < max_len:
                for letter, t in M.iter_letters(a.trans[s], a.tapes, a.alphabet.width):
                    if t not in dead:
                        nxt.append((t, conv + (letter,)))
        level = nxt


# ---------------------------------------------------------------- exchange formats


def _letter_text(b: Alphabet, letter) -> str:
    return "(" + ",".join("_" if v == len(b) else b.symbols[v] for v in letter) + ")"


def to_text(a: Automaton) -> str:
    """Canonical exchange text; the dead state and edges into it are left implicit."""
    b = a.base
    dead = _dead_states(a)
    allpad = (a.alphabet.pad,) * a.tapes
    lines = ["alphabet " + " ".join(b.symbols), f"tapes {a.tapes}"]
    for s in range(a.num_states):
        if s in dead and s != a.initial:
            continue
        tags = (" initial" if s == a.initial else "") + (" final" if s in a.finals else "")
        lines.append(f"state {s}{tags}")
    for s in range(a.num_states):
        if s in dead:
            continue
        for letter, t in M.iter_letters(a.trans[s], a.tapes, a.alphabet.width):
            if t not in dead and letter != allpad:
                lines.append(f"trans {s} {_letter_text(b, letter)} {t}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Automaton:
    """Parse the exchange format; nondeterministic input is determinized."""
    import re

    syms = None
    k = None
    initial: set[int] = set()
    finals: set[int] = set()
    edges: list[tuple[int, tuple[str, ...], int]] = []
    trans_re = re.compile(r"^trans\s+(\d+)\s*\(([^)]*)\)\s*(\d+)$")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "alphabet":
            syms = line.split()[1:]
        elif head == "tapes":
            try:
                k = int(line.split()[1])
            except (IndexError, ValueError):
                raise FormatError(f"line {lineno}: bad tape count") from None
        elif head == "state":
            parts = line.split()
            try:
                s = int(parts[1])
            except (IndexError, ValueError):
                raise FormatError(f"line {lineno}: bad state line") from None
            for tag in parts[2:]:
                if tag == "initial":
                    initial.add(s)
                elif tag == "final":
                    finals.add(s)
                else:
                    raise FormatError(f"line {lineno}: unknown state tag {tag!r}")
        elif head == "trans":
            m = trans_re.match(line)
            if not m:
                raise FormatError(f"line {lineno}: bad transition")
            letter = tuple(x.strip() for x in m.group(2).split(","))
            edges.append((int(m.group(1)), letter, int(m.group(3))))
        else:
            raise FormatError(f"line {lineno}: unknown declaration {head!r}")
    if syms is None or k is None:
        raise FormatError("missing alphabet or tapes declaration")
    alph = TapedAlphabet(Alphabet(tuple(syms)), k)
    b = alph.base
    tab = _SetTable()
    none = M.leaf(tab.get(()))
    per_state: dict[int, int] = {}
    memo: dict = {}
    for s, letter, t in edges:
        if len(letter) != k:
            raise FormatError(f"letter {letter} has wrong arity")
        idx = [alph.pad if x == "_" else b.index(x) for x in letter]
        cube = M.cube([{v} for v in idx], alph.width, M.leaf(tab.get((t,))), none)
        per_state[s] = M.apply2(per_state.get(s, none), cube, alph.width, tab.union, memo)
    if not initial:
        raise FormatError("no initial state")
    return _determinize(alph, tab, tab.get(initial), lambda q: per_state.get(q, none), finals.__contains__)


def to_dot(a: Automaton, name: str = "A") -> str:
    b = a.base
    dead = _dead_states(a)
    allpad = (a.alphabet.pad,) * a.tapes
    out = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for s in range(a.num_states):
        if s in dead:
            continue
        shape = "doublecircle" if s in a.finals else "circle"
        out.append(f"  {s} [shape={shape}];")
    out.append(f"  __start -> {a.initial};")
    for s in range(a.num_states):
        if s in dead:
            continue
        labels: dict[int, list[str]] = {}
        for letter, t in M.iter_letters(a.trans[s], a.tapes, a.alphabet.width):
            if t not in dead and letter != allpad:
                labels.setdefault(t, []).append(_letter_text(b, letter))
        for t, ls in labels.items():
            text = " ".join(ls).replace('"', '\\"')
            out.append(f'  {s} -> {t} [label="{text}"];')
    out.append("}")
    return "\n".join(out) + "\n"
