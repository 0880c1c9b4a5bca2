"""L* learning of length-preserving bisimulation proofs.

The taught language over pairs of equal-length words ``(v, w)`` from the
domain's symbols: ``v = w``, or both lie in the domain (and the invariant, if
any) and share a block of the greatest bisimulation of the length-|v| slice,
with terminal states pre-split by the quotient.

Two teachers compute that relation. ``slice`` builds whole slices and answers
equivalence queries by comparing the hypothesis with the slice at the
counterexample length. ``local`` only explores the configurations reachable
from the words in question, which is enough because bisimilarity of two states
depends only on what they can reach.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

from . import _mdd as M
from . import automata as A
from .automata import Automaton, TapedAlphabet
from .bisim_vc import Candidate, VerifyOutcome, verify
from .finite_bisim import greatest_bisimulation_within
from .logic import Compiler, parse_formula
from .pts import Explorer, FinitePts, RegularPresentation, SliceTooLarge, slice_pts

_log = logging.getLogger(__name__)


class BudgetExceeded(Exception):
    def __init__(self, stage: str, detail: str = ""):
        super().__init__(f"budget exceeded during {stage}: {detail}")
        self.stage, self.detail = stage, detail


class TeacherInconsistent(RuntimeError):
    pass


Letter = tuple  # (symbol of v, symbol of w)


@dataclass
class Budgets:
    max_rounds: int = 200
    max_slice_length: int = 24
    max_slice_size: int = 400_000
    verify_budget: int | None = 2_000_000
    max_seconds: float | None = None


@dataclass
class TeacherContext:
    presentation: RegularPresentation
    seed: Automaton | None
    quotient: str = "identity"  # identity | all-equal | relation:<name>
    quotient_key: Callable = tuple
    quotient_relation: Automaton | None = None
    invariant: Automaton | None = None
    budgets: Budgets = field(default_factory=Budgets)
    mode: str = "slice"  # slice | local
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        p = self.presentation
        if not p.length_preserving:
            raise ValueError("learning needs a length-preserving model")
        used = _symbols_of(p.domain)
        self.symbols = tuple(s for s in p.base.symbols if s in used)
        self.letters = tuple((a, b) for a in self.symbols for b in self.symbols)
        self.space = p.domain if self.invariant is None else A.intersect(p.domain, self.invariant)
        if self.mode not in ("slice", "local"):
            raise ValueError(f"unknown teacher mode {self.mode!r}")
        self.explorer = Explorer(p, self.space)
        # config -> (closure id, block); a closure is closed under successors, so
        # two configs recorded from the same closure can be compared directly
        self._seen: dict = {}
        self._closures = 0

    # ------------------------------------------------------------ slices
    def level(self, n: int):
        """(slice, partition over the invariant, state -> block, trie of invariant configs)."""
        if n in self._cache:
            return self._cache[n]
        if n > self.budgets.max_slice_length:
            raise BudgetExceeded("membership", f"slice length {n} beyond {self.budgets.max_slice_length}")
        try:
            f = slice_pts(self.presentation, n, cap=self.budgets.max_slice_size)
        except SliceTooLarge as e:
            raise BudgetExceeded("membership", str(e)) from None
        inv = [i for i, c in enumerate(f.configs) if self.space.accepts(c)]
        part = greatest_bisimulation_within(f, inv, self.terminal_seed(f, inv))
        trie: dict = {}
        for i in inv:
            node = trie
            for s in f.configs[i]:
                node = node.setdefault(s, {})
            node[None] = i
        entry = (f, part, part.mapping(), trie)
        self._cache[n] = entry
        return entry

    def terminal_seed(self, f: FinitePts, inv) -> list[list[int]]:
        terms = [i for i in inv if f.is_terminal(i)]
        if self.quotient == "all-equal":
            return [terms] if terms else []
        groups: dict = {}
        for i in terms:
            c = f.configs[i]
            if self.quotient == "identity":
                key = self.quotient_key(c)
            else:
                key = min(f.configs[j] for j in terms if self.quotient_relation.accepts(c, f.configs[j]))
            groups.setdefault(key, []).append(i)
        return list(groups.values())

    def local(self, starts) -> tuple[FinitePts, dict]:
        """Reachable subsystem of ``starts`` and its block map over the space."""
        try:
            f = self.explorer.closure(starts, cap=self.budgets.max_slice_size)
        except SliceTooLarge as e:
            raise BudgetExceeded("membership", str(e)) from None
        inv = [i for i, c in enumerate(f.configs) if self.explorer.inside(c)]
        return f, greatest_bisimulation_within(f, inv, self.terminal_seed(f, inv)).mapping()

    def related(self, v: tuple, w: tuple) -> bool:
        if v == w:
            return True
        if len(v) != len(w) or not (self.explorer.inside(v) and self.explorer.inside(w)):
            return False
        if len(v) > self.budgets.max_slice_length:
            raise BudgetExceeded("membership", f"word length {len(v)} beyond {self.budgets.max_slice_length}")
        if self.mode == "local":
            a, b = self._seen.get(v), self._seen.get(w)
            if a is not None and b is not None and a[0] == b[0]:
                return a[1] == b[1]
            f, block = self.local([v, w])
            self._closures += 1
            for i, c in enumerate(f.configs):
                if i in block:
                    self._seen[c] = (self._closures, block[i])
        else:
            f, _, block, _ = self.level(len(v))
        return block[f.index[v]] == block[f.index[w]]


def _symbols_of(a: Automaton) -> set[str]:
    """Symbols that occur in some accepted word."""
    dead = A._dead_states(a)
    reach = {a.initial}
    stack = [a.initial]
    used = set()
    pad = a.alphabet.pad
    while stack:
        s = stack.pop()
        for v in range(pad):
            t = M.evaluate(a.trans[s], (v,))
            if t in dead:
                continue
            used.add(a.base.symbols[v])
            if t not in reach:
                reach.add(t)
                stack.append(t)
    return used


# ---------------------------------------------------------------- hypotheses


@dataclass(frozen=True)
class Hypothesis:
    """Complete DFA over the pair alphabet; state 0 is initial."""

    letters: tuple[Letter, ...]
    delta: tuple[tuple[int, ...], ...]  # delta[state][letter index]
    finals: frozenset[int]

    @property
    def num_states(self) -> int:
        return len(self.delta)

    @property
    def num_transitions(self) -> int:
        return len(self.delta) * len(self.letters)

    def accepts(self, word) -> bool:
        idx = {l: i for i, l in enumerate(self.letters)}
        s = 0
        for l in word:
            if l not in idx:
                return False
            s = self.delta[s][idx[l]]
        return s in self.finals

    def _edges(self) -> dict[tuple[int, int], list[str]]:
        out: dict = {}
        for s, row in enumerate(self.delta):
            for (a, b), t in zip(self.letters, row):
                out.setdefault((s, t), []).append(f"{a}/{b}")
        return out

    def to_text(self) -> str:
        lines = [f"states {self.num_states}", "initial 0", "final " + " ".join(map(str, sorted(self.finals)))]
        lines += [f"{s} -> {t} : {' '.join(ls)}" for (s, t), ls in sorted(self._edges().items())]
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ["digraph proof {", "  rankdir=LR;", '  init [shape=point]; init -> 0;']
        for s in range(self.num_states):
            lines.append(f"  {s} [shape={'doublecircle' if s in self.finals else 'circle'}];")
        for (s, t), ls in sorted(self._edges().items()):
            label = ", ".join(ls).replace('"', '\\"')
            lines.append(f'  {s} -> {t} [label="{label}"];')
        return "\n".join(lines + ["}"]) + "\n"

    def relation(self, base) -> Automaton:
        alph = TapedAlphabet(base, 2)
        idx = {(base.index(a), base.index(b)): i for i, (a, b) in enumerate(self.letters)}
        sink = len(self.delta)

        def step(s, letter):
            i = idx.get(tuple(letter))
            return sink if s == sink or i is None else self.delta[s][i]

        return A.from_dfa(alph, 0, self.finals, step)


# ---------------------------------------------------------------- teacher


@dataclass(frozen=True)
class Answer:
    kind: str  # Correct | NoSolution | PositiveCEX | NegativeCEX
    pair: tuple | None = None
    length: int | None = None
    verify: VerifyOutcome | None = None


def _partners(a: Automaton, dead: set, v: tuple, trie: dict) -> list[int]:
    """Slice states w (via the trie) with (v, w) accepted by ``a``."""
    base = a.base
    vi = [base.index(s) for s in v]
    out: list[int] = []
    n = len(v)

    def go(i: int, s: int, node: dict) -> None:
        if i == n:
            if s in a.finals and None in node:
                out.append(node[None])
            return
        for sym in sorted(k for k in node if k is not None):
            t = M.evaluate(a.trans[s], (vi[i], base.index(sym)))
            if t not in dead:
                go(i + 1, t, node[sym])

    go(0, a.initial, trie)
    return out


class Teacher:
    def __init__(self, ctx: TeacherContext, log: list[str] | None = None):
        self.ctx = ctx
        self.log = log if log is not None else []
        self.memo: dict = {}
        self._space = ctx.space

    def member(self, word: tuple) -> bool:
        hit = self.memo.get(word)
        if hit is None:
            v = tuple(a for a, _ in word)
            w = tuple(b for _, b in word)
            hit = self.ctx.related(v, w)
            self.memo[word] = hit
            self.log.append(f"member {_show(self.ctx, v)} | {_show(self.ctx, w)} -> {'yes' if hit else 'no'}")
        return hit

    def _length_n(self, n: int) -> Automaton:
        """Pairs of words over the domain's symbols, both of length n."""
        b = self.ctx.presentation.base
        syms = self.ctx.symbols
        return A.from_dfa(
            TapedAlphabet(b, 2),
            0,
            [n],
            lambda s, l: s + 1 if s < n and all(x < len(b) and b.symbols[x] in syms for x in l) else n + 1,
        )

    def _outside_pairs(self, r: Automaton, n: int) -> tuple | None:
        """Shortest pair of r of length n, with v != w and an endpoint outside the invariant."""
        env = self.ctx.presentation.env.child(_Sp=self._space, _R=r, _L=self._length_n(n))
        a = Compiler(env).compile(parse_formula("_L(x, y) & _R(x, y) & !(x = y) & !(_Sp(x) & _Sp(y))"), ("x", "y"))
        return A.shortest_tuple(a.automaton)

    def equivalence(self, h: Hypothesis) -> Answer:
        if self.ctx.mode == "local":
            return self._equivalence_local(h)
        ctx = self.ctx
        p = ctx.presentation
        r = h.relation(p.base)
        candidates = []
        if ctx.seed is not None:
            miss = A.difference(ctx.seed, r)
            if not miss.is_empty():
                w = A.shortest_tuple(miss)
                candidates.append((max(map(len, w)), "seed", w))
        out = verify(Candidate(p, r), budget=ctx.budgets.verify_budget)
        if out.kind == "ResourceExceeded":
            raise BudgetExceeded("verify", out.detail)
        if not out.verified:
            candidates.append((max(map(len, out.witness)), "verify", out.witness))
        if not candidates:
            self.log.append("equivalence -> Correct")
            return Answer("Correct", verify=out)
        n = min(c[0] for c in candidates)
        f, part, block, trie = ctx.level(n)
        configs = f.configs
        inside = sorted(block)

        def show(pair):
            return f"{_show(ctx, pair[0])} | {_show(ctx, pair[1])}"

        # seed pairs the slice does not relate
        if ctx.seed is not None:
            w = self._outside_pairs(ctx.seed, n)
            if w is not None:
                return self._answer("NoSolution", w, n, out, show)
            dead = A._dead_states(ctx.seed)
            for i in inside:
                for j in _partners(ctx.seed, dead, configs[i], trie):
                    if block[i] != block[j]:
                        return self._answer("NoSolution", (configs[i], configs[j]), n, out, show)
        # accepted but unrelated
        w = self._outside_pairs(r, n)
        if w is not None:
            return self._answer("NegativeCEX", w, n, out, show)
        dead = A._dead_states(r)
        accepted = {}
        for i in inside:
            accepted[i] = _partners(r, dead, configs[i], trie)
            for j in accepted[i]:
                if block[i] != block[j]:
                    return self._answer("NegativeCEX", (configs[i], configs[j]), n, out, show)
        # related but rejected: identity pairs first, then block mates
        env = p.env.child(_R=r, _L=self._length_n(n))
        a = Compiler(env).compile(parse_formula("_L(x, y) & x = y & !_R(x, y)"), ("x", "y")).automaton
        w = A.shortest_tuple(a)
        if w is not None:
            return self._answer("PositiveCEX", w, n, out, show)
        members: dict = {}
        for i in inside:
            members.setdefault(block[i], []).append(i)
        for i in inside:
            have = set(accepted[i])
            for j in members[block[i]]:
                if j not in have:
                    return self._answer("PositiveCEX", (configs[i], configs[j]), n, out, show)
        raise TeacherInconsistent(f"hypothesis agrees with the length-{n} relation but fails the check")

    def _equivalence_local(self, h: Hypothesis) -> Answer:
        ctx = self.ctx
        p = ctx.presentation
        r = h.relation(p.base)

        def show(pair):
            return f"{_show(ctx, pair[0])} | {_show(ctx, pair[1])}"

        def wrong(pairs, out):
            for v, w in pairs:
                truth = ctx.related(v, w)
                if h.accepts(tuple(zip(v, w))) != truth:
                    kind = "PositiveCEX" if truth else "NegativeCEX"
                    return self._answer(kind, (v, w), len(v), out, show)
            return None

        if ctx.seed is not None:
            miss = A.difference(ctx.seed, r)
            if not miss.is_empty():
                v, w = A.shortest_tuple(miss)
                kind = "PositiveCEX" if ctx.related(v, w) else "NoSolution"
                return self._answer(kind, (v, w), len(v), None, show)
        out = verify(Candidate(p, r), budget=ctx.budgets.verify_budget)
        if out.kind == "ResourceExceeded":
            raise BudgetExceeded("verify", out.detail)
        if out.verified:
            self.log.append("equivalence -> Correct")
            return Answer("Correct", verify=out)
        wit = tuple(tuple(x) for x in out.witness)
        if out.kind == "NotEquivalence":
            if out.detail == "refl":
                pairs = [(wit[0], wit[0])]
            elif out.detail == "sym":
                pairs = [wit, wit[::-1]]
            else:
                pairs = [wit[:2], wit[1:], (wit[0], wit[2])]
            ans = wrong(pairs, out)
        else:
            ans = wrong([wit], out)
            if ans is None:
                f, block = ctx.local(list(wit))
                cs = f.configs
                inside = [i for i in range(len(cs)) if i in block]
                for i in inside:
                    for j in inside:
                        truth = block[i] == block[j]
                        if h.accepts(tuple(zip(cs[i], cs[j]))) != truth:
                            kind = "PositiveCEX" if truth else "NegativeCEX"
                            return self._answer(kind, (cs[i], cs[j]), len(cs[i]), out, show)
        if ans is None:
            raise TeacherInconsistent(f"no counterexample near the verifier's witness {show(wit)}")
        return ans

    def _answer(self, kind, pair, n, out, show) -> Answer:
        pair = tuple(tuple(x) for x in pair)
        self.log.append(f"equivalence -> {kind} {show(pair)}")
        return Answer(kind, pair, n, out)


def _show(ctx: TeacherContext, w) -> str:
    return ctx.presentation.base.show(w) if w else "ε"


# ---------------------------------------------------------------- learner


@dataclass
class LearnOutcome:
    kind: str  # Proof | NoSolution | BudgetExceeded
    hypothesis: Hypothesis | None = None
    relation: Automaton | None = None
    verify: VerifyOutcome | None = None
    pair: tuple | None = None
    stage: str | None = None
    rounds: int = 0
    queries: int = 0
    transcript: list[str] = field(default_factory=list, repr=False)
    seconds: float = 0.0
    answers: list[Answer] = field(default_factory=list, repr=False)


class ObservationTable:
    """Access strings with distinct rows, suffixes added by Rivest-Schapire."""

    def __init__(self, letters, member):
        self.letters = letters
        self.member = member
        self.access: list[tuple] = [()]
        self.suffixes: list[tuple] = [()]

    def row(self, u: tuple) -> tuple:
        return tuple(self.member(u + e) for e in self.suffixes)

    def close(self) -> dict:
        rows: dict = {}
        for u in self.access:
            rows.setdefault(self.row(u), u)
        i = 0
        while i < len(self.access):
            u = self.access[i]
            for a in self.letters:
                r = self.row(u + (a,))
                if r not in rows:
                    rows[r] = u + (a,)
                    self.access.append(u + (a,))
            i += 1
        return rows

    def hypothesis(self) -> Hypothesis:
        rows = self.close()
        state = {self.row(u): k for k, u in enumerate(self.access)}
        delta = tuple(tuple(state[self.row(u + (a,))] for a in self.letters) for u in self.access)
        finals = frozenset(k for k, u in enumerate(self.access) if self.member(u))
        return Hypothesis(tuple(self.letters), delta, finals)

    def process(self, h: Hypothesis, word: tuple) -> None:
        """Binary search for the split point of a counterexample; add one suffix."""
        idx = {l: i for i, l in enumerate(self.letters)}

        def alpha(i: int) -> bool:
            s = 0
            for l in word[:i]:
                s = h.delta[s][idx[l]]
            return self.member(self.access[s] + word[i:])

        lo, hi = 0, len(word)
        a_lo = alpha(lo)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if alpha(mid) == a_lo:
                lo = mid
            else:
                hi = mid
        suffix = word[hi:]
        if suffix in self.suffixes:
            raise TeacherInconsistent(f"counterexample yields a known suffix {suffix}")
        self.suffixes.append(suffix)


def learn(ctx: TeacherContext) -> LearnOutcome:
    start = time.monotonic()
    log: list[str] = []
    teacher = Teacher(ctx, log)
    table = ObservationTable(ctx.letters, teacher.member)
    rounds = 0
    answers: list[Answer] = []

    def finish(**kw) -> LearnOutcome:
        took = time.monotonic() - start
        return LearnOutcome(rounds=rounds, queries=len(teacher.memo), transcript=log, seconds=took, answers=answers, **kw)

    try:
        while True:
            h = table.hypothesis()
            rounds += 1
            log.append(f"round {rounds}: hypothesis with {h.num_states} states")
            _log.info("round %d: %d states, %d suffixes, %d queries", rounds, h.num_states, len(table.suffixes), len(teacher.memo))
            ans = teacher.equivalence(h)
            answers.append(ans)
            if ans.kind == "Correct":
                return finish(kind="Proof", hypothesis=h, relation=h.relation(ctx.presentation.base), verify=ans.verify)
            if ans.kind == "NoSolution":
                return finish(kind="NoSolution", pair=ans.pair)
            if rounds >= ctx.budgets.max_rounds:
                raise BudgetExceeded("equivalence", f"{rounds} rounds")
            if ctx.budgets.max_seconds and time.monotonic() - start > ctx.budgets.max_seconds:
                raise BudgetExceeded("equivalence", "time limit")
            table.process(h, tuple(zip(*ans.pair)))
    except BudgetExceeded as e:
        log.append(f"budget exceeded: {e.stage} {e.detail}")
        return finish(kind="BudgetExceeded", stage=e.stage)


def context_for(
    bundle, quotient: str | None = None, invariant=True, budgets: Budgets | None = None, mode: str = "local"
) -> TeacherContext:
    """Teacher context from a bundled model, honouring its manifest defaults.

    ``invariant`` is a flag for the bundle's own invariant or a language
    automaton to use instead.
    """
    q = quotient or bundle.quotient
    qrel = None
    if q.startswith("relation:"):
        qrel = bundle.relation(q.split(":", 1)[1])
    return TeacherContext(
        bundle.presentation,
        bundle.seed,
        q,
        bundle.canonical,
        qrel,
        invariant if isinstance(invariant, Automaton) else (bundle.invariant if invariant else None),
        budgets or Budgets(),
        mode,
    )
