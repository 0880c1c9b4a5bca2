"""Greatest probabilistic bisimulation on finite slices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .automata import Alphabet
from .pts import FinitePts


class SeedNotOnTerminals(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Partition:
    """Block id per state, blocks numbered in order of their smallest member.

    ``block`` holds one entry per state of ``states``; states are indices of
    the underlying FinitePts.
    """

    states: tuple[int, ...]
    block: tuple[int, ...]

    @classmethod
    def from_keys(cls, states: Sequence[int], keys: Sequence) -> "Partition":
        order = sorted(range(len(states)), key=lambda i: states[i])
        ids: dict = {}
        block = [0] * len(states)
        for i in order:
            block[i] = ids.setdefault(keys[i], len(ids))
        pairs = sorted(zip(states, block))
        return cls(tuple(s for s, _ in pairs), tuple(b for _, b in pairs))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def num_blocks(self) -> int:
        return len(set(self.block))

    def mapping(self) -> dict[int, int]:
        return dict(zip(self.states, self.block))

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for s, b in zip(self.states, self.block):
            out[b].append(s)
        return out

    def same(self, s: int, t: int) -> bool:
        m = self.mapping()
        return s in m and t in m and m[s] == m[t]

    def to_text(self, f: FinitePts, base: Alphabet) -> str:
        return "".join(
            f"block {i}: " + " ".join(base.show(f.configs[s]) for s in members) + "\n"
            for i, members in enumerate(self.blocks())
        )


def signature(f: FinitePts, s: int, cls) -> tuple:
    """Per action, summed weight into each class; ``cls`` maps a state to its class key."""
    sig = []
    for a in sorted(f.actions):
        row = f.actions[a][s]
        if not row:
            continue
        acc: dict = {}
        for t, w in row.items():
            k = cls(t)
            acc[k] = acc.get(k, 0) + w
        sig.append((a, tuple(sorted(acc.items()))))
    return tuple(sig)


def _refine(f: FinitePts, states: list[int], start: list) -> list[int]:
    """Signature refinement from ``start`` keys until the block count is stable.

    Successors outside ``states`` each form their own class. Signatures are
    the per-state runs of (action, class, weight) records after summing
    weights, compared as raw bytes.
    """
    n = len(states)
    pos = {s: i for i, s in enumerate(states)}
    outside: dict = {}
    src, act, tgt, wt = [], [], [], []
    for ai, a in enumerate(sorted(f.actions)):
        rows = f.actions[a]
        for i, s in enumerate(states):
            for t, w in rows[s].items():
                j = pos.get(t)
                if j is None:
                    j = n + outside.setdefault(t, len(outside))
                src.append(i)
                act.append(ai)
                tgt.append(j)
                wt.append(w)
    src, act, tgt, wt = (np.array(x, dtype=np.int64) for x in (src, act, tgt, wt))
    fixed = n + np.arange(len(outside), dtype=np.int64)
    ids: dict = {}
    cur = [ids.setdefault(k, len(ids)) for k in start]
    count = len(ids)
    while True:
        cls = np.concatenate([np.array(cur, dtype=np.int64), fixed])[tgt]
        order = np.lexsort((cls, act, src))
        s_, a_, c_, w_ = src[order], act[order], cls[order], wt[order]
        edge = np.ones(len(s_), bool)
        edge[1:] = (s_[1:] != s_[:-1]) | (a_[1:] != a_[:-1]) | (c_[1:] != c_[:-1])
        first = np.flatnonzero(edge)
        wsum = np.add.reduceat(w_, first) if len(first) else w_
        raw = np.stack([a_[first], c_[first], wsum], axis=1).tobytes()
        ends = np.cumsum(np.bincount(s_[first], minlength=n)) * 24
        lo = 0
        ids = {}
        new = []
        for i in range(n):
            hi = int(ends[i])
            new.append(ids.setdefault((cur[i], raw[lo:hi]), len(ids)))
            lo = hi
        if len(ids) == count:
            return cur
        cur, count = new, len(ids)


def greatest_bisimulation(f: FinitePts) -> Partition:
    states = list(range(len(f)))
    cur = _refine(f, states, [0] * len(states))
    return Partition.from_keys(states, cur)


def greatest_bisimulation_within(
    f: FinitePts, inv: Iterable[int], seed: Partition | Sequence[Iterable[int]] | None = None
) -> Partition:
    """Bisimulation on ``inv``; successors outside it count as singletons.

    ``seed`` pre-splits the terminal states of ``inv``; it must cover exactly
    those states.
    """
    states = sorted(set(inv))
    terminals = {s for s in states if f.is_terminal(s)}
    start = [("live",) for _ in states]
    if seed is not None:
        blocks = seed.blocks() if isinstance(seed, Partition) else [list(b) for b in seed]
        home = {}
        for i, b in enumerate(blocks):
            for s in b:
                if s in home:
                    raise SeedNotOnTerminals(f"state {s} in two seed blocks")
                home[s] = i
        if set(home) != terminals:
            extra = sorted(set(home) ^ terminals)
            raise SeedNotOnTerminals(f"seed and terminal states differ at {f.configs[extra[0]]}")
        start = [("term", home[s]) if s in terminals else ("live",) for s in states]
    cur = _refine(f, states, start)
    return Partition.from_keys(states, cur)


def naive_oracle(f: FinitePts, cap: int = 200) -> Partition:
    """Pair-deletion fixpoint from the total relation; quadratic memory."""
    n = len(f)
    if n > cap:
        raise CapExceeded(f"{n} states exceed the oracle cap of {cap}")
    rel = [[True] * n for _ in range(n)]
    while True:
        cls = [min(j for j in range(n) if rel[i][j]) for i in range(n)]
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                if rel[i][j] and signature(f, i, cls.__getitem__) != signature(f, j, cls.__getitem__):
                    rel[i][j] = rel[j][i] = False
                    changed = True
        if not changed:
            return Partition.from_keys(list(range(n)), cls)


def is_bisimulation(f: FinitePts, p: Partition) -> bool:
    """Direct check: same-block states agree on every action and block."""
    m = p.mapping()
    cls = lambda t: ("in", m[t]) if t in m else ("out", t)  # noqa: E731
    seen: dict = {}
    for s in p.states:
        sig = signature(f, s, cls)
        if seen.setdefault(m[s], sig) != sig:
            return False
    return True
