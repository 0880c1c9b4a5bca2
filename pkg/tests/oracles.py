"""Independent brute-force oracles shared by the unit and acceptance tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from regbisim.logic.ast import (
    And,
    Eq,
    EqLen,
    Exists,
    FalseF,
    Forall,
    Iff,
    Implies,
    Last,
    Not,
    Or,
    Prefix,
    SuccP,
    TrueF,
    Var,
    children,
)

VARS = ("x", "y", "z")


def words(symbols, n):
    out = []
    for ln in range(n + 1):
        out.extend(itertools.product(symbols, repeat=ln))
    return out


class Tarski:
    """Truth tables over a bounded word universe, one numpy axis per variable."""

    def __init__(self, symbols=("0", "1"), bound=6):
        self.U = words(symbols, bound)
        n = len(self.U)
        idx = {w: i for i, w in enumerate(self.U)}
        self.prefix = np.zeros((n, n), bool)
        self.eqlen = np.zeros((n, n), bool)
        self.succ = np.zeros((n, n), bool)
        for i, u in enumerate(self.U):
            for j, v in enumerate(self.U):
                self.prefix[i, j] = v[: len(u)] == u
                self.eqlen[i, j] = len(u) == len(v)
                self.succ[i, j] = len(v) == len(u) + 1 and v[: len(u)] == u
        self.eq = np.eye(n, dtype=bool)
        self.last = {a: np.array([len(u) > 0 and u[-1] == a for u in self.U]) for a in symbols}
        self.index = idx

    def _place(self, mat, names):
        """Embed a table over ``names`` into the 3 named axes."""
        if len(names) == 1:
            shape = [1, 1, 1]
            shape[VARS.index(names[0])] = len(mat)
            return mat.reshape(shape)
        a, b = names
        if a == b:
            return self._place(np.diagonal(mat).copy(), (a,))
        ia, ib = VARS.index(a), VARS.index(b)
        t = mat if ia < ib else mat.T
        shape = [1, 1, 1]
        shape[min(ia, ib)] = len(self.U)
        shape[max(ia, ib)] = len(self.U)
        return t.reshape(shape)

    def eval(self, f):
        if isinstance(f, TrueF):
            return np.ones((1, 1, 1), bool)
        if isinstance(f, FalseF):
            return np.zeros((1, 1, 1), bool)
        if isinstance(f, Not):
            return ~self.eval(f.body)
        if isinstance(f, And):
            return self.eval(f.left) & self.eval(f.right)
        if isinstance(f, Or):
            return self.eval(f.left) | self.eval(f.right)
        if isinstance(f, Implies):
            return ~self.eval(f.left) | self.eval(f.right)
        if isinstance(f, Iff):
            return self.eval(f.left) == self.eval(f.right)
        if isinstance(f, (Exists, Forall)):
            t = self.eval(f.body)
            for v in f.vars:
                ax = VARS.index(v)
                if t.shape[ax] > 1:
                    t = t.any(axis=ax, keepdims=True) if isinstance(f, Exists) else t.all(axis=ax, keepdims=True)
            return t
        if isinstance(f, Last):
            return self._place(self.last[f.symbol], (f.x.name,))
        table = {Prefix: self.prefix, EqLen: self.eqlen, SuccP: self.succ, Eq: self.eq}[type(f)]
        return self._place(table, (f.x.name, f.y.name))

    def holds(self, f, assignment: dict, table=None) -> bool:
        t = self.eval(f) if table is None else table
        key = tuple(self.index[assignment[v]] if t.shape[i] > 1 else 0 for i, v in enumerate(VARS))
        return bool(t[key])


def quantifier_rank(f) -> int:
    own = 1 if isinstance(f, (Exists, Forall)) else 0
    return own + max((quantifier_rank(c) for c in children(f)), default=0)


def random_formula(rng: random.Random, depth: int, symbols=("0", "1")):
    """Random formula over variables x, y, z with AST depth ≤ depth."""
    if depth <= 1 or rng.random() < 0.25:
        kind = rng.randrange(6)
        v = [Var(rng.choice(VARS)) for _ in range(2)]
        if kind == 0:
            return Prefix(*v)
        if kind == 1:
            return EqLen(*v)
        if kind == 2:
            return Last(rng.choice(symbols), v[0])
        if kind == 3:
            return Eq(*v)
        if kind == 4:
            return SuccP(*v)
        return rng.choice([TrueF(), FalseF(), Prefix(*v)])
    op = rng.randrange(8)
    sub = lambda: random_formula(rng, depth - 1, symbols)  # noqa: E731
    if op == 0:
        return Not(sub())
    if op in (1, 2):
        return And(sub(), sub())
    if op == 3:
        return Or(sub(), sub())
    if op == 4:
        return Implies(sub(), sub())
    if op == 5:
        return Iff(sub(), sub())
    if op == 6:
        return Exists((rng.choice(VARS),), sub())
    return Forall((rng.choice(VARS),), sub())


# ---------------------------------------------------------------- finite systems


def naive_partition(states, actions, weights):
    """Greatest bisimulation from the total relation by pair deletion.

    ``weights[a][s]`` maps successor -> weight. Kept independent from the
    library's refinement code on purpose.
    """
    n = len(states)
    rel = [[True] * n for _ in range(n)]
    changed = True
    while changed:
        changed = False
        # classes of the current relation (it stays an equivalence)
        cls = {}
        for i in range(n):
            cls[i] = min(j for j in range(n) if rel[i][j])
        for i in range(n):
            for j in range(i + 1, n):
                if not rel[i][j]:
                    continue
                for a in actions:
                    mi, mj = {}, {}
                    for t, w in weights[a][i].items():
                        mi[cls[t]] = mi.get(cls[t], 0) + w
                    for t, w in weights[a][j].items():
                        mj[cls[t]] = mj.get(cls[t], 0) + w
                    if mi != mj:
                        rel[i][j] = rel[j][i] = False
                        changed = True
                        break
    block = {}
    out = []
    for i in range(n):
        c = min(j for j in range(n) if rel[i][j])
        out.append(block.setdefault(c, len(block)))
    return out


def exact_traces(step, start, depth):
    """Uniform-adversary trace distribution from explicit successor maps.

    ``step(s)`` returns {action: [(t, Fraction prob), ...]} for live actions.
    """
    dist: dict = {}
    unterminated = Fraction(0)
    frontier = [((), start, Fraction(1))]
    for d in range(depth + 1):
        nxt = []
        for trace, s, p in frontier:
            moves = step(s)
            if not moves:
                dist[trace] = dist.get(trace, 0) + p
                continue
            if d == depth:
                unterminated += p
                continue
            share = p / len(moves)
            for a, succ in sorted(moves.items()):
                for t, q in succ:
                    nxt.append((trace + (a,), t, share * q))
        frontier = nxt
    return dist, unterminated
