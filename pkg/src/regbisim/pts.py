"""Regular probabilistic transition systems and their finite slices."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from . import _mdd as M
from . import automata as A
from .automata import Alphabet, Automaton, TapedAlphabet
from .logic import Compiler, Environment, numeral_of, numeral_value, parse_formula
from .logic import builtins as LB
from .logic.ast import Var
from .modelfile import ModelError, bind_items, parse_alphabet, parse_declarations


class PtsError(Exception):
    pass


class NotLengthPreserving(PtsError):
    pass


class SliceTooLarge(PtsError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"slice has more than {cap} configurations")
        self.n, self.cap = n, cap


class DomainsOverlap(PtsError):
    def __init__(self, witness):
        super().__init__(f"domains share configuration {witness}")
        self.witness = witness


class WeightMismatch(PtsError):
    pass


class StartUnknown(PtsError):
    pass


@dataclass
class RegularPresentation:
    name: str
    base: Alphabet
    domain: Automaton
    actions: dict[str, Automaton]
    bound: int
    weight: int
    length_preserving: bool
    env: Environment = field(repr=False)
    source: Path | None = None

    def __post_init__(self):
        for a, d in self.actions.items():
            if d.tapes != 3:
                raise PtsError(f"action {a} has {d.tapes} tapes, need 3")

    def alphabet(self, k: int) -> TapedAlphabet:
        return TapedAlphabet(self.base, k)

    def graph(self, action: str) -> Automaton:
        """δ_a restricted to S × S and nonzero weights."""
        key = ("graph", action)
        cache = self.__dict__.setdefault("_cache", {})
        if key not in cache:
            d = self.actions[action]
            s = self.domain
            r = A.intersect(d, A.lift(s, 3, (0,)))
            r = A.intersect(r, A.lift(s, 3, (1,)))
            zero = A.from_words(self.alphabet(1), [(("0",),)])
            cache[key] = A.difference(r, A.lift(zero, 3, (2,)))
        return cache[key]

    def relation_env(self) -> Environment:
        """Environment for relation files: model names plus actions and S."""
        return self.env.child()


# ---------------------------------------------------------------- loading


def _parse_bool(v: str) -> bool:
    if v in ("true", "false"):
        return v == "true"
    raise ModelError(f"expected true or false, found {v!r}")


def parse_model(text: str, source: Path | None = None) -> RegularPresentation:
    d = parse_declarations(text, model=True)
    s = d.settings
    for key in ("alphabet", "weight", "bound"):
        if key not in s:
            raise ModelError(f"model {d.name} lacks '{key}'")
    unknown = set(s) - {"alphabet", "weight", "bound", "length_preserving"}
    if unknown:
        raise ModelError(f"unknown settings {sorted(unknown)}")
    base = parse_alphabet(s["alphabet"])
    try:
        weight = numeral_value(LB.numeral_word(s["weight"]))
        bound = int(s["bound"])
    except ValueError as e:
        raise ModelError(str(e)) from None
    lp = _parse_bool(s.get("length_preserving", "false"))
    env = Environment(base)
    bound_names = bind_items(d.items, env)
    if "S" not in bound_names or not any(k == "domain" for k, *_ in d.items):
        raise ModelError(f"model {d.name} lacks a domain")
    actions = {name: bound_names[name] for kind, name, *_ in d.items if kind == "action"}
    if not actions:
        raise ModelError(f"model {d.name} declares no actions")
    return RegularPresentation(d.name, base, env.bindings["S"], actions, bound, weight, lp, env, source)


def load_model(path) -> RegularPresentation:
    path = Path(path)
    return parse_model(path.read_text(), path)


def parse_relation(text: str, env: Environment) -> Automaton:
    d = parse_declarations(text, model=False)
    rels = [name for kind, name, *_ in d.items if kind == "rel"]
    if not rels:
        raise ModelError("relation file declares no rel")
    local = env.child()
    bound = bind_items(d.items, local)
    return bound[rels[-1]]


def load_relation(path, p: RegularPresentation) -> Automaton:
    path = Path(path)
    if not path.exists() and path.with_name(path.name + ".rel").exists():
        path = path.with_name(path.name + ".rel")
    r = parse_relation(path.read_text(), p.relation_env())
    if r.tapes != 2:
        raise ModelError(f"{path} exports a {r.tapes}-tape relation, need 2")
    return r


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    reason: str | None
    witness: tuple | None
    weight: int
    bound: int
    length_preserving: bool | None
    inferred: dict = field(default_factory=dict)

    def summary(self, base: Alphabet | None = None) -> str:
        head = f"w={self.weight}, N={self.bound}, length_preserving={str(self.length_preserving).lower()}"
        if self.valid:
            return f"Valid: {head}"
        show = (lambda w: base.show(w)) if base else (lambda w: "".join(w))
        wit = ", ".join(repr(show(w)) for w in self.witness) if self.witness else ""
        return f'Invalid("{self.reason}", witness = ({wit})): {head}'


def _distinct(names) -> list:
    from .logic.ast import Eq, Not

    return [Not(Eq(Var(a), Var(b))) for i, a in enumerate(names) for b in names[i + 1 :]]


def _witness(c) -> tuple | None:
    return A.shortest_tuple(c.automaton)


def validate(p: RegularPresentation) -> ValidationReport:
    """Decide the presentation-validity conditions, stopping at the first failure."""
    N, w = p.bound, p.weight
    env = p.env.child(_Num=LB.numeral_domain(p.base))
    base_report = dict(weight=w, bound=N, length_preserving=p.length_preserving)

    def invalid(reason, witness):
        return ValidationReport(False, reason, witness, **base_report)

    inferred = {}
    for a, delta in p.actions.items():
        e = env.child(_D=delta)
        comp = Compiler(e)
        run = lambda text, order: comp.compile(parse_formula(text), order)  # noqa: E731
        c = run("S(x) & S(y) & _D(x, y, z) & !(z in lang(_Num))", ("x", "y", "z"))
        if not c.automaton.is_empty():
            return invalid(f"action {a}: weight is not a canonical numeral", _witness(c))
        c = run("S(x) & S(y) & !(E z . _D(x, y, z))", ("x", "y"))
        if not c.automaton.is_empty():
            return invalid(f"action {a}: weight function is not total on S x S", _witness(c))
        c = run("S(x) & S(y) & (E z1, z2 . _D(x, y, z1) & _D(x, y, z2) & !(z1 = z2))", ("x", "y"))
        if not c.automaton.is_empty():
            return invalid(f"action {a}: weight relation is not single-valued", _witness(c))

        g = p.graph(a)
        e.bind("_G", g)
        nz = run("E z . _G(x, y, z)", ("x", "y")).automaton
        e.bind("_Nz", nz)
        ys = [f"y{i}" for i in range(1, N + 2)]
        f = parse_formula(
            "E " + ", ".join(ys) + " . " + " & ".join([f"_Nz(x, {y})" for y in ys] + [str(d) for d in _distinct(ys)])
        )
        c = comp.compile(f, ("x",))
        if not c.automaton.is_empty():
            return invalid(f"action {a}: more than {N} successors", _witness(c))

        if p.length_preserving:
            c = run("_Nz(x, y) & !eqlen(x, y)", ("x", "y"))
            if not c.automaton.is_empty():
                return invalid(f"action {a}: transition changes length", _witness(c))

        live = run("E y . _Nz(x, y)", ("x",)).automaton
        if live.is_empty():
            inferred[a] = 0
            continue
        bad = _weight_sum_violations(p, e, N, w, live)
        if not bad.is_empty():
            return invalid("weight sums differ", A.shortest_tuple(bad))
        inferred[a] = w
    return ValidationReport(True, None, None, inferred=inferred, **base_report)


def _weight_sum_violations(p: RegularPresentation, e: Environment, N: int, w: int, live: Automaton) -> Automaton:
    """Live states whose nonzero out-weights do not add up to w."""
    comp = Compiler(e)
    step = comp.compile(parse_formula("E z . _G(x, y, z) & add(t, z, s)"), ("x", "y", "t", "s")).automaton
    e.bind("_Step", step)
    e.bind("_P1", e.lookup("_G"))
    good = A.empty(p.alphabet(1))
    target = "".join(reversed(numeral_of(w)))
    for n in range(1, N + 1):
        ys = [f"y{i}" for i in range(1, n + 1)]
        if n > 1:
            prev = ", ".join(ys[:-1])
            text = f"E t . _P{n - 1}(x, {prev}, t) & _Step(x, {ys[-1]}, t, s)"
            dist = [f"!({y} = {ys[-1]})" for y in ys[:-1]]
            text = " & ".join([f"({text})"] + dist)
            pn = Compiler(e).compile(parse_formula(text), ("x", *ys, "s")).automaton
            e.bind(f"_P{n}", pn)
        cover = " | ".join(f"y = {y}" for y in ys)
        text = f"E {', '.join(ys)} . _P{n}(x, {', '.join(ys)}, {target}) & (A y . _Nz(x, y) => ({cover}))"
        good = A.union(good, Compiler(e).compile(parse_formula(text), ("x",)).automaton)
    return A.difference(live, good)


# ---------------------------------------------------------------- finite slices


@dataclass
class FinitePts:
    configs: list[tuple]
    actions: dict[str, list[dict[int, int]]]
    weight: int
    index: dict[tuple, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.index:
            self.index = {c: i for i, c in enumerate(self.configs)}

    def __len__(self) -> int:
        return len(self.configs)

    def live(self, s: int) -> list[str]:
        return [a for a, rows in self.actions.items() if rows[s]]

    def is_terminal(self, s: int) -> bool:
        return not any(rows[s] for rows in self.actions.values())

    def check_rows(self) -> None:
        for a, rows in self.actions.items():
            for s, row in enumerate(rows):
                if row and sum(row.values()) != self.weight:
                    raise PtsError(f"row {self.configs[s]} of {a} sums to {sum(row.values())}")

    def union(self, other: "FinitePts") -> "FinitePts":
        """Disjoint union; configs are re-sorted so the result is canonical."""
        if self.weight != other.weight:
            raise WeightMismatch(f"{self.weight} vs {other.weight}")
        if set(self.configs) & set(other.configs):
            raise DomainsOverlap(sorted(set(self.configs) & set(other.configs))[0])
        edges = {}
        for f in (self, other):
            for a, rows in f.actions.items():
                for s, row in enumerate(rows):
                    for t, wt in row.items():
                        edges[(a, f.configs[s], f.configs[t])] = wt
        return build_finite(self.configs + other.configs, sorted(set(self.actions) | set(other.actions)), edges, self.weight)

    def to_text(self, base: Alphabet) -> str:
        lines = [f"weight {self.weight}", "configs " + " ".join(base.show(c) for c in self.configs)]
        for a in sorted(self.actions):
            for s, row in enumerate(self.actions[a]):
                for t in sorted(row):
                    lines.append(f"{a} {base.show(self.configs[s])} {base.show(self.configs[t])} {row[t]}")
        return "\n".join(lines) + "\n"


def build_finite(configs, actions, edges: dict, weight: int, order=None) -> FinitePts:
    """FinitePts from (action, src, dst) -> weight; configs sorted by ``order``."""
    configs = sorted(set(configs), key=order) if order else sorted(set(configs))
    index = {c: i for i, c in enumerate(configs)}
    rows = {a: [dict() for _ in configs] for a in actions}
    for (a, s, t), wt in edges.items():
        if wt:
            rows[a][index[s]][index[t]] = wt
    return FinitePts(configs, rows, weight, index)


def _exact_length_words(a: Automaton, n: int):
    """Accepted words of exactly length n, in tuple order."""
    width = a.alphabet.width
    pad = a.alphabet.pad
    # good[k] = states that reach a final state in exactly k more letters
    good = [set(a.finals)]
    for _ in range(n):
        prev = good[-1]
        good.append({s for s in range(a.num_states) if any(M.evaluate(a.trans[s], (v,)) in prev for v in range(pad))})
    b = a.base
    out = []

    def go(s: int, i: int, prefix: tuple) -> None:
        if i == n:
            out.append(prefix)
            return
        need = good[n - i - 1]
        for v in range(pad):
            t = M.evaluate(a.trans[s], (v,))
            if t in need:
                go(t, i + 1, prefix + (b.symbols[v],))

    if a.initial in good[n]:
        go(a.initial, 0, ())
    return out


class _SuccessorEnumerator:
    """All (y, z) with G(x, y, z) for a fixed x, walking the MDDs directly."""

    def __init__(self, g: Automaton):
        self.g = g
        self.dead = A._dead_states(g)
        self.pad = g.alphabet.pad
        self.width = g.alphabet.width
        self._memo: dict = {}

    def _letters(self, code: int, xv: int):
        """(y value, z value, target) for letters with x component xv."""
        hit = self._memo.get((code, xv))
        if hit is not None:
            return hit
        out = self._memo[(code, xv)] = []
        dead = self.dead
        w = self.width

        def tape(c: int, i: int):
            if c >= 0 and M.node(c)[0] == i:
                return list(enumerate(M.node(c)[1]))
            return [(v, c) for v in range(w)]

        if code >= 0 and M.node(code)[0] == 0:
            code = M.node(code)[1][xv]
        for yv, c1 in tape(code, 1):
            if c1 < 0 and M.leaf_value(c1) in dead:
                continue
            for zv, c2 in tape(c1, 2):
                t = M.leaf_value(c2)
                if t not in dead:
                    out.append((yv, zv, t))
        return out

    def successors(self, x: tuple, zmax: int = 64):
        g = self.g
        b = g.base
        xs = tuple(b.index(s) for s in x)
        n = len(xs)
        pad = self.pad
        memo: dict = {}

        def tail(s: int, depth: int):
            # x and y padded; only z continues
            key = ("t", s, depth)
            if key in memo:
                return memo[key]
            res = [()] if s in g.finals else []
            if depth < zmax:
                for yv, zv, t in self._letters(g.trans[s], pad):
                    if yv == pad and zv != pad:
                        res.extend((zv,) + rest for rest in tail(t, depth + 1))
            memo[key] = res
            return res

        def go(i: int, s: int):
            key = (i, s)
            if key in memo:
                return memo[key]
            res = []
            if i == n:
                res = [((), z) for z in tail(s, 0)]
            else:
                for yv, zv, t in self._letters(g.trans[s], xs[i]):
                    if yv == pad:
                        continue  # successors keep the length
                    for ys, zs in go(i + 1, t):
                        if zv == pad and zs:
                            continue
                        res.append(((yv,) + ys, (zv,) + zs if zv != pad else zs))
            memo[key] = res
            return res

        out = []
        for ys, zs in go(0, g.initial):
            out.append((tuple(b.symbols[v] for v in ys), numeral_value(tuple(b.symbols[v] for v in zs))))
        return out


def slice_pts(p: RegularPresentation, n: int, cap: int = 500_000) -> FinitePts:
    """Configurations of length n and the weights between them."""
    if not p.length_preserving:
        raise NotLengthPreserving(f"model {p.name} is not length-preserving")
    configs = _exact_length_words(p.domain, n)
    if len(configs) > cap:
        raise SliceTooLarge(len(configs), cap)
    index = {c: i for i, c in enumerate(configs)}
    rows = {}
    for a in p.actions:
        en = _SuccessorEnumerator(p.graph(a))
        rs = []
        for c in configs:
            row = {}
            for y, wt in en.successors(c):
                if y not in index:
                    raise PtsError(f"successor {y} of {c} is outside the slice")
                row[index[y]] = wt
            rs.append(row)
        rows[a] = rs
    return FinitePts(configs, rows, p.weight, index)


class Explorer:
    """Successors of single configurations, computed on demand and cached.

    ``closure`` builds the finite subsystem reachable from given configurations.
    Configurations rejected by ``within`` are listed but not expanded.
    """

    def __init__(self, p: RegularPresentation, within: Automaton | None = None):
        self.p = p
        self.within = within
        self._en = {a: _SuccessorEnumerator(p.graph(a)) for a in p.actions}
        self._succ: dict = {}
        self._inside: dict = {}

    def inside(self, c: tuple) -> bool:
        hit = self._inside.get(c)
        if hit is None:
            hit = self._inside[c] = self.within is None or self.within.accepts(c)
        return hit

    def successors(self, c: tuple) -> dict[str, list]:
        hit = self._succ.get(c)
        if hit is None:
            hit = self._succ[c] = {a: en.successors(c) for a, en in self._en.items()}
        return hit

    def closure(self, starts, cap: int = 500_000) -> FinitePts:
        seen = dict.fromkeys(map(tuple, starts))
        stack = list(seen)
        while stack:
            c = stack.pop()
            if not self.inside(c):
                continue
            for succ in self.successors(c).values():
                for y, _ in succ:
                    if y not in seen:
                        seen[y] = None
                        stack.append(y)
                        if len(seen) > cap:
                            raise SliceTooLarge(len(seen), cap)
        edges = {}
        for c in seen:
            if self.inside(c):
                for a, succ in self.successors(c).items():
                    for y, wt in succ:
                        edges[(a, c, y)] = wt
        return build_finite(seen, list(self.p.actions), edges, self.p.weight)


# ---------------------------------------------------------------- unions


def disjoint_union(p: RegularPresentation, q: RegularPresentation, name: str | None = None) -> RegularPresentation:
    if p.base != q.base:
        raise PtsError("disjoint union needs a common alphabet")
    overlap = A.intersect(p.domain, q.domain)
    if not overlap.is_empty():
        raise DomainsOverlap(A.shortest_tuple(overlap))
    if p.weight != q.weight:
        raise WeightMismatch(f"weights {p.weight} and {q.weight} differ")
    alph3 = p.alphabet(3)
    zero = A.lift(A.from_words(p.alphabet(1), [(("0",),)]), 3, (2,))

    def inside(s: Automaton) -> Automaton:
        return A.intersect(A.lift(s, 3, (0,)), A.lift(s, 3, (1,)))

    sp, sq = inside(p.domain), inside(q.domain)
    dom = A.union(p.domain, q.domain)
    cross = A.difference(A.difference(inside(dom), sp), sq)
    actions = {}
    for a in list(p.actions) + [a for a in q.actions if a not in p.actions]:
        dp = A.intersect(p.actions[a], sp) if a in p.actions else A.intersect(zero, sp)
        dq = A.intersect(q.actions[a], sq) if a in q.actions else A.intersect(zero, sq)
        actions[a] = A.union(A.union(dp, dq), A.intersect(cross, zero))
    env = Environment(p.base)
    for src in (p.env, q.env):
        for k, v in src.bindings.items():
            if k not in env.bindings and k != "S" and k not in actions:
                env.bind(k, v)
    env.bind("S", dom)
    for a, d in actions.items():
        env.bind(a, d)
    return RegularPresentation(
        name or f"{p.name}+{q.name}",
        p.base,
        dom,
        actions,
        max(p.bound, q.bound),
        p.weight,
        p.length_preserving and q.length_preserving,
        env,
    )


# ---------------------------------------------------------------- traces


@dataclass(frozen=True)
class TraceDistribution:
    dist: dict
    unterminated: Fraction

    def total(self) -> Fraction:
        return sum(self.dist.values(), Fraction(0)) + self.unterminated


def trace_distribution(f: FinitePts, start, depth: int) -> TraceDistribution:
    """Exact trace distribution under the uniform external adversary."""
    if isinstance(start, int):
        s0 = start
    else:
        if tuple(start) not in f.index:
            raise StartUnknown(f"{start} is not a configuration of the slice")
        s0 = f.index[tuple(start)]
    w = f.weight
    dist: dict = {}
    layer: dict = {((), s0): Fraction(1)}
    unterminated = Fraction(0)
    for d in range(depth + 1):
        nxt: dict = {}
        for (trace, s), pr in layer.items():
            live = f.live(s)
            if not live:
                dist[trace] = dist.get(trace, 0) + pr
                continue
            if d == depth:
                unterminated += pr
                continue
            share = pr / len(live)
            for a in live:
                for t, wt in f.actions[a][s].items():
                    key = (trace + (a,), t)
                    nxt[key] = nxt.get(key, 0) + share * Fraction(wt, w)
        layer = nxt
    return TraceDistribution(dist, unterminated)


def tv_distance(p: TraceDistribution, q: TraceDistribution) -> Fraction:
    keys = set(p.dist) | set(q.dist)
    total = sum((abs(p.dist.get(k, 0) - q.dist.get(k, 0)) for k in keys), Fraction(0))
    total += abs(p.unterminated - q.unterminated)
    return total / 2
