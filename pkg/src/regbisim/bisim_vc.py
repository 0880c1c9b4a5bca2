"""Symbolic verification that a regular relation is a probabilistic bisimulation.

Two encodings of the per-action condition are available. ``partition``
enumerates exact successor counts and set partitions of the successor slots,
mirroring the formula with numeric labels. ``class-mass`` (the default) states
the same condition through the mass each state sends into the R-class of each
successor; for an equivalence R both define the same set of violating pairs,
and the second needs far fewer tapes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from . import automata as A
from .automata import Automaton, ResourceExceeded
from .logic import Compiler, Environment, parse_formula
from .pts import RegularPresentation

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class Candidate:
    presentation: RegularPresentation
    relation: Automaton
    seed: Automaton | None = None

    def __post_init__(self):
        base = self.presentation.base
        for name, r in (("relation", self.relation), ("seed", self.seed)):
            if r is None:
                continue
            if r.base != base:
                raise A.AlphabetMismatch(f"{name} uses a different alphabet")
            if r.tapes != 2:
                raise A.BadTapeIndex(f"{name} has {r.tapes} tapes, need 2")


@dataclass(frozen=True)
class VerifyOutcome:
    kind: str  # Verified | NotEquivalence | SeedNotContained | NotBisim | ResourceExceeded
    detail: str | None = None  # refl/sym/trans, or the action
    witness: tuple | None = None
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def verified(self) -> bool:
        return self.kind == "Verified"

    def describe(self, base=None) -> str:
        if self.verified:
            return "Verified"
        if self.kind == "ResourceExceeded":
            return f"ResourceExceeded({self.detail})"
        show = base.show if base else "".join
        wit = ", ".join(repr(show(w)) for w in self.witness or ())
        return f"{self.kind}({self.detail}, ({wit}))"

    def report(self, base=None) -> str:
        show = base.show if base else "".join
        doc = {
            "outcome": self.kind,
            "detail": self.detail,
            "witness": None if self.witness is None else [show(w) for w in self.witness],
            "stats": self.stats,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _env(p: RegularPresentation, **extra) -> Environment:
    return p.env.child(**extra)


def _empty_or_witness(comp: Compiler, text: str, order) -> tuple | None:
    a = comp.compile(parse_formula(text), order).automaton
    return None if a.is_empty() else A.shortest_tuple(a)


def check_equivalence_relation(r: Automaton, domain: Automaton) -> VerifyOutcome | None:
    """Reflexive on the domain, symmetric and transitive, or the first failure."""
    env = Environment(domain.base, {"_S": domain, "_R": r})
    comp = Compiler(env)
    checks = [
        ("refl", "_S(x) & !_R(x, x)", ("x",)),
        ("sym", "_S(x) & _S(y) & _R(x, y) & !_R(y, x)", ("x", "y")),
    ]
    for kind, text, order in checks:
        w = _empty_or_witness(comp, text, order)
        if w is not None:
            return VerifyOutcome("NotEquivalence", kind, w)
    # Transitivity on two tapes first: projecting the middle word early keeps
    # the product small. The middle word is recovered only on failure.
    ends = _empty_or_witness(
        comp, "_S(x) & _S(z) & (E y . _S(y) & _R(x, y) & _R(y, z)) & !_R(x, z)", ("x", "z")
    )
    if ends is None:
        return None
    env.bind("_W", A.from_words(domain.alphabet.with_tapes(2), [ends]))
    x, y, z = _empty_or_witness(comp, "_W(x, z) & _R(x, y) & _R(y, z) & _S(y)", ("x", "y", "z"))
    return VerifyOutcome("NotEquivalence", "trans", (x, y, z))


# ---------------------------------------------------------------- partitions


def set_partitions(items) -> Iterator[list[list]]:
    items = list(items)
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1 :]
        yield [[head]] + part


@lru_cache(maxsize=None)
def bell(n: int) -> int:
    return sum(1 for _ in set_partitions(range(n)))


def _chain(names: list[str], total: str, fresh: str) -> str:
    """Formula text saying ``total`` is the sum of the numerals ``names``."""
    if not names:
        return f"{total} = 0"
    if len(names) == 1:
        return f"{total} = {names[0]}"
    acc = names[0]
    parts, bound = [], []
    for i, z in enumerate(names[1:], 1):
        nxt = total if i == len(names) - 1 else f"{fresh}{i}"
        parts.append(f"add({acc}, {z}, {nxt})")
        if nxt != total:
            bound.append(nxt)
        acc = nxt
    body = " & ".join(parts)
    return f"(E {', '.join(bound)} . {body})" if bound else body


def _succ_exact(state: str, ys: list[str], zs: list[str]) -> list[str]:
    """Exactly the listed distinct configurations are successors, with weights zs."""
    out = [f"_G({state}, {y}, {z})" for y, z in zip(ys, zs)]
    out += [f"!({a} = {b})" for i, a in enumerate(ys) for b in ys[i + 1 :]]
    cover = " | ".join(f"u = {y}" for y in ys) if ys else "false"
    out.append(f"(A u . _Nz({state}, u) => ({cover}))")
    return out


@dataclass(frozen=True)
class Disjunct:
    n: int
    m: int
    blocks: tuple
    satisfiable: bool  # False when a block has slots from one side only
    text: str


def build_vc(p: RegularPresentation) -> dict[str, dict[tuple[int, int], list[Disjunct]]]:
    """Per action and (n, m), the partition disjuncts of the transfer condition."""
    N = p.bound
    out = {}
    for a in p.actions:
        per = {}
        for n in range(N + 1):
            for m in range(N + 1):
                ps = [f"p{i}" for i in range(1, n + 1)]
                qs = [f"q{i}" for i in range(1, m + 1)]
                zp = [f"zp{i}" for i in range(1, n + 1)]
                zq = [f"zq{i}" for i in range(1, m + 1)]
                slots = ps + qs
                weight = dict(zip(ps + qs, zp + zq))
                ds = []
                for part in set_partitions(slots):
                    ok = all(any(s in ps for s in b) and any(s in qs for s in b) for b in part)
                    conj = _succ_exact("x", ps, zp) + _succ_exact("y", qs, zq)
                    home = {s: i for i, b in enumerate(part) for s in b}
                    for i, s in enumerate(slots):
                        for t in slots[i + 1 :]:
                            conj.append(f"_R({s}, {t})" if home[s] == home[t] else f"!_R({s}, {t})")
                    for bi, b in enumerate(part):
                        lp = [weight[s] for s in b if s in ps]
                        lq = [weight[s] for s in b if s in qs]
                        conj.append(
                            f"(E w . {_chain(lp, 'w', f'c{bi}l')} & {_chain(lq, 'w', f'c{bi}r')})"
                        )
                    bound = slots + zp + zq
                    body = " & ".join(conj) if conj else "true"
                    text = f"E {', '.join(bound)} . {body}" if bound else body
                    ds.append(Disjunct(n, m, tuple(map(tuple, part)), ok, text))
                per[(n, m)] = ds
        out[a] = per
    return out


# ---------------------------------------------------------------- checking


def _violations_class_mass(p: RegularPresentation, env: Environment) -> Automaton:
    """Pairs of R inside S x S that break the transfer condition for ``_G``."""
    N = p.bound
    comp = Compiler(env)
    c = lambda text, order: comp.compile(parse_formula(text), order).automaton  # noqa: E731
    env.bind("_RG", c("_R(y, v) & _G(x, v, s)", ("x", "y", "v", "s")))
    env.bind("_C1", env.lookup("_RG"))
    env.bind("_RNz", c("E v . _R(y, v) & _Nz(x, v)", ("x", "y")))
    parts = ["(m = 0 & !_RNz(x, y))"]
    for k in range(1, N + 1):
        vs = [f"v{i}" for i in range(1, k + 1)]
        if k > 1:
            prev = ", ".join(vs[:-1])
            dist = " & ".join(f"!({v} = {vs[-1]})" for v in vs[:-1])
            text = f"(E t, z . _C{k - 1}(x, y, {prev}, t) & _RG(x, y, {vs[-1]}, z) & add(t, z, s)) & {dist}"
            env.bind(f"_C{k}", c(text, ("x", "y", *vs, "s")))
        cover = " | ".join(f"u = {v}" for v in vs)
        parts.append(
            f"(E {', '.join(vs)} . _C{k}(x, y, {', '.join(vs)}, m) & (A u . _R(y, u) & _Nz(x, u) => ({cover})))"
        )
    env.bind("_Mass", c(" | ".join(parts), ("x", "y", "m")))
    return c(
        "_S(p) & _S(q) & _R(p, q) & (E y . (_Nz(p, y) | _Nz(q, y)) & !(E m . _Mass(p, y, m) & _Mass(q, y, m)))",
        ("p", "q"),
    )


def _violations_partition(p: RegularPresentation, env: Environment, action: str, vc) -> Automaton:
    comp = Compiler(env)
    phi = A.empty(p.alphabet(2))
    for (n, m), ds in sorted(vc[action].items()):
        for d in ds:
            if d.satisfiable:
                phi = A.union(phi, comp.compile(parse_formula(d.text), ("x", "y")).automaton)
    env.bind("_Phi", phi)
    dead = "!(E u . _Nz(x, u)) & !(E u . _Nz(y, u))"
    return comp.compile(parse_formula(f"_S(x) & _S(y) & _R(x, y) & !(({dead}) | _Phi(x, y))"), ("x", "y")).automaton


def verify(c: Candidate, method: str = "class-mass", budget: int | None = DEFAULT_BUDGET) -> VerifyOutcome:
    if method not in ("class-mass", "partition"):
        raise ValueError(f"unknown method {method!r}")
    p = c.presentation
    try:
        with A.state_budget(budget):
            bad = check_equivalence_relation(c.relation, p.domain)
            if bad is not None:
                return bad
            if c.seed is not None:
                miss = A.difference(c.seed, c.relation)
                if not miss.is_empty():
                    return VerifyOutcome("SeedNotContained", None, A.shortest_tuple(miss))
            vc = build_vc(p) if method == "partition" else None
            stats = {}
            for a in p.actions:
                g = p.graph(a)
                env = _env(p, _S=p.domain, _R=c.relation, _G=g)
                env.bind("_Nz", A.project(g, 2))
                if method == "class-mass":
                    v = _violations_class_mass(p, env)
                else:
                    v = _violations_partition(p, env, a, vc)
                stats[a] = v.num_states
                if not v.is_empty():
                    return VerifyOutcome("NotBisim", a, A.shortest_tuple(v), stats)
            return VerifyOutcome("Verified", None, None, stats)
    except ResourceExceeded as e:
        return VerifyOutcome("ResourceExceeded", f"{e.states} states beyond cap {e.cap}")


def identity_on(domain: Automaton) -> Automaton:
    env = Environment(domain.base, {"_S": domain})
    return Compiler(env).compile(parse_formula("_S(x) & x = y"), ("x", "y")).automaton


def total_on(domain: Automaton) -> Automaton:
    env = Environment(domain.base, {"_S": domain})
    return Compiler(env).compile(parse_formula("_S(x) & _S(y)"), ("x", "y")).automaton
