"""Textual WS1S translation in MONA syntax.

A word w becomes the finite set whose characteristic string is w·1, so every
word maps to a nonempty set whose maximum is |w|. Word quantifiers are
therefore relativized to nonempty sets.
"""

from __future__ import annotations

from .ast import (
    And,
    Eq,
    EqLen,
    Exists,
    FalseF,
    Forall,
    Formula,
    Iff,
    Implies,
    Last,
    Not,
    Or,
    Prefix,
    SuccP,
    TrueF,
    Var,
    free_vars,
)


class UnsupportedAtom(Exception):
    pass


MACROS = {
    "m": "pred m(var1 x, var2 X) = x in X & (all1 y: y in X => y <= x);",
    "Pref": "pred Pref(var2 X, var2 Y) = ex1 x, y: m(x, X) & m(y, Y) & x <= y & (all1 z: z < x => (z in X <=> z in Y));",
    "EqL": "pred EqL(var2 X, var2 Y) = ex1 x, y: m(x, X) & m(y, Y) & x = y;",
    "L_1": "pred L_1(var2 X) = ex1 x: m(x, X) & x >= 1 & (x - 1) in X;",
    "L_0": "pred L_0(var2 X) = ex1 x: m(x, X) & x >= 1 & ~((x - 1) in X);",
    "Succ": "pred Succ(var2 X, var2 Y) = Pref(X, Y) & (ex1 x, y: m(x, X) & m(y, Y) & y = x + 1);",
}
_NEEDS = {"Pref": ["m"], "EqL": ["m"], "L_1": ["m"], "L_0": ["m"], "Succ": ["m", "Pref"], "m": []}
_ORDER = ["m", "Pref", "EqL", "L_1", "L_0", "Succ"]


def _set(v) -> str:
    if not isinstance(v, Var):
        raise UnsupportedAtom(f"literal term {v} has no set translation")
    return "W_" + v.name.replace("'", "_p")


def export_ws1s(f: Formula, env=None) -> str:
    if env is not None and tuple(sorted(env.base.symbols)) != ("0", "1"):
        raise UnsupportedAtom("export needs the binary alphabet {0, 1}")
    used: set[str] = set()

    def need(name: str) -> None:
        used.add(name)
        for n in _NEEDS[name]:
            need(n)

    def go(g: Formula) -> str:
        if isinstance(g, TrueF):
            return "true"
        if isinstance(g, FalseF):
            return "false"
        if isinstance(g, Not):
            return f"~({go(g.body)})"
        if isinstance(g, And):
            return f"({go(g.left)} & {go(g.right)})"
        if isinstance(g, Or):
            return f"({go(g.left)} | {go(g.right)})"
        if isinstance(g, Implies):
            return f"({go(g.left)} => {go(g.right)})"
        if isinstance(g, Iff):
            return f"({go(g.left)} <=> {go(g.right)})"
        if isinstance(g, (Exists, Forall)):
            sets = ", ".join(_set(Var(v)) for v in g.vars)
            guard = " & ".join(f"{_set(Var(v))} ~= empty" for v in g.vars)
            if isinstance(g, Exists):
                return f"(ex2 {sets}: {guard} & {go(g.body)})"
            return f"(all2 {sets}: ({guard}) => {go(g.body)})"
        if isinstance(g, Prefix):
            need("Pref")
            return f"Pref({_set(g.x)}, {_set(g.y)})"
        if isinstance(g, EqLen):
            need("EqL")
            return f"EqL({_set(g.x)}, {_set(g.y)})"
        if isinstance(g, SuccP):
            need("Succ")
            return f"Succ({_set(g.x)}, {_set(g.y)})"
        if isinstance(g, Eq):
            return f"{_set(g.x)} = {_set(g.y)}"
        if isinstance(g, Last):
            if g.symbol not in ("0", "1"):
                raise UnsupportedAtom(f"last_{g.symbol} outside the binary alphabet")
            name = f"L_{g.symbol}"
            need(name)
            return f"{name}({_set(g.x)})"
        raise UnsupportedAtom(f"{type(g).__name__} has no exported definition")

    body = go(f)
    lines = ["# WS1S translation, MONA syntax", "ws1s;"]
    lines += [MACROS[n] for n in _ORDER if n in used]
    fv = free_vars(f)
    if fv:
        sets = [_set(Var(v)) for v in fv]
        lines.append(f"var2 {', '.join(sets)};")
        lines.append(" & ".join(f"{s} ~= empty" for s in sets) + ";")
    lines.append(body + ";")
    return "\n".join(lines) + "\n"
