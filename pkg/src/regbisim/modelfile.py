"""Reader for model files and relation files.

Both use ``;``-terminated declarations. A model file wraps them in
``model <name> { ... }``; a relation file is a bare list of ``lang`` and
``rel`` declarations whose last ``rel`` is the exported relation. Lines whose
first non-blank character is ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .automata import Alphabet, Automaton, TapedAlphabet
from .logic import Compiler, Environment, parse_formula
from .logic.ast import free_vars
from .regex import compile_regex, rewrite_relation


class ModelError(Exception):
    pass


@dataclass
class Declarations:
    name: str | None = None
    settings: dict[str, str] = field(default_factory=dict)
    # (kind, name, params, body) in file order; kind in lang/rel/domain/action
    items: list[tuple[str, str, tuple[str, ...], str]] = field(default_factory=list)


def _strip_comments(text: str) -> str:
    return "\n".join("" if line.lstrip().startswith("#") else line for line in text.splitlines())


def _split(body: str) -> list[str]:
    out, cur, quoted = [], [], False
    for ch in body:
        if ch == '"':
            quoted = not quoted
        if ch == ";" and not quoted:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        raise ModelError(f"declaration not terminated by ';': {tail[:40]!r}")
    return [d for d in out if d]


_LANG = re.compile(r"^lang\s+([A-Za-z_][\w']*)\s*=\s*(.*)$", re.S)
_REL = re.compile(r"^rel\s+([A-Za-z_][\w']*)\s*\(([^)]*)\)\s*=\s*(.*)$", re.S)
_ACTION = re.compile(r"^action\s+([A-Za-z_][\w']*)\s*=\s*(.*)$", re.S)
_SETTING = re.compile(r"^([A-Za-z_]\w*)\s*=\s*(.*)$", re.S)


def parse_declarations(text: str, *, model: bool) -> Declarations:
    text = _strip_comments(text)
    d = Declarations()
    if model:
        m = re.match(r"^\s*model\s+([A-Za-z_][\w']*)\s*\{(.*)\}\s*$", text, re.S)
        if not m:
            raise ModelError("expected 'model <name> { ... }'")
        d.name, text = m.group(1), m.group(2)
    for decl in _split(text):
        if m := _LANG.match(decl):
            d.items.append(("lang", m.group(1), (), m.group(2).strip()))
        elif m := _REL.match(decl):
            params = tuple(p.strip() for p in m.group(2).split(",") if p.strip())
            d.items.append(("rel", m.group(1), params, m.group(3).strip()))
        elif m := _ACTION.match(decl):
            if not model:
                raise ModelError("actions belong in model files")
            d.items.append(("action", m.group(1), ("x", "y", "z"), m.group(2).strip()))
        elif m := _SETTING.match(decl):
            key, val = m.group(1), m.group(2).strip()
            if not model:
                raise ModelError(f"setting {key!r} outside a model file")
            if key == "domain":
                d.items.append(("domain", "S", (), val))
            else:
                d.settings[key] = val
        else:
            raise ModelError(f"cannot read declaration {decl[:50]!r}")
    return d


def parse_alphabet(text: str) -> Alphabet:
    m = re.match(r"^\[(.*)\]$", text.strip(), re.S)
    if not m:
        raise ModelError("alphabet must be written [s1, s2, ...]")
    syms = tuple(s.strip() for s in m.group(1).split(",") if s.strip())
    return Alphabet(syms)


def compile_body(body: str, params: tuple[str, ...], comp: Compiler) -> Automaton:
    """Compile a declaration body: regex, rewrite rule or formula."""
    k = len(params) or 1
    alph = TapedAlphabet(comp.base, k)
    if body.startswith("regex "):
        return compile_regex(body[6:], alph)
    m = re.match(r'^rewrite\s+"([^"]*)"\s*->\s*"([^"]*)"$', body)
    if m:
        return rewrite_relation(m.group(1), m.group(2), alph)
    f = parse_formula(body)
    fv = free_vars(f)
    if params:
        extra = set(fv) - set(params)
        if extra:
            raise ModelError(f"free variables {sorted(extra)} not among parameters {params}")
        order = params
    else:
        if len(fv) > 1:
            raise ModelError(f"a language needs one free variable, found {fv}")
        order = fv or ("x",)
    c = comp.compile(f, order)
    if c.automaton is None:
        from .automata import empty, universal

        return universal(alph) if c.truth else empty(alph)
    return c.automaton


def bind_items(items, env: Environment, kinds=("lang", "rel", "domain", "action")) -> dict[str, Automaton]:
    """Compile declarations in order, binding each name for later ones."""
    out: dict[str, Automaton] = {}
    for kind, name, params, body in items:
        if kind not in kinds:
            continue
        comp = Compiler(env)
        a = compile_body(body, params, comp)
        if name in env.bindings:
            raise ModelError(f"name {name!r} declared twice")
        env.bind(name, a)
        out[name] = a
    return out
