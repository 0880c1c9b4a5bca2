"""Hash-consed multi-valued decision diagrams used as transition functions.

A transition function of a deterministic multi-tape automaton maps a letter
``(v_0, ..., v_{k-1})`` to a target state. We store it as an ordered MDD:
internal nodes test one tape and have one child per symbol value (base
symbols ``0..m-1`` followed by the pad ``m``); leaves carry an integer payload.
Tapes are tested in increasing order along every path and a node whose
children are all equal is never created, so each function has exactly one
representation.

Codes: a non-negative int is an internal node id, a negative int ``c`` is a
leaf with payload ``-c - 1``.
"""

from __future__ import annotations

import threading

_nodes: list[tuple[int, tuple[int, ...]]] = []
_index: dict[tuple[int, tuple[int, ...]], int] = {}
_lock = threading.Lock()


def leaf(value: int) -> int:
    return -value - 1


def is_leaf(code: int) -> bool:
    return code < 0


def leaf_value(code: int) -> int:
    return -code - 1


def node(code: int) -> tuple[int, tuple[int, ...]]:
    return _nodes[code]


def tape_of(code: int) -> int | None:
    return None if code < 0 else _nodes[code][0]


def mk(tape: int, children) -> int:
    children = tuple(children)
    first = children[0]
    for c in children:
        if c != first:
            break
    else:
        return first
    key = (tape, children)
    nid = _index.get(key)
    if nid is None:
        with _lock:
            nid = _index.get(key)
            if nid is None:
                nid = len(_nodes)
                _nodes.append(key)
                _index[key] = nid
    return nid


def store_size() -> int:
    return len(_nodes)


def _cofactors(code: int, tape: int, width: int):
    if code >= 0:
        t, ch = _nodes[code]
        if t == tape:
            return ch
    return (code,) * width


def apply2(f: int, g: int, width: int, leafop, memo: dict | None = None) -> int:
    """Combine two functions pointwise; ``leafop(a, b)`` gets leaf payloads."""
    if memo is None:
        memo = {}

    def go(a: int, b: int) -> int:
        key = (a, b)
        r = memo.get(key)
        if r is not None:
            return r
        if a < 0 and b < 0:
            r = leaf(leafop(-a - 1, -b - 1))
        else:
            ta = _nodes[a][0] if a >= 0 else None
            tb = _nodes[b][0] if b >= 0 else None
            if ta is None:
                top = tb
            elif tb is None:
                top = ta
            else:
                top = min(ta, tb)
            ca = _cofactors(a, top, width)
            cb = _cofactors(b, top, width)
            r = mk(top, [go(x, y) for x, y in zip(ca, cb)])
        memo[key] = r
        return r

    return go(f, g)


def map_leaves(f: int, fn, memo: dict | None = None) -> int:
    """Replace every leaf payload ``v`` by ``fn(v)``."""
    if memo is None:
        memo = {}

    def go(a: int) -> int:
        r = memo.get(a)
        if r is not None:
            return r
        if a < 0:
            r = leaf(fn(-a - 1))
        else:
            t, ch = _nodes[a]
            r = mk(t, [go(c) for c in ch])
        memo[a] = r
        return r

    return go(f)


def relabel(f: int, tape_map, memo: dict | None = None) -> int:
    """Rename tapes by a strictly increasing map (order preserved)."""
    if memo is None:
        memo = {}

    def go(a: int) -> int:
        if a < 0:
            return a
        r = memo.get(a)
        if r is not None:
            return r
        t, ch = _nodes[a]
        r = mk(tape_map[t], [go(c) for c in ch])
        memo[a] = r
        return r

    return go(f)


def case(tape: int, branches: tuple[int, ...], width: int, memo: dict) -> int:
    """Build ``if tape == v then branches[v]``; branches must not test ``tape``."""
    key = (tape, branches)
    r = memo.get(key)
    if r is not None:
        return r
    first = branches[0]
    if all(b == first for b in branches):
        r = first
    else:
        tops = [_nodes[b][0] for b in branches if b >= 0]
        top = min(tops) if tops else None
        if top is None or top > tape:
            r = mk(tape, branches)
        else:
            cof = [_cofactors(b, top, width) for b in branches]
            r = mk(top, [case(tape, tuple(c[v] for c in cof), width, memo) for v in range(width)])
    memo[key] = r
    return r


def remap(f: int, tape_map, width: int, memo: dict | None = None, case_memo: dict | None = None) -> int:
    """Rename tapes by an arbitrary injective map."""
    if memo is None:
        memo = {}
    if case_memo is None:
        case_memo = {}

    def go(a: int) -> int:
        if a < 0:
            return a
        r = memo.get(a)
        if r is not None:
            return r
        t, ch = _nodes[a]
        r = case(tape_map[t], tuple(go(c) for c in ch), width, case_memo)
        memo[a] = r
        return r

    return go(f)


def evaluate(f: int, letter) -> int:
    """Leaf payload reached by a concrete letter (tuple of value indices)."""
    a = f
    while a >= 0:
        t, ch = _nodes[a]
        a = ch[letter[t]]
    return -a - 1


def leaves_in_order(f: int) -> list[int]:
    """Distinct leaf payloads in lexicographic order of the letters reaching them."""
    seen_nodes: set[int] = set()
    seen: dict[int, None] = {}

    def go(a: int) -> None:
        if a < 0:
            seen.setdefault(-a - 1, None)
            return
        if a in seen_nodes:
            return
        seen_nodes.add(a)
        for c in _nodes[a][1]:
            go(c)

    go(f)
    return list(seen)


def iter_letters(f: int, tapes: int, width: int):
    """Yield ``(letter, payload)`` for every concrete letter in lex order."""

    def go(a: int, j: int, prefix: tuple[int, ...]):
        if j == tapes:
            yield prefix, -a - 1
            return
        if a >= 0 and _nodes[a][0] == j:
            for v, c in enumerate(_nodes[a][1]):
                yield from go(c, j + 1, prefix + (v,))
        else:
            for v in range(width):
                yield from go(a, j + 1, prefix + (v,))

    yield from go(f, 0, ())


def cube(sets, width: int, hit: int, miss: int) -> int:
    """Function sending letters inside the product of ``sets`` to ``hit``.

    ``sets[j]`` is a collection of allowed values for tape ``j`` (``None``
    meaning unconstrained); ``hit`` and ``miss`` are leaf codes.
    """
    r = hit
    for j in range(len(sets) - 1, -1, -1):
        s = sets[j]
        if s is None:
            continue
        r = mk(j, [r if v in s else miss for v in range(width)])
    return r
