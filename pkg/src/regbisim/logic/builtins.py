"""Standard automata for the atoms of the universal automatic structure."""

from __future__ import annotations

from functools import lru_cache

from ..automata import Alphabet, Automaton, TapedAlphabet, from_dfa, intersect, lift


class MissingDigits(Exception):
    def __init__(self, base: Alphabet):
        super().__init__(f"numeral relations need symbols 0 and 1; alphabet is {list(base.symbols)}")


SINK = -1  # any int outside a builtin's state range works as a sink


def _digits(base: Alphabet) -> tuple[int, int]:
    if "0" not in base.symbols or "1" not in base.symbols:
        raise MissingDigits(base)
    return base.index("0"), base.index("1")


@lru_cache(maxsize=None)
def prefix(base: Alphabet) -> Automaton:
    pad = len(base)

    def step(s, l):
        x, y = l
        if s == 0 and x != pad and x == y:
            return 0
        if s in (0, 1) and x == pad and y != pad:
            return 1
        return 9

    return from_dfa(TapedAlphabet(base, 2), 0, [0, 1], step)


@lru_cache(maxsize=None)
def eqlen(base: Alphabet) -> Automaton:
    pad = len(base)
    return from_dfa(TapedAlphabet(base, 2), 0, [0], lambda s, l: 0 if s == 0 and pad not in l else 9)


@lru_cache(maxsize=None)
def equal(base: Alphabet) -> Automaton:
    pad = len(base)
    return from_dfa(TapedAlphabet(base, 2), 0, [0], lambda s, l: 0 if s == 0 and l[0] == l[1] != pad else 9)


@lru_cache(maxsize=None)
def last(base: Alphabet, symbol: str) -> Automaton:
    a = base.index(symbol)
    pad = len(base)

    def step(s, l):
        if s == 9 or l[0] == pad:
            return 9
        return 1 if l[0] == a else 0

    return from_dfa(TapedAlphabet(base, 1), 0, [1], step)


@lru_cache(maxsize=None)
def succ_prefix(base: Alphabet) -> Automaton:
    """``y = x·c`` for a single symbol ``c``."""
    pad = len(base)

    def step(s, l):
        x, y = l
        if s == 0 and x == y != pad:
            return 0
        if s == 0 and x == pad and y != pad:
            return 1
        return 9

    return from_dfa(TapedAlphabet(base, 2), 0, [1], step)


@lru_cache(maxsize=None)
def numeral_domain(base: Alphabet) -> Automaton:
    """Canonical numerals, stored least significant digit first.

    Surface forms are "0" and 1(0|1)*, so stored words are "0" and (0|1)*1.
    """
    d0, d1 = _digits(base)
    # 0 start, 1 read "0", 2 ends in 1, 3 ends in 0 after more digits
    table = {(0, d0): 1, (0, d1): 2, (1, d0): 3, (1, d1): 2, (2, d0): 3, (2, d1): 2, (3, d0): 3, (3, d1): 2}
    return from_dfa(TapedAlphabet(base, 1), 0, [1, 2], lambda s, l: table.get((s, l[0]), 9))


@lru_cache(maxsize=None)
def add(base: Alphabet) -> Automaton:
    """Triples (x, z, y) of canonical numerals with y = x + z."""
    d0, d1 = _digits(base)
    pad = len(base)
    val = {d0: 0, d1: 1, pad: 0}

    def step(carry, l):
        if carry not in (0, 1) or any(v not in val for v in l):
            return 9
        total = val[l[0]] + val[l[1]] + carry
        return total >> 1 if total & 1 == val[l[2]] else 9

    carry_machine = from_dfa(TapedAlphabet(base, 3), 0, [0], step)
    r = carry_machine
    dom = numeral_domain(base)
    for t in range(3):
        r = intersect(r, lift(dom, 3, (t,)))
    return r


def numeral_word(digits: str) -> tuple[str, ...]:
    """Surface numeral (most significant first) to its stored word."""
    if not digits or any(c not in "01" for c in digits):
        raise ValueError(f"not a binary numeral: {digits!r}")
    if len(digits) > 1 and digits[0] == "0":
        raise ValueError(f"numeral has a leading zero: {digits!r}")
    return tuple(reversed(digits))


def numeral_value(word) -> int:
    return sum(1 << i for i, c in enumerate(word) if c == "1")


def numeral_of(n: int) -> tuple[str, ...]:
    return numeral_word(bin(n)[2:])


def builtin_relation(name: str, base: Alphabet, symbol: str | None = None) -> Automaton:
    table = {
        "prefix": prefix,
        "eqlen": eqlen,
        "eq": equal,
        "succ_prefix": succ_prefix,
        "succp": succ_prefix,
        "add": add,
        "numeral_domain": numeral_domain,
    }
    if name in ("last", "last_a"):
        if symbol is None:
            raise ValueError("last needs a symbol")
        return last(base, symbol)
    if name not in table:
        raise KeyError(f"unknown builtin {name!r}")
    return table[name](base)
