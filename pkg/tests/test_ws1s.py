import itertools
import random
from pathlib import Path

import pytest

from mona import Program, word_set
from oracles import VARS, Tarski, random_formula, words
from regbisim.logic import parse_formula
from regbisim.logic.ast import free_vars
from regbisim.logic.ws1s import UnsupportedAtom, export_ws1s

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "prefix": ("x <=p y", lambda u, v: v[: len(u)] == u),
    "eqlen": ("eqlen(x, y)", lambda u, v: len(u) == len(v)),
    "last_1": ("last_1(x)", lambda u: len(u) > 0 and u[-1] == "1"),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_macro_export_matches_golden(name):
    text, _ = CASES[name]
    assert export_ws1s(parse_formula(text)) == (GOLDEN / f"{name}.mona").read_text()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_means_what_it_says(name):
    text, meaning = CASES[name]
    prog = Program((GOLDEN / f"{name}.mona").read_text(), bound=4)
    names = free_vars(parse_formula(text))
    for ws in itertools.product(words(("0", "1"), 3), repeat=len(names)):
        env = {f"W_{v}": word_set(w) for v, w in zip(names, ws)}
        assert prog.holds(env) == meaning(*ws), ws


def test_random_exports_agree_with_tarski():
    rng = random.Random(11)
    bound = 2
    tarski = Tarski(bound=bound)
    universe = words(("0", "1"), bound)
    checked = 0
    while checked < 25:
        f = random_formula(rng, 3)
        prog = Program(export_ws1s(f), bound=bound)
        table = tarski.eval(f)
        fv = free_vars(f)
        for ws in itertools.product(universe, repeat=len(fv)):
            assignment = dict(zip(fv, ws))
            full = {v: assignment.get(v, ()) for v in VARS}
            env = {f"W_{v}": word_set(w) for v, w in assignment.items()}
            assert prog.holds(env) == tarski.holds(f, full, table), (str(f), ws)
        checked += 1


def test_literals_and_wide_alphabets_are_rejected():
    with pytest.raises(UnsupportedAtom):
        export_ws1s(parse_formula('x = "01"'))
    from regbisim.automata import Alphabet
    from regbisim.logic import Environment

    with pytest.raises(UnsupportedAtom):
        export_ws1s(parse_formula("x <=p y"), Environment(Alphabet(("a", "b", "c"))))
