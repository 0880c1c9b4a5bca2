"""Acceptance gate: one pass/fail line per criterion.

Run under pytest (each criterion is a test and prints its line) or directly
with ``python tests/test_acceptance.py``, which prints all nine lines.
"""

import itertools
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import naive_partition, random_formula  # noqa: E402
from test_finite_bisim import as_partition, random_pts  # noqa: E402
from test_logic import B, check_against_tarski  # noqa: E402
from regbisim import automata as A  # noqa: E402
from regbisim import learner, models  # noqa: E402
from regbisim.bisim_vc import Candidate, identity_on, verify  # noqa: E402
from regbisim.finite_bisim import greatest_bisimulation, naive_oracle  # noqa: E402
from regbisim.logic import Compiler, Environment, builtin_relation, decide_sentence, numeral_of, parse_formula  # noqa: E402
from regbisim.logic.ws1s import export_ws1s  # noqa: E402
from regbisim.pts import parse_model, slice_pts, trace_distribution, tv_distance, validate  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"
CRITERIA: dict = {}


def criterion(n, title, limit):
    def wrap(fn):
        CRITERIA[n] = (title, limit, fn)
        return fn

    return wrap


@criterion(1, "logic soundness fuzz", 120)
def logic_fuzz():
    rng = random.Random(2024)
    comp = Compiler(Environment(B))
    for _ in range(200):
        check_against_tarski(random_formula(rng, 4), comp, max_len=4)
    return "200 formulas, words up to length 4"


@criterion(2, "add against integer addition", 5)
def arithmetic():
    # functional in its third tape, so accepting x + z rules out every other sum
    functional = parse_formula("A x, z, u, v . add(x, z, u) & add(x, z, v) => u = v")
    assert decide_sentence(functional, Environment(B))
    add = builtin_relation("add", B)
    for x in range(129):
        for z in range(129):
            assert add.accepts(numeral_of(x), numeral_of(z), numeral_of(x + z)), (x, z)
    return "0..128 squared, third tape functional"


@criterion(3, "partition refinement against naive oracle", 60)
def oracle_equivalence():
    for seed in range(100):
        f = random_pts(random.Random(seed), max_states=20, max_actions=2, w=4)
        g = greatest_bisimulation(f)
        assert g == naive_oracle(f), seed
        assert g == as_partition(naive_partition(range(len(f)), list(f.actions), f.actions)), seed
    return "100 systems"


@criterion(4, "pPDA paper relation and mutant", 300)
def ppda():
    b = models.build("ppda")
    p = b.presentation
    ok = verify(Candidate(p, b.relation("paper_R"), b.seed))
    assert ok.verified, ok.describe(p.base)
    bad = verify(Candidate(p, b.relation("mutated_R"), b.seed))
    assert bad.kind == "NotBisim", bad.describe(p.base)
    n = max(map(len, bad.witness))
    assert n <= 6
    return f"Verified; mutant NotBisim at convolution length {n}"


@criterion(5, "random walk validity", 60)
def walk():
    src = (models.resolve("random_walk") / "model.pts").read_text()
    p = parse_model(src)
    rep = validate(p)
    assert rep.valid and (rep.weight, rep.bound) == (4, 2)
    # from position 1: loop with 4, move up with 1, move down with 3
    steps = [("loop", ("1",), 4), ("move", ("1", "1"), 1), ("move", (), 3)]
    for a, y, k in steps:
        assert p.graph(a).accepts(("1",), y, numeral_of(k)), (a, y, k)
        assert not p.graph(a).accepts(("1",), y, numeral_of(k + 1)), (a, y, k)
    weights = [k for *_, k in steps]
    bad = validate(parse_model(src.replace("x = y & z = 100", "x = y & z = 11")))
    assert not bad.valid and bad.witness is not None
    return f"w=4, N=2, weights {weights}; corrupted variant rejected at {bad.witness}"


def _primed(w):
    return tuple(s + "'" for s in w)


@criterion(6, "dcp_single anonymity at n = 3, 4, 5", 300)
def anonymity():
    b = models.build("dcp_single")
    checked = 0
    for n in (3, 4, 5):
        f = slice_pts(b.presentation, n)
        block = greatest_bisimulation(f).mapping()
        starts = [x for x in itertools.product(("u0", "u1"), repeat=n)]
        starts += [_primed(x) for x in starts]
        dist = {s: trace_distribution(f, s, 4 * n) for s in starts}
        assert all(d.unterminated == 0 for d in dist.values())
        for x in starts[: 2**n]:
            assert block[f.index[x]] == block[f.index[_primed(x)]], x
        for s, t in itertools.combinations(starts, 2):
            same = block[f.index[s]] == block[f.index[t]]
            d = tv_distance(dist[s], dist[t])
            if same:
                assert d == 0, (s, t)
            if s[0].rstrip("'") != t[0].rstrip("'"):
                assert d > 0 and not same, (s, t)
            checked += 1
    return f"{checked} start pairs"


LEARN_LIMITS = {"dcp_single": 600, "dcp_multi": 2700, "grades": 2700}


@criterion(7, "end-to-end learning", sum(LEARN_LIMITS.values()))
def learning():
    parts = []
    for name, limit in LEARN_LIMITS.items():
        b = models.build(name)
        t = time.monotonic()
        out = learner.learn(learner.context_for(b, budgets=learner.Budgets(max_seconds=limit)))
        took = time.monotonic() - t
        assert out.kind == "Proof", f"{name}: {out.kind} {out.stage or ''}"
        assert took <= limit, f"{name}: {took:.0f}s"
        again = verify(Candidate(b.presentation, out.relation, b.seed))
        assert again.verified, f"{name}: recheck {again.kind}"
        assert A.difference(b.seed, out.relation).is_empty(), f"{name}: seed not contained"
        ref = b.manifest["reference_size"]
        parts.append(f"{name} {out.hypothesis.num_states} states (reference {ref}) in {took:.0f}s")
    return "; ".join(parts)


@criterion(8, "identity verifies on every bundle", 300)
def identity():
    for name in models.NAMES:
        p = models.build(name).presentation
        out = verify(Candidate(p, identity_on(p.domain)))
        assert out.verified, f"{name}: {out.describe(p.base)}"
    return ", ".join(models.NAMES)


@criterion(9, "WS1S export goldens", 1)
def goldens():
    for name, text in (("prefix", "x <=p y"), ("eqlen", "eqlen(x, y)"), ("last_1", "last_1(x)")):
        assert export_ws1s(parse_formula(text)) == (GOLDEN / f"{name}.mona").read_text(), name
    return "prefix, eqlen, last_1"


def run_criterion(n):
    title, limit, fn = CRITERIA[n]
    t = time.monotonic()
    try:
        detail, ok = fn(), True
    except AssertionError as e:
        detail, ok = f"failed: {e}", False
    took = time.monotonic() - t
    if ok and took > limit:
        detail, ok = f"{detail}; over the {limit}s limit", False
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {title} ({took:.1f}s) {detail}"
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, line = run_criterion(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
