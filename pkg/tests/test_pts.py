import itertools
from fractions import Fraction
from pathlib import Path

import pytest

import regbisim
from oracles import exact_traces
from toy import TOY
from regbisim import automata as A
from regbisim.logic import builtins as LB
from regbisim.pts import (
    DomainsOverlap,
    FinitePts,
    NotLengthPreserving,
    StartUnknown,
    WeightMismatch,
    build_finite,
    disjoint_union,
    load_model,
    parse_model,
    slice_pts,
    trace_distribution,
    tv_distance,
    validate,
)

WALK = str(Path(regbisim.__file__).parent / "bundled" / "random_walk" / "model.pts")



@pytest.fixture(scope="module")
def walk():
    return load_model(WALK)


@pytest.fixture(scope="module")
def toy():
    return parse_model(TOY)


def test_walk_is_valid(walk):
    r = validate(walk)
    assert r.valid and r.weight == 4 and r.bound == 2 and r.length_preserving is False
    assert set(walk.actions) == {"loop", "move"}
    assert "w=4, N=2" in r.summary()


def test_walk_weight_corruption_is_caught(walk):
    text = open(WALK).read().replace("x = y & z = 100", "x = y & z = 11")
    p = parse_model(text)
    r = validate(p)
    assert not r.valid and r.reason == "weight sums differ"
    (w,) = r.witness
    assert set(w) <= {"1"}


@pytest.mark.parametrize(
    "old,new,reason",
    [
        ("bound = 2", "bound = 1", "more than 1 successors"),
        ("x != y & z = 0", "x != y & succp(x, y) & z = 0", "not total"),
        ("x != y & z = 0", "x != y & (z = 0 | z = 1)", "not single-valued"),
        ("length_preserving = false", "length_preserving = true", "changes length"),
    ],
)
def test_walk_other_failures(old, new, reason):
    text = open(WALK).read()
    assert old in text
    r = validate(parse_model(text.replace(old, new)))
    assert not r.valid and reason in r.reason and r.witness is not None


def test_walk_has_no_slices(walk):
    for n in (0, 3):
        with pytest.raises(NotLengthPreserving):
            slice_pts(walk, n)


def brute_slice(p, n, zmax=6):
    """Slice by deciding membership of every (x, y, z) triple."""
    syms = p.base.symbols
    configs = [w for w in itertools.product(syms, repeat=n) if p.domain.accepts(w)]
    nums = [LB.numeral_of(v) for v in range(1 << zmax)]
    edges = {}
    for a, d in p.actions.items():
        for x in configs:
            for y in configs:
                for v, z in enumerate(nums):
                    if d.accepts(x, y, z):
                        edges[(a, x, y)] = v
                        break
    return build_finite(configs, sorted(p.actions), edges, p.weight)


def test_toy_valid(toy):
    assert validate(toy).valid


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_slice_matches_brute_force(toy, n):
    f = slice_pts(toy, n)
    g = brute_slice(toy, n)
    assert f.configs == g.configs
    assert f.actions == g.actions
    f.check_rows()


def test_slice_rows_and_cap(toy):
    f = slice_pts(toy, 3)
    assert len(f) == 8 and f.configs == sorted(f.configs)
    assert f.live(f.index[("0", "0", "1")]) == ["f", "stop"]
    from regbisim.pts import SliceTooLarge

    with pytest.raises(SliceTooLarge):
        slice_pts(toy, 5, cap=10)


def test_walk_union_overlap(walk):
    with pytest.raises(DomainsOverlap):
        disjoint_union(walk, walk)


def shifted(text, name):
    """The toy restricted to words of length >= 2 ending in a fixed bit."""
    dom = f"domain = x in lang(D)"
    text = text.replace('domain = !(x = "")', f"lang D = regex (0|1)+{name[-1]};\n  {dom}")
    return parse_model(text.replace("model toy", f"model {name}"))


def test_union_slices_commute(toy):
    p, q = shifted(TOY, "p0"), shifted(TOY, "p1")
    u = disjoint_union(p, q)
    assert validate(u).valid
    for n in (1, 2, 3):
        assert slice_pts(u, n).actions == slice_pts(p, n).union(slice_pts(q, n)).actions


def test_union_weight_mismatch(toy):
    p = shifted(TOY, "p0")
    q = shifted(TOY.replace("weight = 10", "weight = 1").replace("z = 10", "z = 1"), "p1")
    with pytest.raises(WeightMismatch):
        disjoint_union(p, q)


def explicit_step(f: FinitePts):
    def step(s):
        return {
            a: [(t, Fraction(w, f.weight)) for t, w in rows[s].items()]
            for a, rows in f.actions.items()
            if rows[s]
        }

    return step


def test_trace_distribution_against_explicit(toy):
    f = slice_pts(toy, 3)
    for s in range(len(f)):
        for depth in (0, 2, 4):
            td = trace_distribution(f, s, depth)
            dist, unterminated = exact_traces(explicit_step(f), s, depth)
            assert td.dist == dist and td.unterminated == unterminated
            assert td.total() == 1
    a = trace_distribution(f, ("0", "0", "1"), 3)
    assert tv_distance(a, a) == 0
    with pytest.raises(StartUnknown):
        trace_distribution(f, ("1", "1", "1", "1"), 3)
