"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 invalid model, 3 negative result
(counterexample or no solution), 4 budget exhausted, 5 internal error.

Set ``REGBISIM_CACHE_DIR`` to keep validation reports between runs; they are
keyed by a hash of the model sources.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import traceback
from datetime import datetime, timezone
from pathlib import Path

from . import automata as A
from . import learner, models
from .automata import Automaton
from .bisim_vc import Candidate, verify
from .finite_bisim import greatest_bisimulation_within
from .logic import parse_formula
from .logic.parser import SyntaxError as FormulaSyntaxError
from .logic.ws1s import UnsupportedAtom, export_ws1s
from .modelfile import ModelError
from .models import load_language
from .pts import (
    PtsError,
    RegularPresentation,
    SliceTooLarge,
    ValidationReport,
    load_model,
    load_relation,
    slice_pts,
    trace_distribution,
    tv_distance,
    validate,
)

OK, USAGE, INVALID, NEGATIVE, BUDGET, INTERNAL = range(6)
CACHE_ENV = "REGBISIM_CACHE_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- loading


class Target:
    """A model given by bundle name, bundle directory or model file."""

    def __init__(self, arg: str):
        self.arg = arg
        path = Path(arg)
        self.bundle = None
        if path.is_file():
            self.presentation = load_model(path)
            self.sources = [path]
        else:
            try:
                self.bundle = models.build(arg)
            except FileNotFoundError:
                raise UsageError(f"no model file or bundle named {arg}") from None
            self.presentation = self.bundle.presentation
            self.sources = sorted(p for p in self.bundle.directory.iterdir() if p.is_file())

    @property
    def name(self) -> str:
        return self.presentation.name

    def relation(self, arg: str) -> Automaton:
        if self.bundle is not None and arg in self.bundle.relation_names:
            return self.bundle.relation(arg)
        path = Path(arg)
        tries = [path]
        if self.bundle is not None:
            tries.append(self.bundle.directory / path.name)
        for q in tries:
            if q.is_file() or q.with_name(q.name + ".rel").is_file():
                return load_relation(q, self.presentation)
        raise UsageError(f"no relation file {arg}")

    def digest(self) -> str:
        h = hashlib.sha256()
        for p in self.sources:
            h.update(p.name.encode() + b"\0" + p.read_bytes() + b"\0")
        return h.hexdigest()


def _cached_validation(t: Target) -> ValidationReport:
    root = os.environ.get(CACHE_ENV)
    path = Path(root) / f"validate-{t.digest()}.json" if root else None
    if path is not None and path.exists():
        d = json.loads(path.read_text())
        if d["witness"] is not None:
            d["witness"] = tuple(tuple(w) for w in d["witness"])
        return ValidationReport(**d)
    rep = validate(t.presentation)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(rep.__dict__, sort_keys=True))
    return rep


def _require_valid(t: Target, out) -> ValidationReport:
    rep = _cached_validation(t)
    if not rep.valid:
        print(rep.summary(t.presentation.base), file=out)
        raise _Invalid()
    return rep


class _Invalid(Exception):
    pass


# ---------------------------------------------------------------- commands


def cmd_validate(a, out) -> int:
    t = Target(a.model)
    rep = _cached_validation(t)
    print(rep.summary(t.presentation.base), file=out)
    return OK if rep.valid else INVALID


def cmd_check(a, out) -> int:
    t = Target(a.model)
    r = t.relation(a.relation)
    seed = t.relation(a.seed) if a.seed else None
    _require_valid(t, out)
    res = verify(Candidate(t.presentation, r, seed), method=a.method, budget=a.budget)
    base = t.presentation.base
    print(res.report(base) if a.json else res.describe(base), file=out)
    if res.verified:
        return OK
    return BUDGET if res.kind == "ResourceExceeded" else NEGATIVE


def _terminal_seed(f, mode, bundle):
    terms = [s for s in range(len(f)) if f.is_terminal(s)]
    if mode == "none":
        return None
    if mode == "all-equal":
        return [terms] if terms else []
    key = bundle.canonical if bundle is not None else tuple
    groups: dict = {}
    for s in terms:
        groups.setdefault(key(f.configs[s]), []).append(s)
    return list(groups.values())


def cmd_slice(a, out) -> int:
    t = Target(a.model)
    p = t.presentation
    f = slice_pts(p, a.n, cap=a.cap)
    text = f.to_text(p.base)
    if a.out:
        Path(a.out).write_text(text)
    else:
        out.write(text)
    if a.partition:
        mode = a.quotient or (t.bundle.quotient if t.bundle else "none")
        part = greatest_bisimulation_within(f, range(len(f)), _terminal_seed(f, mode, t.bundle))
        Path(a.partition).write_text(part.to_text(f, p.base))
        print(f"# {len(f)} configurations, {part.num_blocks} blocks", file=out)
    return OK


def cmd_tracedist(a, out) -> int:
    t = Target(a.model)
    p = t.presentation
    if len(a.sources) != 2:
        raise UsageError("tracedist needs exactly two --from words")
    f = slice_pts(p, a.n, cap=a.cap)
    starts = [p.base.word(w) for w in a.sources]
    d = [trace_distribution(f, s, a.depth) for s in starts]
    print(f"distance = {tv_distance(*d)}", file=out)
    return OK


def cmd_learn(a, out) -> int:
    t = Target(a.model)
    if t.bundle is None:
        raise UsageError("learn needs a model bundle with a seed, not a bare model file")
    _require_valid(t, out)
    b = t.bundle
    budgets = learner.Budgets(
        max_rounds=a.max_rounds, max_slice_length=a.max_length, max_slice_size=a.cap, max_seconds=a.max_seconds
    )
    inv = load_language(Path(a.invariant), b.presentation) if a.invariant else not a.no_invariant
    ctx = learner.context_for(b, quotient=a.quotient, invariant=inv, budgets=budgets, mode=a.teacher)
    res = learner.learn(ctx)
    d = Path(a.out or f"learn-{b.name}")
    d.mkdir(parents=True, exist_ok=True)
    (d / "transcript.txt").write_text("\n".join(res.transcript) + "\n")
    base = b.presentation.base
    print(f"outcome: {res.kind}", file=out)
    print(f"rounds: {res.rounds}", file=out)
    print(f"membership queries: {res.queries}", file=out)
    doc = {"outcome": res.kind, "rounds": res.rounds, "queries": res.queries}
    if res.kind == "Proof":
        h = res.hypothesis
        (d / "proof.txt").write_text(h.to_text())
        (d / "proof.dot").write_text(h.to_dot())
        contained = b.seed is None or _contains(res.relation, b.seed)
        print(f"proof states: {h.num_states}", file=out)
        if b.manifest.get("reference_size"):
            print(f"reference size: {b.manifest['reference_size']}", file=out)
        print(f"E ⊆ L(H): {'yes' if contained else 'no'}", file=out)
        print(f"recheck: {res.verify.describe(base)}", file=out)
        doc.update(states=h.num_states, seed_contained=contained)
    elif res.kind == "NoSolution":
        pair = [base.show(w) for w in res.pair]
        print(f"unrelated seed pair: {pair[0]!r}, {pair[1]!r}", file=out)
        doc["pair"] = pair
    else:
        print(f"budget exhausted during {res.stage}", file=out)
        doc["stage"] = res.stage
    print(f"# written to {d}", file=out)
    (d / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return {"Proof": OK, "NoSolution": NEGATIVE}.get(res.kind, BUDGET)


def _contains(r: Automaton, e: Automaton) -> bool:
    return A.difference(e, r).is_empty()


def cmd_export(a, out) -> int:
    text = Path(a.formula).read_text()
    body = "\n".join(l for l in text.splitlines() if not l.lstrip().startswith("#"))
    res = export_ws1s(parse_formula(body))
    if a.out:
        Path(a.out).write_text(res)
    else:
        out.write(res)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="regbisim", description="Regular probabilistic bisimulation toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check presentation validity")
    s.add_argument("model")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("check", help="verify a candidate bisimulation")
    s.add_argument("model")
    s.add_argument("--relation", required=True)
    s.add_argument("--seed")
    s.add_argument("--method", choices=["class-mass", "partition"], default="class-mass")
    s.add_argument("--budget", type=int, default=2_000_000)
    s.add_argument("--json", action="store_true", help="machine-readable report")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("slice", help="write the length-n slice and optionally its partition")
    s.add_argument("model")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--out")
    s.add_argument("--partition")
    s.add_argument("--quotient", choices=["none", "identity", "all-equal"])
    s.add_argument("--cap", type=int, default=500_000)
    s.set_defaults(run=cmd_slice)

    s = sub.add_parser("tracedist", help="total-variation distance of two trace distributions")
    s.add_argument("model")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--from", dest="sources", action="append", default=[], required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--cap", type=int, default=500_000)
    s.set_defaults(run=cmd_tracedist)

    s = sub.add_parser("learn", help="learn a bisimulation proof for a bundle's seed")
    s.add_argument("model")
    s.add_argument("--quotient")
    s.add_argument("--invariant")
    s.add_argument("--no-invariant", action="store_true")
    s.add_argument("--teacher", choices=["local", "slice"], default="local")
    s.add_argument("--max-rounds", type=int, default=200)
    s.add_argument("--max-length", type=int, default=24)
    s.add_argument("--max-seconds", type=float)
    s.add_argument("--cap", type=int, default=400_000)
    s.add_argument("--out")
    s.set_defaults(run=cmd_learn)

    s = sub.add_parser("export-ws1s", help="translate a formula file to WS1S")
    s.add_argument("formula")
    s.add_argument("-o", "--out")
    s.set_defaults(run=cmd_export)
    return ap


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        a = build_parser().parse_args(argv)
        if a.command == "learn" and a.invariant and a.no_invariant:
            raise UsageError("--invariant and --no-invariant exclude each other")
        if a.command == "learn" and a.quotient and not (
            a.quotient in ("identity", "all-equal") or a.quotient.startswith("relation:")
        ):
            raise UsageError(f"unknown quotient mode {a.quotient}")
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        print(f"# regbisim {a.command} {stamp}", file=out)
        return a.run(a, out)
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return USAGE
    except _Invalid:
        return INVALID
    except (UnsupportedAtom, FormulaSyntaxError) as e:
        print(f"usage error: {e}", file=err)
        return USAGE
    except (ModelError, PtsError) as e:
        if isinstance(e, SliceTooLarge):
            print(f"budget: {e}", file=err)
            return BUDGET
        print(f"invalid model: {e}", file=err)
        return INVALID
    except FileNotFoundError as e:
        print(f"usage error: {e}", file=err)
        return USAGE
    except Exception:  # noqa: BLE001
        traceback.print_exc(file=err)
        return INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
