"""Learn proofs for the protocol bundles and report their sizes.

    python scripts/table1.py [--teacher local|slice] [--json out.json] [names ...]

Each row gives rounds, membership queries, proof states, the reference
size from the bundle manifest, wall-clock seconds and the outcome of an
independent recheck of the learned relation.
"""

import argparse
import json
import logging
import time

from regbisim import automata as A
from regbisim import learner, models
from regbisim.bisim_vc import Candidate, verify

DEFAULT = ("dcp_single", "dcp_multi", "grades")


def run(name, teacher, max_seconds):
    b = models.build(name)
    ctx = learner.context_for(b, budgets=learner.Budgets(max_seconds=max_seconds), mode=teacher)
    t = time.monotonic()
    out = learner.learn(ctx)
    row = {
        "model": name,
        "outcome": out.kind,
        "rounds": out.rounds,
        "queries": out.queries,
        "states": out.hypothesis.num_states if out.hypothesis else None,
        "reference": b.manifest.get("reference_size"),
        "seconds": round(time.monotonic() - t, 1),
    }
    if out.kind == "Proof":
        row["recheck"] = verify(Candidate(b.presentation, out.relation, b.seed)).kind
        row["seed_contained"] = A.difference(b.seed, out.relation).is_empty()
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=list(DEFAULT))
    ap.add_argument("--teacher", choices=["local", "slice"], default="local")
    ap.add_argument("--max-seconds", type=float, default=2700)
    ap.add_argument("--json")
    ap.add_argument("-v", "--verbose", action="store_true", help="log each learning round")
    a = ap.parse_args()
    if a.verbose:
        logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    rows = [run(n, a.teacher, a.max_seconds) for n in a.names]
    cols = ["model", "outcome", "rounds", "queries", "states", "reference", "seconds", "recheck"]
    print("| " + " | ".join(cols) + " |")
    print("|" + "---|" * len(cols))
    for r in rows:
        print("| " + " | ".join(str(r.get(c, "")) for c in cols) + " |")
    if a.json:
        with open(a.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
