"""Bundled models: a model file, optional reference copy, seed and extra relations.

Each bundle is a directory under ``bundled/`` holding ``manifest.json``. Keys:

- ``model``: the model file; ``reference``: optional second model, joined to
  the first by disjoint union;
- ``seed``: relation file with the pairs a proof must cover;
- ``relations``: named relation files (candidate proofs, mutants);
- ``quotient``: ``identity``, ``all-equal`` or ``relation:<name>``;
- ``copy_suffix``: symbol suffix marking the reference copy, removed before
  comparing terminals under ``identity``;
- ``invariant``: optional file whose last ``lang`` is the inductive invariant;
- ``initial``: optional file whose last ``lang`` is the initial configurations;
- ``reference_size``: published proof size, for reporting only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .automata import Automaton
from .modelfile import ModelError, bind_items, parse_declarations
from .pts import RegularPresentation, load_model, load_relation, disjoint_union

BUNDLE_ROOT = Path(__file__).parent / "bundled"
NAMES = ("random_walk", "ppda", "dcp_single", "dcp_multi", "grades")


@dataclass
class ModelBundle:
    name: str
    directory: Path
    presentation: RegularPresentation
    original: RegularPresentation
    reference: RegularPresentation | None
    seed: Automaton | None
    quotient: str
    copy_suffix: str | None
    invariant: Automaton | None
    initial: Automaton | None
    manifest: dict = field(repr=False)

    def relation(self, name: str) -> Automaton:
        files = self.manifest.get("relations", {})
        if name not in files:
            raise KeyError(f"bundle {self.name} has no relation {name!r}")
        return load_relation(self.directory / files[name], self.presentation)

    @property
    def relation_names(self) -> list[str]:
        return sorted(self.manifest.get("relations", {}))

    def canonical(self, word) -> tuple:
        """Terminal quotient key under the identity mode."""
        s = self.copy_suffix
        if not s:
            return tuple(word)
        syms = set(self.presentation.base.symbols)
        return tuple(c[: -len(s)] if c.endswith(s) and c[: -len(s)] in syms else c for c in word)


def load_language(path: Path, p: RegularPresentation) -> Automaton:
    d = parse_declarations(Path(path).read_text(), model=False)
    langs = [name for kind, name, *_ in d.items if kind == "lang"]
    if not langs:
        raise ModelError(f"{path} declares no lang")
    bound = bind_items(d.items, p.relation_env())
    return bound[langs[-1]]


def resolve(name_or_path) -> Path:
    """A bundle directory from a bundled name or a path."""
    p = Path(name_or_path)
    if (p / "manifest.json").exists():
        return p.resolve()
    q = BUNDLE_ROOT / str(name_or_path)
    if (q / "manifest.json").exists():
        return q
    q = BUNDLE_ROOT / p.name
    if (q / "manifest.json").exists() and p.parent.name == "models":
        return q
    raise FileNotFoundError(f"no model bundle at {name_or_path}")


@lru_cache(maxsize=None)
def _build(directory: Path) -> ModelBundle:
    man = json.loads((directory / "manifest.json").read_text())
    original = load_model(directory / man["model"])
    reference = load_model(directory / man["reference"]) if man.get("reference") else None
    pres = disjoint_union(original, reference, man["name"]) if reference else original
    seed = load_relation(directory / man["seed"], pres) if man.get("seed") else None
    inv = load_language(directory / man["invariant"], pres) if man.get("invariant") else None
    init = load_language(directory / man["initial"], pres) if man.get("initial") else None
    quotient = man.get("quotient", "identity")
    if not (quotient in ("identity", "all-equal") or quotient.startswith("relation:")):
        raise ModelError(f"unknown quotient mode {quotient!r}")
    return ModelBundle(
        man["name"], directory, pres, original, reference, seed, quotient, man.get("copy_suffix"), inv, init, man
    )


def build(name_or_path) -> ModelBundle:
    return _build(resolve(name_or_path).resolve())


def seed_relation(name) -> Automaton | None:
    return build(name).seed
