"""Polynomial files shipped with the package (and user files in the same format).

A file holds {"name", "n", "poly" | "monomials", "seed_point", "automorphisms",
"negative_controls"}; matrices are lists of rows with rational entries as
ints or "p/q" strings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .poly import HomoPoly, poly_from_json
from .scalar import sign


@dataclass
class CorpusEntry:
    name: str
    h: HomoPoly
    seed_point: list
    automorphisms: list = field(default_factory=list)
    negative_controls: list = field(default_factory=list)

    @property
    def is_cubic(self) -> bool:
        return self.h.d == 3


def _matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def entry_from_json(data: dict, default_name: str = "poly") -> CorpusEntry:
    h = poly_from_json(data)
    seed = [Fraction(x) for x in data.get("seed_point", [1] * h.n)]
    if len(seed) != h.n:
        raise ValueError("seed_point length does not match the variable count")
    if sign(h.evaluate(seed)) <= 0:
        raise ValueError("seed_point must satisfy h > 0")
    autos = [(a["name"], _matrix(a["matrix"])) for a in data.get("automorphisms", [])]
    negs = [(a["name"], _matrix(a["matrix"])) for a in data.get("negative_controls", [])]
    return CorpusEntry(data.get("name", default_name), h, seed, autos, negs)


def load_entry(path) -> CorpusEntry:
    path = Path(path)
    if not path.exists():
        shipped = resources.files("specgeo") / "data" / "corpus" / path.name
        if shipped.is_file():
            path = Path(str(shipped))
    with open(path) as f:
        return entry_from_json(json.load(f), path.stem)


def shipped_corpus() -> list[CorpusEntry]:
    root = resources.files("specgeo") / "data" / "corpus"
    names = sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))
    return [load_entry(str(root / n)) for n in names]


def shipped_psi_files() -> list[Path]:
    root = resources.files("specgeo") / "data" / "psi"
    return [Path(str(root / n)) for n in sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))]
