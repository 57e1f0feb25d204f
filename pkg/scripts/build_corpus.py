#!/usr/bin/env python3
"""Regenerate the pinned reference corpus (tests/data/corpus_1000.smi).

Deterministic: the named molecule list and the fragment library are
composed with fixed seeds, deduplicated by canonical form, and written in
generation order.  Rerunning this script reproduces the file byte for
byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from molpilot.chem import canonical_smiles, parse_smiles, write_smiles
from molpilot.docking import PocketDescriptor
from molpilot.generate import GenerationRequest, default_library, generate_builtin

TARGET_SIZE = 1200


def main() -> None:
    seen: set[str] = set()
    rows: list[str] = []

    def add(smiles: str) -> None:
        key = canonical_smiles(parse_smiles(smiles))
        if key not in seen:
            seen.add(key)
            rows.append(smiles)

    for line in (REPO / "tests/data/golden_corpus.smi").read_text().splitlines():
        add(line.split("\t")[0])
    for fragment in default_library().fragments:
        add(write_smiles(fragment))

    capacities = (16, 22, 28, 36, 44)
    seed = 0
    while len(rows) < TARGET_SIZE and seed < 200:
        capacity = capacities[seed % len(capacities)]
        pocket = PocketDescriptor(
            id="POCKET000", heavy_atom_count=capacity * 4,
            bounding_box=((0.0, 10.0), (0.0, 10.0), (0.0, 10.0)),
            center=(5.0, 5.0, 5.0), capacity=capacity)
        batch = generate_builtin(
            GenerationRequest(pocket=pocket, count=40, rng_seed=1000 + seed))
        for mol in batch.molecules:
            if len(rows) >= TARGET_SIZE:
                break
            add(write_smiles(mol))
        seed += 1

    out = REPO / "tests/data/corpus_1000.smi"
    out.write_text("\n".join(rows) + "\n")
    print(f"wrote {len(rows)} molecules to {out}")


if __name__ == "__main__":
    main()
