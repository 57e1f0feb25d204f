"""Synthetic-accessibility score in [1, 10] (lower = easier).

Ertl-style recipe: mean log-frequency contribution of radius-0..2 circular
environments (scores from a corpus-derived table shipped as a data file)
minus complexity penalties for size, ring fusion (spiro / bridgehead),
macrocycles and stereocentres, plus a symmetry bonus, affinely rescaled
onto [1, 10] with the calibration constants recorded in the table header.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..chem.fingerprint import environment_counts
from ..chem.graph import MolecularGraph

_MISSING_SCORE = -4.0


class SascoreError(ValueError):
    pass


@dataclass(frozen=True)
class FragmentScoreTable:
    scores: dict[int, float]
    raw_min: float
    raw_max: float
    checksum: str

    @classmethod
    def from_text(cls, text: str) -> "FragmentScoreTable":
        scores: dict[int, float] = {}
        raw_min, raw_max, checksum = -4.0, 2.5, ""
        for line in text.splitlines():
            if line.startswith("#"):
                if line.startswith("# raw_min"):
                    raw_min = float(line.split("\t")[1])
                elif line.startswith("# raw_max"):
                    raw_max = float(line.split("\t")[1])
                elif line.startswith("# checksum"):
                    checksum = line.split("\t")[1]
                continue
            if not line:
                continue
            key, value = line.split("\t")
            scores[int(key)] = float(value)
        if not scores:
            raise SascoreError("fragment score table is empty")
        return cls(scores=scores, raw_min=raw_min, raw_max=raw_max, checksum=checksum)


@lru_cache(maxsize=1)
def default_table() -> FragmentScoreTable:
    text = resources.files("molpilot.data").joinpath("sa_fragment_scores.tsv").read_text()
    return FragmentScoreTable.from_text(text)


def _spiro_and_bridgeheads(g: MolecularGraph) -> tuple[int, int]:
    rings = [frozenset(r) for r in g.rings]
    ring_bondsets = []
    for ring in g.rings:
        bonds = set()
        for k in range(len(ring)):
            a, b = ring[k], ring[(k + 1) % len(ring)]
            bonds.add((min(a, b), max(a, b)))
        ring_bondsets.append(bonds)
    spiro: set[int] = set()
    bridge: set[int] = set()
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            shared_atoms = rings[i] & rings[j]
            shared_bonds = ring_bondsets[i] & ring_bondsets[j]
            if len(shared_atoms) == 1 and not shared_bonds:
                spiro.update(shared_atoms)
            elif len(shared_bonds) >= 2:
                # bridged pair: bridgeheads are the atoms incident to exactly
                # one shared bond
                incidence: dict[int, int] = {}
                for a, b in shared_bonds:
                    incidence[a] = incidence.get(a, 0) + 1
                    incidence[b] = incidence.get(b, 0) + 1
                bridge.update(a for a, c in incidence.items() if c == 1)
    return len(spiro), len(bridge)


def raw_score(g: MolecularGraph, table: FragmentScoreTable) -> float:
    """Uncalibrated score; larger = simpler."""
    counts = environment_counts(g, radius=2)
    total = sum(counts.values())
    fragment_score = sum(
        table.scores.get(env, _MISSING_SCORE) * c for env, c in counts.items()) / total

    n_atoms = len(g.atoms)
    size_penalty = n_atoms ** 1.005 - n_atoms
    n_spiro, n_bridge = _spiro_and_bridgeheads(g)
    ring_penalty = math.log10(n_spiro + 1) + math.log10(n_bridge + 1)
    macro_penalty = math.log10(2) if any(len(r) > 8 for r in g.rings) else 0.0
    stereo_penalty = math.log10(sum(1 for a in g.atoms if a.chiral) + 1)
    symmetry_bonus = 0.0
    if n_atoms > len(counts):
        symmetry_bonus = math.log(n_atoms / len(counts)) * 0.5
    return (fragment_score - size_penalty - ring_penalty - macro_penalty
            - stereo_penalty + symmetry_bonus)


def sa_score(g: MolecularGraph, table: FragmentScoreTable | None = None) -> float:
    if len(g.atoms) == 0:
        raise SascoreError("empty molecule")
    if table is None:
        table = default_table()
    raw = raw_score(g, table)
    span = table.raw_max - table.raw_min
    score = 11.0 - (raw - table.raw_min + 1.0) / span * 9.0
    if score > 8.0:
        score = 8.0 + math.log(score + 1.0 - 9.0)
    return min(10.0, max(1.0, score))
