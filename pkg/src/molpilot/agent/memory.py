"""Append-only agent memory: targets, molecules, action history and
evaluation records.  Records are never mutated after commit; molecule ids
are minted here (MOL001, MOL002, ...) and are stable across
serialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..chem import canonical_smiles
from ..chem.fingerprint import Fingerprint
from ..chem.graph import MolecularGraph
from ..scoring.metrics import PropertyProfile, TargetThresholds


@dataclass(frozen=True)
class Requirements:
    thresholds: TargetThresholds
    min_count: int = 5
    dvs_min: float = 0.8


@dataclass(frozen=True)
class ActionRecord:
    index: int
    action: str                      # GENERATE | OPTIMIZE | SCREEN
    inputs: tuple[str, ...]
    desc: Optional[str]
    produced: tuple[str, ...]
    ok: bool
    error: Optional[str] = None
    source: str = "policy"           # policy | llm | llm-fallback


@dataclass(frozen=True)
class GateVerdict:
    satisfied: bool
    reasons: tuple[str, ...]
    failure_counts: dict[str, int]


@dataclass(frozen=True)
class EvaluationRecord:
    action_index: int
    pool: tuple[str, ...]
    verdict: GateVerdict
    llm_answer: Optional[bool] = None
    llm_reason: Optional[str] = None


@dataclass
class MoleculeEntry:
    mol_id: str
    graph: MolecularGraph
    smiles: str
    profile: Optional[PropertyProfile] = None
    fingerprint: Optional[Fingerprint] = None
    provenance: int = -1             # producing action index; -1 = seeded


class Memory:
    def __init__(self):
        self.pockets: dict[str, object] = {}
        self.molecules: dict[str, MoleculeEntry] = {}
        self.history: list[ActionRecord] = []
        self.evaluations: list[EvaluationRecord] = []
        self.requirements: Optional[Requirements] = None
        self._by_canonical: dict[str, str] = {}
        self._next_mol = 1
        self._next_pocket = 1

    def register_pocket(self, pocket) -> str:
        pocket_id = f"POCKET{self._next_pocket:03d}"
        self._next_pocket += 1
        self.pockets[pocket_id] = pocket
        return pocket_id

    def register_molecule(self, graph: MolecularGraph, provenance: int = -1) -> str:
        """Mint an id, or return the existing id for a known canonical form."""
        key = canonical_smiles(graph)
        existing = self._by_canonical.get(key)
        if existing is not None:
            return existing
        mol_id = f"MOL{self._next_mol:03d}"
        self._next_mol += 1
        self.molecules[mol_id] = MoleculeEntry(mol_id=mol_id, graph=graph,
                                               smiles=key, provenance=provenance)
        self._by_canonical[key] = mol_id
        return mol_id

    def commit_action(self, record: ActionRecord) -> None:
        for mol_id in record.produced:
            if mol_id not in self.molecules:
                raise ValueError(f"action references unknown molecule {mol_id}")
        self.history.append(record)

    def commit_evaluation(self, record: EvaluationRecord) -> None:
        self.evaluations.append(record)

    def has_id(self, any_id: str) -> bool:
        return any_id in self.molecules or any_id in self.pockets

    def entries(self, ids) -> list[MoleculeEntry]:
        return [self.molecules[i] for i in ids]
