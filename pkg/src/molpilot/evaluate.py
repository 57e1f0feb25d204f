"""Full property-profile evaluation: descriptors, drug-likeness, rule
count, synthesis score, novelty against the target's known drugs, and the
binding score from the configured docking backend.  Results are memoized
by canonical form, so repeated GA evaluations of the same structure are
free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .chem import canonical_smiles, morgan_fingerprint
from .chem.fingerprint import Fingerprint
from .chem.graph import MolecularGraph
from .descriptors import compute_descriptors
from .docking import DockingResult, PocketDescriptor, surrogate_score
from .scoring import FragmentScoreTable, lipinski, qed, sa_score
from .scoring.metrics import FingerprintParams, PropertyProfile, novelty

DockingBackend = Callable[[MolecularGraph], DockingResult]


@dataclass
class PropertyEvaluator:
    pocket: PocketDescriptor
    reference_fingerprints: list[Fingerprint] = field(default_factory=list)
    fp_params: FingerprintParams = FingerprintParams()
    docking: DockingBackend | None = None  # None -> built-in surrogate
    sa_table: FragmentScoreTable | None = None  # None -> shipped table
    _cache: dict[str, PropertyProfile] = field(default_factory=dict, repr=False)

    def fingerprint(self, g: MolecularGraph) -> Fingerprint:
        return morgan_fingerprint(g, self.fp_params.radius, self.fp_params.nbits)

    def vina(self, g: MolecularGraph) -> float:
        if self.docking is None:
            return surrogate_score(g, self.pocket).vna
        return self.docking(g).vna

    def profile(self, g: MolecularGraph, key: str | None = None) -> PropertyProfile:
        key = key or canonical_smiles(g)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        d = compute_descriptors(g)
        profile = PropertyProfile(
            qed=qed(d),
            lrf=lipinski(d.mw, d.logp, d.hbd, d.hba),
            sas=sa_score(g, self.sa_table),
            vna=self.vina(g),
            nvt=novelty(self.fingerprint(g), self.reference_fingerprints),
        )
        self._cache[key] = profile
        return profile
