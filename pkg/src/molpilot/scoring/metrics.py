"""Per-molecule property profiles and the set-level quality metrics:
novelty against known drugs, pairwise diversity, per-target thresholds,
the high-quality predicate and the target success rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ..chem.fingerprint import Fingerprint, morgan_fingerprint, tanimoto
from ..chem.graph import MolecularGraph

#: Grace epsilon for threshold comparisons: values that are mathematically
#: equal to a threshold must pass the non-strict inequality even when the
#: binary float representations differ by one ulp chain.
_EPS = 1e-9

NOVELTY_MIN = 0.8
DIVERSITY_MIN = 0.8
MIN_HIGH_QUALITY = 5


def ge(value: float, bound: float) -> bool:
    return value >= bound - _EPS


def le(value: float, bound: float) -> bool:
    return value <= bound + _EPS


@dataclass(frozen=True)
class FingerprintParams:
    radius: int = 2
    nbits: int = 2048


@dataclass(frozen=True)
class PropertyProfile:
    qed: float
    lrf: int
    sas: float
    vna: float
    nvt: float

    def __post_init__(self):
        if not (0.0 <= self.qed <= 1.0):
            raise ValueError(f"qed out of [0,1]: {self.qed}")
        if not (0 <= self.lrf <= 4):
            raise ValueError(f"lrf out of 0..4: {self.lrf}")
        if not (1.0 <= self.sas <= 10.0):
            raise ValueError(f"sas out of [1,10]: {self.sas}")
        if not (self.vna == self.vna and abs(self.vna) != float("inf")):
            raise ValueError("vna must be finite")
        if not (0.0 <= self.nvt <= 1.0):
            raise ValueError(f"nvt out of [0,1]: {self.nvt}")


@dataclass(frozen=True)
class TargetThresholds:
    qed_min: float
    lrf_min: float
    sas_max: float
    vna_max: float
    nvt_min: float = NOVELTY_MIN


@dataclass
class MoleculeRecord:
    graph: MolecularGraph
    profile: Optional[PropertyProfile] = None
    mol_id: Optional[str] = None
    smiles: Optional[str] = None


@dataclass
class MoleculeSet:
    """Ordered molecule collection; ids are unique once assigned."""

    records: list[MoleculeRecord] = field(default_factory=list)

    def __post_init__(self):
        ids = [r.mol_id for r in self.records if r.mol_id is not None]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate molecule ids")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def graphs(self) -> list[MolecularGraph]:
        return [r.graph for r in self.records]

    def profiles(self) -> list[PropertyProfile]:
        missing = [r.mol_id for r in self.records if r.profile is None]
        if missing:
            raise ValueError(f"profiles not computed for {missing}")
        return [r.profile for r in self.records]


def lipinski(mw: float, logp: float, hbd: int, hba: int) -> int:
    """Number of satisfied rule-of-five bounds (0..4)."""
    return sum([
        le(mw, 500.0),
        le(logp, 5.0),
        hbd <= 5,
        hba <= 10,
    ])


def novelty(m: MolecularGraph | Fingerprint, refs: Sequence[MolecularGraph | Fingerprint],
            params: FingerprintParams = FingerprintParams()) -> float:
    """1 - max Tanimoto against the reference set; 1.0 for an empty set."""
    fp = m if isinstance(m, Fingerprint) else morgan_fingerprint(m, params.radius, params.nbits)
    best = 0.0
    for ref in refs:
        ref_fp = ref if isinstance(ref, Fingerprint) else morgan_fingerprint(
            ref, params.radius, params.nbits)
        best = max(best, tanimoto(fp, ref_fp))
    return 1.0 - best


class DiversityUndefined(ValueError):
    pass


def diversity(ms: Sequence[MolecularGraph | Fingerprint],
              params: FingerprintParams = FingerprintParams()) -> float:
    """1 - mean pairwise Tanimoto over all unordered distinct pairs."""
    if len(ms) < 2:
        raise DiversityUndefined("diversity undefined for fewer than 2 molecules")
    fps = [m if isinstance(m, Fingerprint) else morgan_fingerprint(m, params.radius, params.nbits)
           for m in ms]
    total = 0.0
    pairs = 0
    for i in range(len(fps)):
        for j in range(i + 1, len(fps)):
            total += tanimoto(fps[i], fps[j])
            pairs += 1
    return 1.0 - total / pairs


def target_thresholds(known_drugs: MoleculeSet) -> TargetThresholds:
    """Arithmetic mean of each property over the known drugs."""
    if len(known_drugs) == 0:
        raise ValueError("cannot derive thresholds from an empty drug set")
    profiles = known_drugs.profiles()
    n = len(profiles)
    return TargetThresholds(
        qed_min=sum(p.qed for p in profiles) / n,
        lrf_min=sum(p.lrf for p in profiles) / n,
        sas_max=sum(p.sas for p in profiles) / n,
        vna_max=sum(p.vna for p in profiles) / n,
        nvt_min=NOVELTY_MIN,
    )


def is_high_quality(p: PropertyProfile, t: TargetThresholds) -> bool:
    return (ge(p.qed, t.qed_min)
            and ge(p.lrf, t.lrf_min)
            and le(p.sas, t.sas_max)
            and le(p.vna, t.vna_max)
            and ge(p.nvt, t.nvt_min))


def target_success(ms: MoleculeSet, t: TargetThresholds,
                   min_count: int = MIN_HIGH_QUALITY,
                   dvs_min: float = DIVERSITY_MIN,
                   params: FingerprintParams = FingerprintParams(),
                   fingerprints: Sequence[Fingerprint] | None = None) -> bool:
    """At least ``min_count`` molecules, all high-quality, diverse as a set.

    ``fingerprints`` overrides the per-molecule fingerprints (testing and
    batch-efficiency seam); otherwise they are computed from the graphs.
    """
    if len(ms) < min_count:
        return False
    if not all(is_high_quality(p, t) for p in ms.profiles()):
        return False
    pool: Sequence[MolecularGraph | Fingerprint]
    pool = fingerprints if fingerprints is not None else ms.graphs()
    return ge(diversity(pool, params), dvs_min)


def tsr(results: Sequence[bool]) -> float:
    """Percentage of successful targets."""
    if not results:
        raise ValueError("tsr undefined for an empty result list")
    return 100.0 * sum(1 for r in results if r) / len(results)
