"""Molecule quality metrics: drug-likeness, rule-of-five, synthetic
accessibility, novelty, diversity, per-target thresholds and success."""

from .metrics import (
    DIVERSITY_MIN,
    DiversityUndefined,
    FingerprintParams,
    MIN_HIGH_QUALITY,
    MoleculeRecord,
    MoleculeSet,
    NOVELTY_MIN,
    PropertyProfile,
    TargetThresholds,
    diversity,
    is_high_quality,
    lipinski,
    novelty,
    target_success,
    target_thresholds,
    tsr,
)
from .qed import ads, ads_table, desirabilities, qed
from .sascore import FragmentScoreTable, SascoreError, default_table, sa_score

__all__ = [
    "DIVERSITY_MIN", "DiversityUndefined", "FingerprintParams",
    "FragmentScoreTable", "MIN_HIGH_QUALITY", "MoleculeRecord", "MoleculeSet",
    "NOVELTY_MIN", "PropertyProfile", "SascoreError", "TargetThresholds",
    "ads", "ads_table", "default_table", "desirabilities", "diversity",
    "is_high_quality", "lipinski", "novelty", "qed", "sa_score",
    "target_success", "target_thresholds", "tsr",
]
