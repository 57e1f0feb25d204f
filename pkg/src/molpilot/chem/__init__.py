"""Molecule parsing, canonicalization, fingerprints and substructure search."""

from .canon import canonical_ranks, canonical_smiles
from .fingerprint import (
    Fingerprint,
    FingerprintError,
    environment_counts,
    morgan_fingerprint,
    tanimoto,
)
from .graph import (
    AROMATIC,
    DOUBLE,
    SINGLE,
    TRIPLE,
    Atom,
    AtomSpec,
    Bond,
    GraphError,
    MolecularGraph,
    ValenceError,
    build_molecule,
    connected_components,
    graph_to_specs,
    molecular_weight,
)
from .smiles import SmilesError, parse_smiles, write_smiles


def dedupe(molecules) -> list:
    """Keep the first occurrence of each canonical form, order-stable."""
    seen = set()
    out = []
    for g in molecules:
        key = canonical_smiles(g)
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out


__all__ = [
    "AROMATIC", "Atom", "AtomSpec", "Bond", "DOUBLE", "Fingerprint",
    "FingerprintError", "GraphError", "MolecularGraph", "SINGLE",
    "SmilesError", "TRIPLE", "ValenceError", "build_molecule",
    "canonical_ranks", "canonical_smiles", "connected_components", "dedupe",
    "environment_counts", "graph_to_specs", "molecular_weight",
    "morgan_fingerprint", "parse_smiles", "tanimoto", "write_smiles",
]
