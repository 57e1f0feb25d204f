"""Canonical atom ranking by iterative neighborhood refinement.

Morgan-style: atoms start from an invariant tuple (element, degree,
hydrogen count, charge, aromaticity, isotope, ring membership) and are
refined with sorted (bond order, neighbor rank) signatures until the
partition stabilizes.  Remaining ties are broken by doubling ranks and
promoting one member of the smallest tied class, then re-refining, so the
final ranks are a permutation of 0..n-1.
"""

from __future__ import annotations

from .graph import MolecularGraph


def _dense(keys: list) -> list[int]:
    lookup = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [lookup[k] for k in keys]


def _refine(g: MolecularGraph, ranks: list[int]) -> list[int]:
    n = len(g.atoms)
    while True:
        keys = []
        for i in range(n):
            signature = tuple(sorted((g.bonds[b].order, ranks[j]) for j, b in g.neighbors(i)))
            keys.append((ranks[i], signature))
        new_ranks = _dense(keys)
        if len(set(new_ranks)) == len(set(ranks)) and new_ranks == ranks:
            return ranks
        if len(set(new_ranks)) == len(set(ranks)):
            # partition stable even if labels moved; renumber consistently
            return new_ranks
        ranks = new_ranks


def canonical_ranks(g: MolecularGraph) -> list[int]:
    """Ranks invariant under atom relabeling; all distinct."""
    n = len(g.atoms)
    initial = []
    for i, atom in enumerate(g.atoms):
        initial.append((
            atom.atomic_number,
            g.degree(i),
            atom.h_count,
            atom.charge,
            1 if atom.aromatic else 0,
            atom.isotope or 0,
            1 if g.in_ring(i) else 0,
        ))
    ranks = _refine(g, _dense(initial))
    while len(set(ranks)) < n:
        # promote one member of the lowest tied class; tied atoms are
        # treated as interchangeable (automorphic) under this refinement
        counts: dict[int, int] = {}
        for r in ranks:
            counts[r] = counts.get(r, 0) + 1
        tied_rank = min(r for r, c in counts.items() if c > 1)
        chosen = min(i for i in range(n) if ranks[i] == tied_rank)
        ranks = [r * 2 for r in ranks]
        ranks[chosen] -= 1
        ranks = _refine(g, _dense(ranks))
    return ranks


def canonical_smiles(g: MolecularGraph) -> str:
    from .smiles import write_smiles

    return write_smiles(g, canonical_ranks(g))
