"""Valence-safe molecular graph edits.

Every edit decomposes the graph into pre-resolution specs, applies the
change, and rebuilds through :func:`build_molecule`, so results are always
fully validated (or a :class:`GraphError` is raised and the caller can
retry).  Attachment points are atoms with at least one implicit hydrogen
whose hydrogen count is not pinned by bracket notation.
"""

from __future__ import annotations

from .graph import (
    AROMATIC,
    GraphError,
    MolecularGraph,
    VALENCES,
    build_molecule,
    graph_to_specs,
)


def open_attachment_atoms(g: MolecularGraph) -> list[int]:
    """Atoms that can accept one more single bond."""
    return [i for i, atom in enumerate(g.atoms)
            if not atom.explicit_h and atom.h_count >= 1 and atom.symbol in VALENCES]


def join(a: MolecularGraph, ai: int, b: MolecularGraph, bi: int) -> MolecularGraph:
    """Disjoint union of two molecules with a new single bond ai-bi."""
    specs_a, bonds_a = graph_to_specs(a)
    specs_b, bonds_b = graph_to_specs(b)
    offset = len(specs_a)
    bonds = bonds_a + [(x + offset, y + offset, o, s) for x, y, o, s in bonds_b]
    bonds.append((ai, bi + offset, 1, None))
    return build_molecule(specs_a + specs_b, bonds)


def add_atom(g: MolecularGraph, at: int, symbol: str) -> MolecularGraph:
    from .graph import AtomSpec

    specs, bonds = graph_to_specs(g)
    specs.append(AtomSpec(symbol=symbol))
    bonds.append((at, len(specs) - 1, 1, None))
    return build_molecule(specs, bonds)


def remove_atom(g: MolecularGraph, idx: int) -> MolecularGraph:
    specs, bonds = graph_to_specs(g)
    if len(specs) < 2:
        raise GraphError("cannot remove the last atom")
    remap = {}
    new_specs = []
    for i, spec in enumerate(specs):
        if i == idx:
            continue
        remap[i] = len(new_specs)
        new_specs.append(spec)
    new_bonds = [(remap[a], remap[b], o, s) for a, b, o, s in bonds
                 if a != idx and b != idx]
    if not new_bonds and len(new_specs) > 1:
        raise GraphError("removal disconnects the molecule")
    graph = build_molecule(new_specs, new_bonds)
    if len(_components_count(graph)) > 1:
        raise GraphError("removal disconnects the molecule")
    return graph


def _components_count(g: MolecularGraph):
    from .graph import connected_components

    return connected_components(g)


def set_bond_order(g: MolecularGraph, bond_idx: int, order: int) -> MolecularGraph:
    specs, bonds = graph_to_specs(g)
    a, b, _, stereo = bonds[bond_idx]
    if g.bonds[bond_idx].order == AROMATIC:
        raise GraphError("cannot rewrite an aromatic bond order")
    bonds[bond_idx] = (a, b, order, stereo)
    return build_molecule(specs, bonds)


def set_element(g: MolecularGraph, idx: int, symbol: str) -> MolecularGraph:
    from .graph import AtomSpec

    specs, bonds = graph_to_specs(g)
    old = specs[idx]
    specs[idx] = AtomSpec(symbol=symbol, charge=old.charge, isotope=old.isotope,
                          aromatic=old.aromatic, explicit_h=old.explicit_h,
                          chiral=old.chiral)
    return build_molecule(specs, bonds)


def cut_single_bond(g: MolecularGraph, bond_idx: int) -> tuple[MolecularGraph, int, MolecularGraph, int]:
    """Split on a non-ring single bond.

    Returns (fragment containing a, cut atom index within it, fragment
    containing b, cut atom index within it).
    """
    bond = g.bonds[bond_idx]
    if g.bond_in_ring(bond_idx) or bond.order != 1:
        raise GraphError("can only cut non-ring single bonds")
    specs, bonds = graph_to_specs(g)
    kept = [bs for k, bs in enumerate(bonds) if k != bond_idx]
    # flood fill from each endpoint
    side_a = _reachable(len(specs), kept, bond.a)
    side_b = _reachable(len(specs), kept, bond.b)
    frag_a, idx_a = _extract(specs, kept, side_a, bond.a)
    frag_b, idx_b = _extract(specs, kept, side_b, bond.b)
    return frag_a, idx_a, frag_b, idx_b


def _reachable(n: int, bonds, start: int) -> set[int]:
    adj: dict[int, list[int]] = {}
    for a, b, _, _ in bonds:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nbr in adj.get(node, ()):
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return seen


def _extract(specs, bonds, atoms: set[int], marker: int) -> tuple[MolecularGraph, int]:
    remap = {}
    new_specs = []
    for i in sorted(atoms):
        remap[i] = len(new_specs)
        new_specs.append(specs[i])
    new_bonds = [(remap[a], remap[b], o, s) for a, b, o, s in bonds
                 if a in atoms and b in atoms]
    return build_molecule(new_specs, new_bonds), remap[marker]


def cuttable_bonds(g: MolecularGraph) -> list[int]:
    return [i for i, bond in enumerate(g.bonds)
            if bond.order == 1 and not g.bond_in_ring(i)]
