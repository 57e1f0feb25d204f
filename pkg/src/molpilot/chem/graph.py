"""Molecular graph model: atoms, bonds, rings, aromaticity and valence rules.

Graphs are immutable after construction. All construction funnels through
:func:`build_molecule`, which resolves implicit hydrogens, perceives rings
(smallest set of smallest rings) and applies a simple Hueckel 4n+2 aromaticity
model to rings written in Kekule form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

SINGLE = 1
DOUBLE = 2
TRIPLE = 3
AROMATIC = 4

#: Elements accepted by the parser, with standard atomic masses (g/mol).
ATOMIC_MASSES: dict[str, float] = {
    "H": 1.008, "Li": 6.941, "B": 10.812, "C": 12.011, "N": 14.007,
    "O": 15.999, "F": 18.998, "Na": 22.990, "Mg": 24.305, "Al": 26.982,
    "Si": 28.086, "P": 30.974, "S": 32.067, "Cl": 35.453, "K": 39.098,
    "Ca": 40.078, "Fe": 55.845, "Zn": 65.390, "As": 74.922, "Se": 78.960,
    "Br": 79.904, "Sn": 118.711, "I": 126.904,
}

ATOMIC_NUMBERS: dict[str, int] = {
    "H": 1, "Li": 3, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9, "Na": 11,
    "Mg": 12, "Al": 13, "Si": 14, "P": 15, "S": 16, "Cl": 17, "K": 19,
    "Ca": 20, "Fe": 26, "Zn": 30, "As": 33, "Se": 34, "Br": 35, "Sn": 50,
    "I": 53,
}

#: Allowed valences for neutral atoms written without brackets.  Bracket
#: atoms carry an explicit hydrogen count and bypass this table.
VALENCES: dict[str, tuple[int, ...]] = {
    "B": (3,), "C": (4,), "N": (3,), "O": (2,), "P": (3, 5),
    "S": (2, 4, 6), "F": (1,), "Cl": (1,), "Br": (1,), "I": (1,),
}

ORGANIC_SUBSET = frozenset(VALENCES)
AROMATIC_ELEMENTS = frozenset({"B", "C", "N", "O", "P", "S", "Se", "As"})


class GraphError(ValueError):
    """Structural problem in a molecular graph."""

    def __init__(self, message: str, atom_index: int | None = None):
        super().__init__(message)
        self.atom_index = atom_index


class ValenceError(GraphError):
    """Atom valence exceeds every allowed valence for its element."""


class AromaticityError(GraphError):
    """Aromatic flag on an atom that is not part of any ring."""


@dataclass(frozen=True)
class Atom:
    symbol: str
    charge: int = 0
    isotope: Optional[int] = None
    h_count: int = 0
    aromatic: bool = False
    explicit_h: bool = False  # bracket atom: h_count fixed by input, no valence fill
    chiral: Optional[str] = None  # '@' / '@@', recorded but ignored downstream

    @property
    def atomic_number(self) -> int:
        return ATOMIC_NUMBERS[self.symbol]

    @property
    def mass(self) -> float:
        if self.isotope is not None:
            return float(self.isotope)
        return ATOMIC_MASSES[self.symbol]


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: int
    stereo: Optional[str] = None  # '/' or '\\', recorded but ignored downstream

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a


@dataclass(frozen=True)
class AtomSpec:
    """Pre-resolution atom description used by the parser and graph editors."""

    symbol: str
    charge: int = 0
    isotope: Optional[int] = None
    aromatic: bool = False
    explicit_h: Optional[int] = None  # None -> resolve from valence table
    chiral: Optional[str] = None


@dataclass(frozen=True)
class MolecularGraph:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    rings: tuple[tuple[int, ...], ...]
    _neighbors: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False)
    _ring_bonds: frozenset[int] = field(repr=False)
    _ring_counts: tuple[int, ...] = field(repr=False)

    def neighbors(self, idx: int) -> tuple[tuple[int, int], ...]:
        """(neighbor atom index, bond index) pairs for one atom."""
        return self._neighbors[idx]

    def degree(self, idx: int) -> int:
        return len(self._neighbors[idx])

    def in_ring(self, idx: int) -> bool:
        return any(b in self._ring_bonds for _, b in self._neighbors[idx])

    def bond_in_ring(self, bond_idx: int) -> bool:
        return bond_idx in self._ring_bonds

    def ring_count(self, idx: int) -> int:
        """Number of perceived (SSSR) rings containing the atom."""
        return self._ring_counts[idx]

    def bond_between(self, a: int, b: int) -> Optional[Bond]:
        for nbr, bidx in self._neighbors[a]:
            if nbr == b:
                return self.bonds[bidx]
        return None

    @property
    def heavy_atom_count(self) -> int:
        return sum(1 for a in self.atoms if a.symbol != "H")

    def aromatic_rings(self) -> list[tuple[int, ...]]:
        return [r for r in self.rings if all(self.atoms[i].aromatic for i in r)]

    def ring_sizes(self, idx: int) -> list[int]:
        return [len(r) for r in self.rings if idx in r]


def _cycle_bonds(n_atoms: int, bonds: Sequence[tuple[int, int]]) -> set[int]:
    """Indices of bonds that lie on at least one cycle (non-bridge edges)."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for bidx, (a, b) in enumerate(bonds):
        adj[a].append((b, bidx))
        adj[b].append((a, bidx))
    # iterative Tarjan bridge finding
    disc = [-1] * n_atoms
    low = [0] * n_atoms
    bridges: set[int] = set()
    timer = 0
    for root in range(n_atoms):
        if disc[root] != -1:
            continue
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]
        while stack:
            node, parent_bond, ptr = stack.pop()
            if ptr == 0:
                disc[node] = low[node] = timer
                timer += 1
            advanced = False
            while ptr < len(adj[node]):
                nbr, bidx = adj[node][ptr]
                ptr += 1
                if bidx == parent_bond:
                    continue
                if disc[nbr] == -1:
                    stack.append((node, parent_bond, ptr))
                    stack.append((nbr, bidx, 0))
                    advanced = True
                    break
                low[node] = min(low[node], disc[nbr])
            if advanced:
                continue
            if parent_bond != -1:
                parent = bonds[parent_bond][0] if bonds[parent_bond][1] == node else bonds[parent_bond][1]
                low[parent] = min(low[parent], low[node])
                if low[node] > disc[parent]:
                    bridges.add(parent_bond)
    return {i for i in range(len(bonds)) if i not in bridges}


def _shortest_ring_through(adj: list[list[tuple[int, int]]], a: int, b: int,
                           skip_bond: int) -> Optional[tuple[int, ...]]:
    """Shortest path a..b avoiding skip_bond, returned as a ring atom tuple."""
    from collections import deque

    prev: dict[int, int] = {a: -1}
    queue = deque([a])
    while queue:
        node = queue.popleft()
        if node == b:
            break
        for nbr, bidx in adj[node]:
            if bidx == skip_bond or nbr in prev:
                continue
            prev[nbr] = node
            queue.append(nbr)
    if b not in prev:
        return None
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return tuple(path)


def perceive_rings(n_atoms: int, bond_pairs: Sequence[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Smallest set of smallest rings via bounded BFS per cyclic bond.

    Deterministic: candidate rings are sorted by (size, canonical atom tuple)
    and accepted greedily while they contribute an uncovered ring bond.
    """
    cyclic = _cycle_bonds(n_atoms, bond_pairs)
    if not cyclic:
        return []
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for bidx, (a, b) in enumerate(bond_pairs):
        adj[a].append((b, bidx))
        adj[b].append((a, bidx))
    candidates = []
    for bidx in sorted(cyclic):
        a, b = bond_pairs[bidx]
        ring = _shortest_ring_through(adj, a, b, bidx)
        if ring is None:
            continue
        lo = ring.index(min(ring))
        rot = ring[lo:] + ring[:lo]
        if len(rot) > 2 and rot[1] > rot[-1]:
            rot = (rot[0],) + tuple(reversed(rot[1:]))
        candidates.append((len(rot), rot, bidx))
    candidates.sort(key=lambda c: (c[0], c[1]))
    bond_index = {}
    for bidx, (a, b) in enumerate(bond_pairs):
        bond_index[(a, b)] = bidx
        bond_index[(b, a)] = bidx
    covered: set[int] = set()
    rings: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for _, ring, _ in candidates:
        if ring in seen:
            continue
        ring_bonds = {bond_index[(ring[i], ring[(i + 1) % len(ring)])] for i in range(len(ring))}
        if ring_bonds - covered:
            rings.append(ring)
            seen.add(ring)
            covered |= ring_bonds
        if covered >= cyclic:
            break
    return rings


def _pi_electrons(spec: AtomSpec, ring_double: bool, exo_double: bool) -> Optional[int]:
    """Hueckel pi contribution of one ring atom, or None if ineligible.

    ``ring_double`` means a double bond into the surrounding ring system;
    ``exo_double`` means a double bond to an acyclic atom (e.g. quinones),
    which disqualifies the ring in this deliberately simple model.
    """
    if exo_double:
        return None
    if ring_double:
        return 1
    if spec.symbol in ("N", "O", "S", "P", "Se", "As"):
        return 2
    if spec.symbol == "C":
        if spec.charge < 0:
            return 2
        if spec.charge > 0:
            return 0
        return None  # saturated carbon
    return None


def build_molecule(atom_specs: Sequence[AtomSpec],
                   bond_specs: Sequence[tuple[int, int, Optional[int], Optional[str]]]) -> MolecularGraph:
    """Validate and finalize a molecule.

    ``bond_specs`` entries are (a, b, order-or-None, stereo); a ``None``
    order is the SMILES default bond, resolved to aromatic when both ends
    are aromatic and the bond sits on a cycle, single otherwise.

    Raises :class:`GraphError` subclasses with ``atom_index`` set so the
    parser can map failures back to byte offsets.
    """
    n = len(atom_specs)
    if n == 0:
        raise GraphError("empty molecule")
    seen_pairs: set[tuple[int, int]] = set()
    for a, b, _, _ in bond_specs:
        if not (0 <= a < n and 0 <= b < n):
            raise GraphError(f"bond endpoint out of range: {a}-{b}")
        if a == b:
            raise GraphError("self-bond", atom_index=a)
        key = (min(a, b), max(a, b))
        if key in seen_pairs:
            raise GraphError(f"duplicate bond {a}-{b}", atom_index=a)
        seen_pairs.add(key)
    for spec in atom_specs:
        if spec.symbol not in ATOMIC_NUMBERS:
            raise GraphError(f"unknown element {spec.symbol!r}")

    pairs = [(a, b) for a, b, _, _ in bond_specs]
    cyclic = _cycle_bonds(n, pairs)

    # resolve default bond orders
    orders: list[int] = []
    for bidx, (a, b, order, _) in enumerate(bond_specs):
        if order is None:
            both_aromatic = atom_specs[a].aromatic and atom_specs[b].aromatic
            orders.append(AROMATIC if (both_aromatic and bidx in cyclic) else SINGLE)
        else:
            orders.append(order)

    # aromatic atoms must sit on a ring
    ring_atoms = {i for bidx in cyclic for i in pairs[bidx]}
    for idx, spec in enumerate(atom_specs):
        if spec.aromatic and idx not in ring_atoms:
            raise AromaticityError(f"aromatic atom {spec.symbol!r} outside any ring",
                                   atom_index=idx)
        if spec.aromatic and spec.symbol not in AROMATIC_ELEMENTS:
            raise AromaticityError(f"element {spec.symbol!r} cannot be aromatic",
                                   atom_index=idx)

    # hydrogen resolution
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for bidx, (a, b) in enumerate(pairs):
        adjacency[a].append((b, bidx))
        adjacency[b].append((a, bidx))
    h_counts: list[int] = []
    overrides: list[bool] = []
    for idx, spec in enumerate(atom_specs):
        if spec.explicit_h is not None:
            h_counts.append(spec.explicit_h)
            overrides.append(True)
            continue
        overrides.append(False)
        if spec.aromatic:
            h_counts.append(1 if spec.symbol == "C" and len(adjacency[idx]) == 2 else 0)
            continue
        order_sum = sum(orders[b] if orders[b] != AROMATIC else 1 for _, b in adjacency[idx])
        allowed = VALENCES.get(spec.symbol)
        if allowed is None:
            raise ValenceError(f"element {spec.symbol!r} requires bracket notation",
                               atom_index=idx)
        for v in allowed:
            if order_sum <= v:
                h_counts.append(v - order_sum)
                break
        else:
            raise ValenceError(
                f"valence {order_sum} exceeds allowed {allowed} for {spec.symbol}",
                atom_index=idx)

    rings = perceive_rings(n, pairs)

    # Hueckel perception over rings written in Kekule form
    aromatic_flags = [spec.aromatic for spec in atom_specs]
    bond_index = {}
    for bidx, (a, b) in enumerate(pairs):
        bond_index[(a, b)] = bidx
        bond_index[(b, a)] = bidx
    # evaluate every ring against the original Kekule orders, flip afterwards
    perceived_atoms: set[int] = set()
    perceived_bonds: set[int] = set()
    for ring in rings:
        if any(aromatic_flags[i] for i in ring):
            continue  # written aromatic already, or mixed-case input
        ring_bonds = {bond_index[(ring[k], ring[(k + 1) % len(ring)])] for k in range(len(ring))}
        pi_total = 0
        ok = True
        for i in ring:
            ring_double = False
            exo_double = False
            for nbr, bidx in adjacency[i]:
                if orders[bidx] == DOUBLE:
                    # doubles into the ring system keep eligibility even when
                    # the partner sits on a fused sibling ring (naphthalene)
                    if nbr in ring_atoms:
                        ring_double = True
                    else:
                        exo_double = True
                elif orders[bidx] == TRIPLE:
                    ok = False
            pi = _pi_electrons(atom_specs[i], ring_double, exo_double)
            if not ok or pi is None:
                ok = False
                break
            pi_total += pi
        if ok and pi_total >= 2 and pi_total % 4 == 2:
            perceived_atoms.update(ring)
            perceived_bonds.update(ring_bonds)
    for i in perceived_atoms:
        aromatic_flags[i] = True
    for bidx in perceived_bonds:
        orders[bidx] = AROMATIC

    atoms = tuple(
        Atom(symbol=spec.symbol, charge=spec.charge, isotope=spec.isotope,
             h_count=h_counts[idx], aromatic=aromatic_flags[idx],
             explicit_h=overrides[idx], chiral=spec.chiral)
        for idx, spec in enumerate(atom_specs))
    bonds = tuple(
        Bond(a=a, b=b, order=orders[bidx], stereo=stereo)
        for bidx, (a, b, _, stereo) in enumerate(bond_specs))
    neighbors = tuple(tuple(adjacency[i]) for i in range(n))
    ring_counts = tuple(sum(1 for r in rings if i in r) for i in range(n))
    return MolecularGraph(atoms=atoms, bonds=bonds, rings=tuple(rings),
                          _neighbors=neighbors, _ring_bonds=frozenset(cyclic),
                          _ring_counts=ring_counts)


def graph_to_specs(g: MolecularGraph) -> tuple[list[AtomSpec], list[tuple[int, int, Optional[int], Optional[str]]]]:
    """Decompose a graph for editing; inverse of :func:`build_molecule`."""
    atom_specs = [
        AtomSpec(symbol=a.symbol, charge=a.charge, isotope=a.isotope,
                 aromatic=a.aromatic,
                 explicit_h=a.h_count if a.explicit_h else None,
                 chiral=a.chiral)
        for a in g.atoms
    ]
    bond_specs = [(b.a, b.b, b.order if b.order != AROMATIC else None, b.stereo)
                  for b in g.bonds]
    return atom_specs, bond_specs


def connected_components(g: MolecularGraph) -> list[list[int]]:
    seen: set[int] = set()
    comps: list[list[int]] = []
    for start in range(len(g.atoms)):
        if start in seen:
            continue
        stack = [start]
        comp = []
        seen.add(start)
        while stack:
            node = stack.pop()
            comp.append(node)
            for nbr, _ in g.neighbors(node):
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        comps.append(sorted(comp))
    return comps


def molecular_weight(g: MolecularGraph) -> float:
    total = 0.0
    for atom in g.atoms:
        total += atom.mass
        total += atom.h_count * ATOMIC_MASSES["H"]
    return total
