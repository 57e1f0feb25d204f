"""SMILES reader and canonical writer.

Supported grammar: organic-subset atoms, bracket atoms with isotope /
charge / hydrogen count / chirality, branches, ring closures (digits and
%nn), bond symbols ``- = # :`` and directional ``/ \\`` (recorded,
ignored downstream), and ``.`` component separators.  Parse failures
raise :class:`SmilesError` with the byte offset of the offending token.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    AROMATIC,
    ATOMIC_NUMBERS,
    DOUBLE,
    SINGLE,
    TRIPLE,
    AromaticityError,
    AtomSpec,
    GraphError,
    MolecularGraph,
    ValenceError,
    VALENCES,
    build_molecule,
    connected_components,
)

_TWO_LETTER_ORGANIC = ("Cl", "Br")
_AROMATIC_ORGANIC = "bcnops"
_BOND_CHARS = {"-": SINGLE, "=": DOUBLE, "#": TRIPLE, ":": AROMATIC}


class SmilesError(ValueError):
    """SMILES syntax or chemistry error, located by byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.reason = message
        self.offset = offset


@dataclass
class _PendingBond:
    order: int | None
    stereo: str | None
    offset: int


def parse_smiles(text: str) -> MolecularGraph:
    """Parse one SMILES string into a finalized molecular graph."""
    if not text or not text.strip():
        raise SmilesError("empty SMILES", 0)
    text = text.strip()
    atoms: list[AtomSpec] = []
    offsets: list[int] = []  # byte offset per atom, for error reporting
    bonds: list[tuple[int, int, int | None, str | None]] = []
    prev: int | None = None
    stack: list[int | None] = []
    open_parens: list[int] = []
    ring_open: dict[int, tuple[int, int | None, str | None, int]] = {}
    pending = _PendingBond(None, None, 0)
    i = 0
    n = len(text)

    def take_atom(spec: AtomSpec, offset: int) -> None:
        nonlocal prev, pending
        atoms.append(spec)
        offsets.append(offset)
        idx = len(atoms) - 1
        if prev is not None:
            bonds.append((prev, idx, pending.order, pending.stereo))
        prev = idx
        pending = _PendingBond(None, None, 0)

    def take_ring(num: int, offset: int) -> None:
        nonlocal pending
        if prev is None:
            raise SmilesError("ring closure before any atom", offset)
        if num in ring_open:
            other, order0, stereo0, _ = ring_open.pop(num)
            order = pending.order if pending.order is not None else order0
            if order0 is not None and pending.order is not None and order0 != pending.order:
                raise SmilesError("conflicting ring-closure bond orders", offset)
            if other == prev:
                raise SmilesError("ring closure to the same atom", offset)
            if any((a, b) in ((prev, other), (other, prev)) for a, b, _, _ in bonds):
                raise SmilesError("duplicate ring-closure bond", offset)
            bonds.append((other, prev, order, stereo0 or pending.stereo))
        else:
            ring_open[num] = (prev, pending.order, pending.stereo, offset)
        pending = _PendingBond(None, None, 0)

    while i < n:
        ch = text[i]
        if ch == "(":
            if prev is None:
                raise SmilesError("branch before any atom", i)
            stack.append(prev)
            open_parens.append(i)
            i += 1
        elif ch == ")":
            if not stack:
                raise SmilesError("unbalanced parentheses", i)
            prev = stack.pop()
            open_parens.pop()
            i += 1
        elif ch in _BOND_CHARS:
            pending = _PendingBond(_BOND_CHARS[ch], None, i)
            i += 1
        elif ch in "/\\":
            pending = _PendingBond(SINGLE, ch, i)
            i += 1
        elif ch == ".":
            prev = None
            pending = _PendingBond(None, None, 0)
            i += 1
        elif ch.isdigit():
            take_ring(int(ch), i)
            i += 1
        elif ch == "%":
            if i + 2 >= n + 1 or not text[i + 1:i + 3].isdigit():
                raise SmilesError("'%' requires two digits", i)
            take_ring(int(text[i + 1:i + 3]), i)
            i += 3
        elif ch == "[":
            spec, consumed = _parse_bracket(text, i)
            take_atom(spec, i)
            i += consumed
        else:
            two = text[i:i + 2]
            if two in _TWO_LETTER_ORGANIC:
                take_atom(AtomSpec(symbol=two), i)
                i += 2
            elif ch in "BCNOPSFI":
                take_atom(AtomSpec(symbol=ch), i)
                i += 1
            elif ch in _AROMATIC_ORGANIC:
                take_atom(AtomSpec(symbol=ch.upper(), aromatic=True), i)
                i += 1
            else:
                raise SmilesError(f"unexpected character {ch!r}", i)

    if stack:
        raise SmilesError("unbalanced parentheses", open_parens[-1])
    if ring_open:
        num, (_, _, _, offset) = min(ring_open.items(), key=lambda kv: kv[1][3])
        raise SmilesError(f"unmatched ring closure {num}", offset)
    if not atoms:
        raise SmilesError("no atoms in SMILES", 0)

    try:
        return build_molecule(atoms, bonds)
    except GraphError as exc:
        offset = offsets[exc.atom_index] if exc.atom_index is not None else 0
        raise SmilesError(str(exc), offset) from exc


def _parse_bracket(text: str, start: int) -> tuple[AtomSpec, int]:
    end = text.find("]", start)
    if end == -1:
        raise SmilesError("unterminated bracket atom", start)
    body = text[start + 1:end]
    pos = 0
    isotope = None
    digits = ""
    while pos < len(body) and body[pos].isdigit():
        digits += body[pos]
        pos += 1
    if digits:
        isotope = int(digits)
    aromatic = False
    symbol = None
    rest = body[pos:]
    for cand in sorted(ATOMIC_NUMBERS, key=len, reverse=True):
        if rest.startswith(cand):
            symbol = cand
            pos += len(cand)
            break
    if symbol is None:
        for cand in ("se", "as", "b", "c", "n", "o", "p", "s"):
            if rest.startswith(cand):
                symbol = cand.capitalize() if len(cand) == 2 else cand.upper()
                aromatic = True
                pos += len(cand)
                break
    if symbol is None:
        raise SmilesError(f"unknown element in bracket {body!r}", start + 1 + pos)
    chiral = None
    if pos < len(body) and body[pos] == "@":
        chiral = "@"
        pos += 1
        if pos < len(body) and body[pos] == "@":
            chiral = "@@"
            pos += 1
    h_count = 0
    if pos < len(body) and body[pos] == "H":
        pos += 1
        digits = ""
        while pos < len(body) and body[pos].isdigit():
            digits += body[pos]
            pos += 1
        h_count = int(digits) if digits else 1
    charge = 0
    if pos < len(body) and body[pos] in "+-":
        sign = 1 if body[pos] == "+" else -1
        pos += 1
        digits = ""
        while pos < len(body) and body[pos].isdigit():
            digits += body[pos]
            pos += 1
        if digits:
            charge = sign * int(digits)
        else:
            charge = sign
            while pos < len(body) and body[pos] == body[pos - 1]:
                charge += sign
                pos += 1
    if pos != len(body):
        raise SmilesError(f"unexpected bracket content {body[pos:]!r}", start + 1 + pos)
    return AtomSpec(symbol=symbol, charge=charge, isotope=isotope,
                    aromatic=aromatic, explicit_h=h_count, chiral=chiral), end - start + 1


def _reparse_h_count(g: MolecularGraph, idx: int) -> int | None:
    """Hydrogen count a bare (bracket-free) atom would get on re-parse."""
    atom = g.atoms[idx]
    if atom.aromatic:
        heavy_degree = g.degree(idx)
        return 1 if atom.symbol == "C" and heavy_degree == 2 else 0
    allowed = VALENCES.get(atom.symbol)
    if allowed is None:
        return None
    order_sum = sum(1 if bond.order == AROMATIC else bond.order
                    for _, bidx in g.neighbors(idx)
                    for bond in (g.bonds[bidx],))
    for v in allowed:
        if order_sum <= v:
            return v - order_sum
    return None


def _atom_token(g: MolecularGraph, idx: int) -> str:
    atom = g.atoms[idx]
    symbol = atom.symbol.lower() if atom.aromatic else atom.symbol
    needs_bracket = (
        atom.isotope is not None
        or atom.charge != 0
        or atom.symbol not in VALENCES
        or _reparse_h_count(g, idx) != atom.h_count
    )
    if not needs_bracket:
        return symbol
    parts = ["["]
    if atom.isotope is not None:
        parts.append(str(atom.isotope))
    parts.append(symbol)
    if atom.h_count == 1:
        parts.append("H")
    elif atom.h_count > 1:
        parts.append(f"H{atom.h_count}")
    if atom.charge == 1:
        parts.append("+")
    elif atom.charge == -1:
        parts.append("-")
    elif atom.charge > 1:
        parts.append(f"+{atom.charge}")
    elif atom.charge < -1:
        parts.append(f"-{-atom.charge}")
    parts.append("]")
    return "".join(parts)


def _bond_token(g: MolecularGraph, bond_idx: int) -> str:
    bond = g.bonds[bond_idx]
    if bond.order == DOUBLE:
        return "="
    if bond.order == TRIPLE:
        return "#"
    if bond.order == SINGLE and g.atoms[bond.a].aromatic and g.atoms[bond.b].aromatic:
        return "-"  # biphenyl-style single bond between aromatic systems
    return ""


def write_smiles(g: MolecularGraph, ranks: list[int] | None = None) -> str:
    """Write a canonical SMILES string (stereo markers are dropped).

    With ``ranks`` omitted, canonical ranks are computed; the output is
    identical for isomorphic graphs and re-parses to the same canonical
    form.
    """
    if ranks is None:
        from .canon import canonical_ranks
        ranks = canonical_ranks(g)
    pieces = []
    for comp in connected_components(g):
        pieces.append(_write_component(g, comp, ranks))
    pieces.sort()
    return ".".join(pieces)


def _write_component(g: MolecularGraph, comp: list[int], ranks: list[int]) -> str:
    root = min(comp, key=lambda i: ranks[i])
    visited: set[int] = set()
    tree: dict[int, list[tuple[int, int]]] = {i: [] for i in comp}
    closure_bonds: list[tuple[int, int, int]] = []   # (a, b, bond_idx)
    closure_seen: set[int] = set()
    order: list[int] = []
    parent: dict[int, int | None] = {root: None}

    def discover(node: int) -> None:
        visited.add(node)
        order.append(node)
        for nbr, bidx in sorted(g.neighbors(node), key=lambda nb: ranks[nb[0]]):
            if nbr not in visited:
                parent[nbr] = node
                tree[node].append((nbr, bidx))
                discover(nbr)
            elif nbr != parent.get(node) and bidx not in closure_seen:
                closure_seen.add(bidx)
                closure_bonds.append((node, nbr, bidx))

    discover(root)

    # assign ring-closure digits per atom in traversal order
    position = {atom: k for k, atom in enumerate(order)}
    closure_digits: dict[int, list[tuple[int, int]]] = {i: [] for i in comp}
    digit_pool = iter(range(1, 100))
    for a, b, bidx in sorted(closure_bonds, key=lambda t: (position[t[1]], position[t[0]])):
        digit = next(digit_pool)
        closure_digits[b].append((digit, bidx))
        closure_digits[a].append((digit, bidx))

    out: list[str] = []

    def emit(node: int, via_bond: int | None) -> None:
        if via_bond is not None:
            out.append(_bond_token(g, via_bond))
        out.append(_atom_token(g, node))
        for digit, bidx in closure_digits[node]:
            token = _bond_token(g, bidx)
            out.append(f"{token}%{digit:02d}" if digit >= 10 else f"{token}{digit}")
        children = tree[node]
        for k, (child, bidx) in enumerate(children):
            if k < len(children) - 1:
                out.append("(")
                emit(child, bidx)
                out.append(")")
            else:
                emit(child, bidx)

    emit(root, None)
    return "".join(out)
