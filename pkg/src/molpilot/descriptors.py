"""Physicochemical descriptors: weight, logP, H-bond counts, TPSA,
rotatable bonds, aromatic rings and structural alerts.

LogP follows the Wildman-Crippen atomic-contribution scheme and TPSA the
Ertl fragment scheme; both parameter tables ship as versioned data files
whose checksums are recorded in run logs.  Hydrogen-bond donors/acceptors
are counted twice: once with the rule-of-five convention used by the rule
counter, once with the drug-likeness publication's convention.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .chem.graph import AROMATIC, DOUBLE, MolecularGraph, SINGLE, TRIPLE, molecular_weight
from .chem.smarts import Pattern, compile_smarts, has_match, match_at, matching_atoms


class DescriptorError(ValueError):
    pass


class UnparameterizedAtomError(DescriptorError):
    """An atom type missing from a loaded parameter table."""


@dataclass(frozen=True)
class DescriptorSet:
    mw: float
    logp: float
    hbd: int
    hba: int
    tpsa: float
    rotb: int
    arom: int
    alerts: int
    heavy_atoms: int
    qed_hbd: int
    qed_hba: int


def _data_text(name: str) -> str:
    return resources.files("molpilot.data").joinpath(name).read_text()


def data_checksum(name: str) -> str:
    return hashlib.sha256(_data_text(name).encode()).hexdigest()


@lru_cache(maxsize=1)
def _crippen_table() -> list[tuple[str, Pattern, float]]:
    rows = []
    for line in _data_text("crippen.tsv").splitlines():
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        label, smarts, logp = parts[0], parts[1], parts[2]
        rows.append((label, compile_smarts(smarts), float(logp)))
    return rows


@dataclass(frozen=True)
class _TpsaRow:
    symbol: str
    aromatic: bool
    charge: int
    h_count: int
    counts: tuple[int, int, int, int]
    in_3ring: bool
    contribution: float


@lru_cache(maxsize=1)
def _tpsa_table() -> list[_TpsaRow]:
    rows = []
    for line in _data_text("tpsa.tsv").splitlines():
        if not line or line.startswith("#"):
            continue
        p = line.split("\t")
        rows.append(_TpsaRow(
            symbol=p[0], aromatic=p[1] == "1", charge=int(p[2]), h_count=int(p[3]),
            counts=(int(p[4]), int(p[5]), int(p[6]), int(p[7])),
            in_3ring=p[8] == "1", contribution=float(p[9])))
    return rows


@lru_cache(maxsize=1)
def _alert_patterns() -> list[tuple[str, Pattern]]:
    rows = []
    for line in _data_text("alerts.tsv").splitlines():
        if not line or line.startswith("#"):
            continue
        name, smarts = line.split("\t")
        rows.append((name, compile_smarts(smarts)))
    return rows


@lru_cache(maxsize=1)
def _hbond_tables() -> dict[str, list[Pattern]]:
    sections: dict[str, list[Pattern]] = {}
    current: list[Pattern] | None = None
    for line in _data_text("hbond.tsv").splitlines():
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            current = sections.setdefault(line.strip("[]"), [])
            continue
        _, smarts = line.split("\t")
        assert current is not None
        current.append(compile_smarts(smarts))
    return sections


def crippen_logp(g: MolecularGraph) -> float:
    """Sum of atomic contributions; hydrogens typed via their heavy parent."""
    heavy_rows = [(lbl, pat, c) for lbl, pat, c in _crippen_table()
                  if not lbl.startswith("H") or lbl in ("Hal",)]
    h_rows = [(lbl, pat, c) for lbl, pat, c in _crippen_table()
              if lbl.startswith("H") and lbl != "Hal"]
    n = len(g.atoms)
    contribution = [None] * n
    for _, pattern, value in heavy_rows:
        for idx in range(n):
            if contribution[idx] is None and match_at(pattern, g, idx):
                contribution[idx] = value
    total = 0.0
    for idx, value in enumerate(contribution):
        if value is None:
            raise UnparameterizedAtomError(
                f"no logP parameters for atom {idx} ({g.atoms[idx].symbol})")
        total += value
    # hydrogen contributions: strip the leading [#1] and anchor the remaining
    # chain on the bearing heavy atom
    for idx, atom in enumerate(g.atoms):
        if atom.h_count == 0 or atom.symbol == "H":
            continue
        value = None
        for _, pattern, h_value in h_rows:
            rest = _strip_h_head(pattern)
            if rest is None:
                value = h_value  # bare [#1] catch-all
                break
            if match_at(rest, g, idx):
                value = h_value
                break
        if value is None:
            raise UnparameterizedAtomError(
                f"no logP parameters for hydrogens on atom {idx} ({atom.symbol})")
        total += value * atom.h_count
    return total


_H_STRIP_CACHE: dict[int, Pattern | None] = {}


def _strip_h_head(pattern: Pattern) -> Pattern | None:
    """Pattern with the [#1] head removed, re-anchored on the next atom."""
    key = id(pattern)
    if key in _H_STRIP_CACHE:
        return _H_STRIP_CACHE[key]
    if len(pattern.atoms) == 1:
        result = None
    else:
        remap = {i: i - 1 for i in range(1, len(pattern.atoms))}
        atoms = pattern.atoms[1:]
        bonds = [type(b)(remap[b.a], remap[b.b], b.expr)
                 for b in pattern.bonds if b.a != 0 and b.b != 0]
        result = Pattern(atoms=list(atoms), bonds=bonds, source=pattern.source + " (H-stripped)")
    _H_STRIP_CACHE[key] = result
    return result


def ertl_tpsa(g: MolecularGraph) -> float:
    total = 0.0
    for idx, atom in enumerate(g.atoms):
        if atom.symbol not in ("N", "O"):
            continue
        counts = [0, 0, 0, 0]
        for _, bidx in g.neighbors(idx):
            order = g.bonds[bidx].order
            slot = {SINGLE: 0, DOUBLE: 1, TRIPLE: 2, AROMATIC: 3}[order]
            counts[slot] += 1
        in_3ring = 3 in g.ring_sizes(idx)
        matched = False
        for row in _tpsa_table():
            if (row.symbol == atom.symbol and row.aromatic == atom.aromatic
                    and row.charge == atom.charge and row.h_count == atom.h_count
                    and row.counts == tuple(counts)
                    and (not row.in_3ring or in_3ring)):
                total += row.contribution
                matched = True
                break
        if not matched:
            x = g.degree(idx) + atom.h_count
            if atom.symbol == "N":
                total += max(0.0, 30.5 - x * 8.2 + atom.h_count * 1.5)
            else:
                total += max(0.0, 28.5 - x * 8.6 + atom.h_count * 1.5)
    return total


def rotatable_bonds(g: MolecularGraph) -> int:
    """Non-ring single bonds between heavy atoms of degree >= 2, minus amides."""
    count = 0
    for bidx, bond in enumerate(g.bonds):
        if bond.order != SINGLE or g.bond_in_ring(bidx):
            continue
        if g.degree(bond.a) < 2 or g.degree(bond.b) < 2:
            continue
        if _is_amide_cn(g, bond.a, bond.b) or _is_amide_cn(g, bond.b, bond.a):
            continue
        count += 1
    return count


def _is_amide_cn(g: MolecularGraph, c: int, n: int) -> bool:
    if g.atoms[c].symbol != "C" or g.atoms[n].symbol != "N":
        return False
    for nbr, bidx in g.neighbors(c):
        if g.bonds[bidx].order == DOUBLE and g.atoms[nbr].symbol == "O":
            return True
    return False


def aromatic_ring_count(g: MolecularGraph) -> int:
    return len(g.aromatic_rings())


def alert_count(g: MolecularGraph) -> int:
    return sum(1 for _, pattern in _alert_patterns() if has_match(pattern, g))


def hbond_donors(g: MolecularGraph) -> int:
    """Rule-of-five convention: N or O atoms bearing at least one hydrogen."""
    return sum(1 for atom in g.atoms if atom.symbol in ("N", "O") and atom.h_count >= 1)


def hbond_acceptors(g: MolecularGraph) -> int:
    """Rule-of-five convention: N+O count minus the shipped exclusion list."""
    candidates = {i for i, a in enumerate(g.atoms) if a.symbol in ("N", "O")}
    excluded: set[int] = set()
    for pattern in _hbond_tables()["lipinski_hba_exclusions"]:
        excluded.update(matching_atoms(pattern, g))
    return len(candidates - excluded)


def qed_hbond_counts(g: MolecularGraph) -> tuple[int, int]:
    tables = _hbond_tables()
    acceptors: set[int] = set()
    for pattern in tables["qed_hba"]:
        acceptors.update(matching_atoms(pattern, g))
    donors: set[int] = set()
    for pattern in tables["qed_hbd"]:
        donors.update(matching_atoms(pattern, g))
    return len(donors), len(acceptors)


def compute_descriptors(g: MolecularGraph) -> DescriptorSet:
    qed_hbd, qed_hba = qed_hbond_counts(g)
    return DescriptorSet(
        mw=molecular_weight(g),
        logp=crippen_logp(g),
        hbd=hbond_donors(g),
        hba=hbond_acceptors(g),
        tpsa=ertl_tpsa(g),
        rotb=rotatable_bonds(g),
        arom=aromatic_ring_count(g),
        alerts=alert_count(g),
        heavy_atoms=g.heavy_atom_count,
        qed_hbd=qed_hbd,
        qed_hba=qed_hba,
    )
