"""Circular (Morgan/ECFP-style) fingerprints and Tanimoto similarity.

Environment identifiers are 32-bit FNV-1a hashes over little-endian
encoded integer tuples, so the scheme is portable across languages and
runs.  Every atom environment at radii 0..r folds into the bit vector
modulo the width.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import MolecularGraph

_FNV_OFFSET = 0x811C9DC5
_FNV_PRIME = 0x01000193


def fnv1a_ints(values: list[int]) -> int:
    """32-bit FNV-1a over 4-byte little-endian encodings of each value."""
    h = _FNV_OFFSET
    for v in values:
        x = v & 0xFFFFFFFF
        for _ in range(4):
            h ^= x & 0xFF
            h = (h * _FNV_PRIME) & 0xFFFFFFFF
            x >>= 8
    return h


class FingerprintError(ValueError):
    pass


@dataclass(frozen=True)
class Fingerprint:
    bits: int
    nbits: int
    radius: int
    popcount: int

    def __post_init__(self):
        if self.bits.bit_count() != self.popcount:
            raise FingerprintError("popcount does not match bit vector")


def atom_invariants(g: MolecularGraph, radius: int) -> list[list[int]]:
    """Per-radius atom environment hashes, radii 0..radius inclusive."""
    n = len(g.atoms)
    current = []
    for i, atom in enumerate(g.atoms):
        current.append(fnv1a_ints([
            atom.atomic_number,
            g.degree(i),
            atom.charge,
            atom.h_count,
            1 if g.in_ring(i) else 0,
        ]))
    layers = [current]
    for _ in range(radius):
        previous = layers[-1]
        nxt = []
        for i in range(n):
            pairs = sorted((g.bonds[b].order, previous[j]) for j, b in g.neighbors(i))
            flat = [previous[i]]
            for order, inv in pairs:
                flat.append(order)
                flat.append(inv)
            nxt.append(fnv1a_ints(flat))
        layers.append(nxt)
    return layers


def environment_counts(g: MolecularGraph, radius: int = 2) -> dict[int, int]:
    """Multiset of environment hashes; shared with the synthesis scorer."""
    counts: dict[int, int] = {}
    for layer in atom_invariants(g, radius):
        for inv in layer:
            counts[inv] = counts.get(inv, 0) + 1
    return counts


def morgan_fingerprint(g: MolecularGraph, radius: int = 2, nbits: int = 2048) -> Fingerprint:
    """Fold all environment hashes into an ``nbits``-wide bit vector."""
    if radius < 0:
        raise FingerprintError("radius must be >= 0")
    if nbits < 64 or nbits & (nbits - 1) != 0:
        raise FingerprintError("nbits must be a power of two >= 64")
    bits = 0
    for layer in atom_invariants(g, radius):
        for inv in layer:
            bits |= 1 << (inv % nbits)
    return Fingerprint(bits=bits, nbits=nbits, radius=radius, popcount=bits.bit_count())


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; defined as 1.0 when both vectors are empty."""
    if a.nbits != b.nbits or a.radius != b.radius:
        raise FingerprintError(
            f"fingerprint parameter mismatch: {a.nbits}/{a.radius} vs {b.nbits}/{b.radius}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union
