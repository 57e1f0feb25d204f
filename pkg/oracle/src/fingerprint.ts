/**
 * Circular environment hashing, bit-vector fingerprints and Tanimoto
 * similarity. The hash scheme (32-bit FNV-1a over little-endian int32
 * encodings) is shared verbatim with the consumer package, so environment
 * identifiers and folded bits are comparable across both codebases.
 */

import { MolGraph } from "./graph";

const FNV_OFFSET = 0x811c9dc5;
const FNV_PRIME = 0x01000193;

export function fnv1aInts(values: number[]): number {
  let h = FNV_OFFSET;
  for (const v of values) {
    let x = v >>> 0;
    for (let i = 0; i < 4; i++) {
      h ^= x & 0xff;
      h = Math.imul(h, FNV_PRIME) >>> 0;
      x >>>= 8;
    }
  }
  return h >>> 0;
}

export function atomInvariants(g: MolGraph, radius: number): number[][] {
  const current = g.atoms.map((atom, i) =>
    fnv1aInts([
      atom.z,
      g.neighbors[i].length,
      atom.charge,
      atom.hcount,
      atom.inRing ? 1 : 0,
    ]),
  );
  const layers = [current];
  for (let r = 0; r < radius; r++) {
    const prev = layers[layers.length - 1];
    const next: number[] = [];
    for (let i = 0; i < g.atoms.length; i++) {
      const pairs = g.neighbors[i]
        .map(([j, b]) => [g.bonds[b].order, prev[j]] as [number, number])
        .sort((p, q) => (p[0] - q[0]) || (p[1] - q[1]));
      const flat = [prev[i]];
      for (const [order, inv] of pairs) flat.push(order, inv);
      next.push(fnv1aInts(flat));
    }
    layers.push(next);
  }
  return layers;
}

export function environmentCounts(g: MolGraph, radius = 2): Map<number, number> {
  const counts = new Map<number, number>();
  for (const layer of atomInvariants(g, radius)) {
    for (const inv of layer) counts.set(inv, (counts.get(inv) ?? 0) + 1);
  }
  return counts;
}

export function fingerprintBits(g: MolGraph, radius = 2, nbits = 2048): Set<number> {
  const bits = new Set<number>();
  for (const layer of atomInvariants(g, radius)) {
    for (const inv of layer) bits.add(inv % nbits);
  }
  return bits;
}

export function tanimoto(a: Set<number>, b: Set<number>): number {
  let intersection = 0;
  for (const bit of a) if (b.has(bit)) intersection++;
  const union = a.size + b.size - intersection;
  if (union === 0) return 1.0;
  return intersection / union;
}
