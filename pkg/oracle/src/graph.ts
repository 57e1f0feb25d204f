/**
 * Molecule graph extraction from the toolkit's interchange JSON.
 *
 * Atoms carry atomic number, total hydrogen count, formal charge,
 * aromaticity and ring membership; bonds carry an order code where 4
 * denotes aromatic. Ring sets are the toolkit's SSSR rings.
 */

export interface GraphAtom {
  z: number;
  charge: number;
  hcount: number;
  aromatic: boolean;
  inRing: boolean;
}

export interface GraphBond {
  a: number;
  b: number;
  order: number; // 1 | 2 | 3 | 4 (aromatic)
}

export interface MolGraph {
  atoms: GraphAtom[];
  bonds: GraphBond[];
  rings: number[][];
  neighbors: Array<Array<[number, number]>>; // [neighbor atom, bond index]
}

interface RdkitJsonAtom {
  z?: number;
  impHs?: number;
  chg?: number;
}

interface RdkitJsonBond {
  bo?: number;
  atoms: [number, number];
}

export function graphFromMolJson(jsonText: string): MolGraph {
  const data = JSON.parse(jsonText);
  const defaults = data.defaults ?? { atom: {}, bond: {} };
  const defAtom = defaults.atom ?? {};
  const defBond = defaults.bond ?? {};
  const molecule = data.molecules[0];
  const extensions = (molecule.extensions ?? []).find(
    (e: { name: string }) => e.name === "rdkitRepresentation",
  );
  const aromaticAtoms = new Set<number>(extensions?.aromaticAtoms ?? []);
  const aromaticBonds = new Set<number>(extensions?.aromaticBonds ?? []);
  const rings: number[][] = extensions?.atomRings ?? [];
  const ringAtoms = new Set<number>();
  for (const ring of rings) for (const idx of ring) ringAtoms.add(idx);

  const atoms: GraphAtom[] = (molecule.atoms as RdkitJsonAtom[]).map((a, i) => ({
    z: a.z ?? defAtom.z ?? 6,
    charge: a.chg ?? defAtom.chg ?? 0,
    hcount: a.impHs ?? defAtom.impHs ?? 0,
    aromatic: aromaticAtoms.has(i),
    inRing: ringAtoms.has(i),
  }));
  const bonds: GraphBond[] = (molecule.bonds as RdkitJsonBond[]).map((b, i) => ({
    a: b.atoms[0],
    b: b.atoms[1],
    order: aromaticBonds.has(i) ? 4 : (b.bo ?? defBond.bo ?? 1),
  }));
  const neighbors: Array<Array<[number, number]>> = atoms.map(() => []);
  bonds.forEach((bond, i) => {
    neighbors[bond.a].push([bond.b, i]);
    neighbors[bond.b].push([bond.a, i]);
  });
  return { atoms, bonds, rings, neighbors };
}

const RING_BOND_CACHE = new WeakMap<MolGraph, Set<number>>();

export function ringBonds(g: MolGraph): Set<number> {
  let cached = RING_BOND_CACHE.get(g);
  if (cached) return cached;
  cached = new Set<number>();
  const bondIndex = new Map<string, number>();
  g.bonds.forEach((b, i) => {
    bondIndex.set(`${Math.min(b.a, b.b)}-${Math.max(b.a, b.b)}`, i);
  });
  for (const ring of g.rings) {
    for (let k = 0; k < ring.length; k++) {
      const a = ring[k];
      const b = ring[(k + 1) % ring.length];
      const idx = bondIndex.get(`${Math.min(a, b)}-${Math.max(a, b)}`);
      if (idx !== undefined) cached.add(idx);
    }
  }
  RING_BOND_CACHE.set(g, cached);
  return cached;
}

export function heavyDegree(g: MolGraph, idx: number): number {
  return g.neighbors[idx].length;
}

/** Spiro atoms / bridgehead atoms over SSSR ring pairs (shared recipe). */
export function spiroAndBridgeheads(g: MolGraph): [number, number] {
  const ringSets = g.rings.map((r) => new Set(r));
  const ringBondSets = g.rings.map((ring) => {
    const set = new Set<string>();
    for (let k = 0; k < ring.length; k++) {
      const a = ring[k];
      const b = ring[(k + 1) % ring.length];
      set.add(`${Math.min(a, b)}-${Math.max(a, b)}`);
    }
    return set;
  });
  const spiro = new Set<number>();
  const bridge = new Set<number>();
  for (let i = 0; i < ringSets.length; i++) {
    for (let j = i + 1; j < ringSets.length; j++) {
      const sharedAtoms = [...ringSets[i]].filter((x) => ringSets[j].has(x));
      const sharedBonds = [...ringBondSets[i]].filter((x) => ringBondSets[j].has(x));
      if (sharedAtoms.length === 1 && sharedBonds.length === 0) {
        spiro.add(sharedAtoms[0]);
      } else if (sharedBonds.length >= 2) {
        const incidence = new Map<number, number>();
        for (const key of sharedBonds) {
          for (const part of key.split("-")) {
            const atom = Number(part);
            incidence.set(atom, (incidence.get(atom) ?? 0) + 1);
          }
        }
        for (const [atom, count] of incidence) {
          if (count === 1) bridge.add(atom);
        }
      }
    }
  }
  return [spiro.size, bridge.size];
}
