/**
 * Descriptor extraction: toolkit-native values (weight, logP, TPSA,
 * aromatic ring count) plus the shared counting conventions for H-bond
 * donors/acceptors, rotatable bonds and structural alerts, evaluated with
 * the toolkit's own substructure matcher on the shared pattern files.
 */

import * as fs from "node:fs";

import { MolGraph, heavyDegree, ringBonds } from "./graph";

export interface JSMolLike {
  get_descriptors(): string;
  get_json(): string;
  get_smiles(): string;
  get_substruct_matches(qmol: unknown): string;
  delete(): void;
}

export interface RDKitLike {
  get_mol(smiles: string): JSMolLike | null;
  get_qmol(smarts: string): unknown;
}

export interface HbondTables {
  lipinskiExclusions: unknown[];
  qedHba: unknown[];
  qedHbd: unknown[];
}

export interface AlertTable {
  names: string[];
  qmols: unknown[];
}

export function loadHbondTables(rdkit: RDKitLike, path: string): HbondTables {
  const sections: Record<string, unknown[]> = {
    lipinski_hba_exclusions: [],
    qed_hba: [],
    qed_hbd: [],
  };
  let current: unknown[] | null = null;
  for (const line of fs.readFileSync(path, "utf8").split("\n")) {
    if (!line || line.startsWith("#")) continue;
    if (line.startsWith("[")) {
      current = sections[line.replace(/[[\]]/g, "")];
      continue;
    }
    const smarts = line.split("\t")[1];
    const qmol = rdkit.get_qmol(smarts);
    if (!qmol) throw new Error(`toolkit rejected SMARTS ${smarts}`);
    current!.push(qmol);
  }
  return {
    lipinskiExclusions: sections.lipinski_hba_exclusions,
    qedHba: sections.qed_hba,
    qedHbd: sections.qed_hbd,
  };
}

export function loadAlerts(rdkit: RDKitLike, path: string): AlertTable {
  const names: string[] = [];
  const qmols: unknown[] = [];
  for (const line of fs.readFileSync(path, "utf8").split("\n")) {
    if (!line || line.startsWith("#")) continue;
    const [name, smarts] = line.split("\t");
    const qmol = rdkit.get_qmol(smarts);
    if (!qmol) throw new Error(`toolkit rejected alert SMARTS ${smarts}`);
    names.push(name);
    qmols.push(qmol);
  }
  return { names, qmols };
}

function substructMatches(mol: JSMolLike, qmol: unknown): Array<{ atoms: number[] }> {
  // the toolkit returns "{}" rather than "[]" when nothing matches
  const parsed = JSON.parse(mol.get_substruct_matches(qmol));
  return Array.isArray(parsed) ? parsed : [];
}

function matchedAnchorAtoms(mol: JSMolLike, qmol: unknown): Set<number> {
  return new Set(substructMatches(mol, qmol).map((m) => m.atoms[0]));
}

export function hasMatch(mol: JSMolLike, qmol: unknown): boolean {
  return substructMatches(mol, qmol).length > 0;
}

const N = 7;
const O = 8;

export function hbondDonors(g: MolGraph): number {
  return g.atoms.filter((a) => (a.z === N || a.z === O) && a.hcount >= 1).length;
}

export function hbondAcceptors(g: MolGraph, mol: JSMolLike, tables: HbondTables): number {
  const candidates = new Set<number>();
  g.atoms.forEach((a, i) => {
    if (a.z === N || a.z === O) candidates.add(i);
  });
  const excluded = new Set<number>();
  for (const qmol of tables.lipinskiExclusions) {
    for (const atom of matchedAnchorAtoms(mol, qmol)) excluded.add(atom);
  }
  let count = 0;
  for (const idx of candidates) if (!excluded.has(idx)) count++;
  return count;
}

export function qedHbondCounts(
  mol: JSMolLike,
  tables: HbondTables,
): [number, number] {
  const donors = new Set<number>();
  for (const qmol of tables.qedHbd) {
    for (const atom of matchedAnchorAtoms(mol, qmol)) donors.add(atom);
  }
  const acceptors = new Set<number>();
  for (const qmol of tables.qedHba) {
    for (const atom of matchedAnchorAtoms(mol, qmol)) acceptors.add(atom);
  }
  return [donors.size, acceptors.size];
}

export function rotatableBonds(g: MolGraph): number {
  const inRing = ringBonds(g);
  let count = 0;
  g.bonds.forEach((bond, idx) => {
    if (bond.order !== 1 || inRing.has(idx)) return;
    if (heavyDegree(g, bond.a) < 2 || heavyDegree(g, bond.b) < 2) return;
    if (isAmideCN(g, bond.a, bond.b) || isAmideCN(g, bond.b, bond.a)) return;
    count++;
  });
  return count;
}

function isAmideCN(g: MolGraph, c: number, n: number): boolean {
  if (g.atoms[c].z !== 6 || g.atoms[n].z !== N) return false;
  return g.neighbors[c].some(
    ([nbr, b]) => g.bonds[b].order === 2 && g.atoms[nbr].z === O,
  );
}

export function alertCount(mol: JSMolLike, alerts: AlertTable): number {
  return alerts.qmols.filter((qmol) => hasMatch(mol, qmol)).length;
}

export interface DescriptorVector {
  mw: number;
  logp: number;
  tpsa: number;
  hbd: number;
  hba: number;
  rotb: number;
  arom: number;
  alerts: number;
  heavy: number;
  qedHbd: number;
  qedHba: number;
}

export function computeDescriptors(
  mol: JSMolLike,
  g: MolGraph,
  tables: HbondTables,
  alerts: AlertTable,
): DescriptorVector {
  const d = JSON.parse(mol.get_descriptors());
  const [qedHbd, qedHba] = qedHbondCounts(mol, tables);
  return {
    mw: d.amw,
    logp: d.CrippenClogP,
    tpsa: d.tpsa,
    hbd: hbondDonors(g),
    hba: hbondAcceptors(g, mol, tables),
    rotb: rotatableBonds(g),
    arom: d.NumAromaticRings,
    alerts: alertCount(mol, alerts),
    heavy: g.atoms.filter((a) => a.z !== 1).length,
    qedHbd,
    qedHba,
  };
}
