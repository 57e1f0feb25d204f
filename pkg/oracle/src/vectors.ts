/**
 * Golden-vector emission: one descriptor/score vector per corpus
 * molecule, plus all-pairs similarity for the first twenty, with a skip
 * report for anything the toolkit rejects. Output ordering and number
 * formatting are deterministic so reruns are byte-identical.
 */

import * as fs from "node:fs";

import {
  AlertTable,
  DescriptorVector,
  HbondTables,
  JSMolLike,
  RDKitLike,
  computeDescriptors,
  loadAlerts,
  loadHbondTables,
} from "./descriptors";
import { fingerprintBits, tanimoto } from "./fingerprint";
import { MolGraph, graphFromMolJson } from "./graph";
import { loadAdsTable, qed } from "./qed";
import { FragmentTable, parseFragmentTable, saScore } from "./sascore";

export const SCHEMA_VERSION = 1;
const PAIR_BLOCK = 20;

export interface GoldenVector {
  smiles: string;
  canonical: string;
  mw: number;
  logp: number;
  tpsa: number;
  hbd: number;
  hba: number;
  rotb: number;
  arom: number;
  alerts: number;
  qed: number;
  sas: number;
  fp_popcount: number;
  pair_similarities: Array<[string, number]>;
}

export interface VectorFile {
  schema_version: number;
  toolkit: string;
  corpus: string;
  fp_radius: number;
  fp_nbits: number;
  skipped: Array<{ line: number; smiles: string; reason: string }>;
  vectors: GoldenVector[];
}

export interface DataPaths {
  hbond: string;
  alerts: string;
  qedAds: string;
  saTable: string;
}

const round = (x: number, digits: number) => Number(x.toFixed(digits));

export function emitVectors(
  rdkit: RDKitLike & { version(): string },
  corpusPath: string,
  paths: DataPaths,
): VectorFile {
  const tables = loadHbondTables(rdkit, paths.hbond);
  const alerts: AlertTable = loadAlerts(rdkit, paths.alerts);
  const adsTable = loadAdsTable(paths.qedAds);
  const saTable: FragmentTable = parseFragmentTable(fs.readFileSync(paths.saTable, "utf8"));

  const lines = fs.readFileSync(corpusPath, "utf8").split("\n");
  const skipped: VectorFile["skipped"] = [];
  const seen = new Set<string>();
  const parsed: Array<{ smiles: string; mol: JSMolLike; graph: MolGraph }> = [];
  lines.forEach((line, i) => {
    const smiles = line.split("\t")[0].trim();
    if (!smiles) return;
    const mol = rdkit.get_mol(smiles);
    if (!mol) {
      skipped.push({ line: i + 1, smiles, reason: "toolkit rejected SMILES" });
      return;
    }
    const canonical = mol.get_smiles();
    if (seen.has(canonical)) {
      skipped.push({ line: i + 1, smiles, reason: "duplicate molecule" });
      mol.delete();
      return;
    }
    seen.add(canonical);
    parsed.push({ smiles, mol, graph: graphFromMolJson(mol.get_json()) });
  });

  const fps = parsed.map((p) => fingerprintBits(p.graph, 2, 2048));
  const vectors: GoldenVector[] = parsed.map((p, i) => {
    const d: DescriptorVector = computeDescriptors(p.mol, p.graph, tables, alerts);
    const pairs: Array<[string, number]> = [];
    if (i < PAIR_BLOCK) {
      for (let j = 0; j < Math.min(PAIR_BLOCK, parsed.length); j++) {
        if (j === i) continue;
        pairs.push([parsed[j].smiles, round(tanimoto(fps[i], fps[j]), 6)]);
      }
    }
    return {
      smiles: p.smiles,
      canonical: p.mol.get_smiles(),
      mw: round(d.mw, 5),
      logp: round(d.logp, 5),
      tpsa: round(d.tpsa, 4),
      hbd: d.hbd,
      hba: d.hba,
      rotb: d.rotb,
      arom: d.arom,
      alerts: d.alerts,
      qed: round(qed(d, adsTable), 6),
      sas: round(saScore(p.graph, saTable), 6),
      fp_popcount: fps[i].size,
      pair_similarities: pairs,
    };
  });
  parsed.forEach((p) => p.mol.delete());
  return {
    schema_version: SCHEMA_VERSION,
    toolkit: `rdkit-js ${rdkit.version()}`,
    corpus: corpusPath.split("/").slice(-1)[0],
    fp_radius: 2,
    fp_nbits: 2048,
    skipped,
    vectors,
  };
}
