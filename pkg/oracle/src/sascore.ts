/**
 * Synthesis-accessibility scoring and fragment-table generation.
 *
 * The table maps radius-0..2 environment hashes to log10 frequency ratios
 * over the reference corpus; the affine calibration constants (observed
 * raw-score range) are recorded in the table header. The scoring side of
 * this recipe is implemented identically by the consumer package.
 */

import * as crypto from "node:crypto";

import { environmentCounts } from "./fingerprint";
import { MolGraph, spiroAndBridgeheads } from "./graph";

const MISSING_SCORE = -4.0;

export interface FragmentTable {
  scores: Map<number, number>;
  rawMin: number;
  rawMax: number;
}

export function rawScore(g: MolGraph, table: FragmentTable): number {
  const counts = environmentCounts(g, 2);
  let total = 0;
  let weighted = 0;
  for (const [env, c] of counts) {
    total += c;
    weighted += (table.scores.get(env) ?? MISSING_SCORE) * c;
  }
  const fragmentScore = weighted / total;

  const nAtoms = g.atoms.length;
  const sizePenalty = Math.pow(nAtoms, 1.005) - nAtoms;
  const [nSpiro, nBridge] = spiroAndBridgeheads(g);
  const ringPenalty = Math.log10(nSpiro + 1) + Math.log10(nBridge + 1);
  const macroPenalty = g.rings.some((r) => r.length > 8) ? Math.log10(2) : 0.0;
  const stereoPenalty = 0.0; // corpora are stereo-free by construction
  let symmetryBonus = 0.0;
  if (nAtoms > counts.size) {
    symmetryBonus = Math.log(nAtoms / counts.size) * 0.5;
  }
  return fragmentScore - sizePenalty - ringPenalty - macroPenalty - stereoPenalty + symmetryBonus;
}

export function saScore(g: MolGraph, table: FragmentTable): number {
  const raw = rawScore(g, table);
  const span = table.rawMax - table.rawMin;
  let score = 11.0 - ((raw - table.rawMin + 1.0) / span) * 9.0;
  if (score > 8.0) score = 8.0 + Math.log(score + 1.0 - 9.0);
  return Math.min(10.0, Math.max(1.0, score));
}

export function buildFragmentTable(graphs: MolGraph[]): FragmentTable {
  const counts = new Map<number, number>();
  for (const g of graphs) {
    for (const [env, c] of environmentCounts(g, 2)) {
      counts.set(env, (counts.get(env) ?? 0) + c);
    }
  }
  let total = 0;
  for (const c of counts.values()) total += c;
  const mean = total / counts.size;
  const scores = new Map<number, number>();
  for (const [env, c] of counts) scores.set(env, Math.log10(c / mean));

  const probe: FragmentTable = { scores, rawMin: -4.0, rawMax: 2.5 };
  const raws = graphs.map((g) => rawScore(g, probe)).sort((a, b) => a - b);
  return { scores, rawMin: raws[0], rawMax: raws[raws.length - 1] };
}

export function serializeFragmentTable(table: FragmentTable, corpusName: string): string {
  const keys = [...table.scores.keys()].sort((a, b) => a - b);
  const body = keys.map((k) => `${k}\t${table.scores.get(k)!.toFixed(6)}`).join("\n") + "\n";
  const checksum = crypto.createHash("sha256").update(body).digest("hex");
  const header =
    "# synthesis-accessibility fragment log-frequency scores\n" +
    `# generated from ${corpusName}\n` +
    `# raw_min\t${table.rawMin.toFixed(6)}\n` +
    `# raw_max\t${table.rawMax.toFixed(6)}\n` +
    `# checksum\t${checksum}\n`;
  return header + body;
}

export function parseFragmentTable(text: string): FragmentTable {
  const scores = new Map<number, number>();
  let rawMin = -4.0;
  let rawMax = 2.5;
  for (const line of text.split("\n")) {
    if (line.startsWith("# raw_min")) rawMin = Number(line.split("\t")[1]);
    else if (line.startsWith("# raw_max")) rawMax = Number(line.split("\t")[1]);
    else if (line.startsWith("#") || !line) continue;
    else {
      const [key, value] = line.split("\t");
      scores.set(Number(key), Number(value));
    }
  }
  return { scores, rawMin, rawMax };
}
