/**
 * Drug-likeness score: unweighted geometric mean of eight asymmetric
 * double sigmoid desirabilities, parameterized by the shared table.
 */

import * as fs from "node:fs";

import { DescriptorVector } from "./descriptors";

export interface AdsParams {
  a: number;
  b: number;
  c: number;
  d: number;
  e: number;
  f: number;
  dmax: number;
}

const ORDER = ["mw", "logp", "hba", "hbd", "tpsa", "rotb", "arom", "alerts"] as const;
const CLAMP_MIN = 1e-9;

export function loadAdsTable(path: string): Map<string, AdsParams> {
  const table = new Map<string, AdsParams>();
  for (const line of fs.readFileSync(path, "utf8").split("\n")) {
    if (!line || line.startsWith("#")) continue;
    const [name, ...values] = line.split("\t");
    const [a, b, c, d, e, f, dmax] = values.map(Number);
    table.set(name, { a, b, c, d, e, f, dmax });
  }
  return table;
}

export function ads(x: number, p: AdsParams): number {
  const exp1 = 1.0 + Math.exp(-(x - p.c + p.d / 2.0) / p.e);
  const exp2 = 1.0 + Math.exp(-(x - p.c - p.d / 2.0) / p.f);
  return (p.a + (p.b / exp1) * (1.0 - 1.0 / exp2)) / p.dmax;
}

export function qed(d: DescriptorVector, table: Map<string, AdsParams>): number {
  const inputs: Record<(typeof ORDER)[number], number> = {
    mw: d.mw,
    logp: d.logp,
    hba: d.qedHba,
    hbd: d.qedHbd,
    tpsa: d.tpsa,
    rotb: d.rotb,
    arom: d.arom,
    alerts: d.alerts,
  };
  let logSum = 0;
  for (const name of ORDER) {
    const value = Math.min(1.0, Math.max(CLAMP_MIN, ads(inputs[name], table.get(name)!)));
    logSum += Math.log(value);
  }
  return Math.exp(logSum / ORDER.length);
}
