/**
 * Commands:
 *   emit-vectors        <corpus.smi> <out.json>
 *   emit-fragment-table <corpus.smi> <out.tsv>
 *
 * Shared parameter-table paths default to the consumer package's data
 * directory and can be overridden with --data-dir.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { graphFromMolJson } from "./graph";
import { buildFragmentTable, serializeFragmentTable } from "./sascore";
import { DataPaths, emitVectors } from "./vectors";

// eslint-disable-next-line @typescript-eslint/no-var-requires
const initRDKitModule = require("@rdkit/rdkit");

const MIN_FRAGMENT_CORPUS = 1000;

function dataPaths(dataDir: string): DataPaths {
  return {
    hbond: path.join(dataDir, "hbond.tsv"),
    alerts: path.join(dataDir, "alerts.tsv"),
    qedAds: path.join(dataDir, "qed_ads.tsv"),
    saTable: path.join(dataDir, "sa_fragment_scores.tsv"),
  };
}

async function main(): Promise<number> {
  const args = process.argv.slice(2);
  const command = args.shift();
  let dataDir = path.resolve(__dirname, "../../src/molpilot/data");
  const positional: string[] = [];
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--data-dir") {
      dataDir = path.resolve(args[++i]);
    } else {
      positional.push(args[i]);
    }
  }
  if (!command || positional.length !== 2) {
    console.error(
      "usage: cli.js (emit-vectors|emit-fragment-table) <corpus.smi> <out> [--data-dir DIR]",
    );
    return 1;
  }
  const [corpusPath, outPath] = positional;
  const rdkit = await initRDKitModule();

  if (command === "emit-vectors") {
    const file = emitVectors(rdkit, corpusPath, dataPaths(dataDir));
    fs.writeFileSync(outPath, JSON.stringify(file, null, 1) + "\n");
    console.log(
      `wrote ${file.vectors.length} vectors (${file.skipped.length} skipped) to ${outPath}`,
    );
    if (file.skipped.length) {
      for (const skip of file.skipped) {
        console.log(`  skipped line ${skip.line}: ${skip.smiles} (${skip.reason})`);
      }
    }
    return 0;
  }

  if (command === "emit-fragment-table") {
    const lines = fs.readFileSync(corpusPath, "utf8").split("\n");
    const graphs = [];
    let molecules = 0;
    for (const line of lines) {
      const smiles = line.split("\t")[0].trim();
      if (!smiles) continue;
      molecules++;
      const mol = rdkit.get_mol(smiles);
      if (!mol) {
        console.error(`skipping unparseable corpus SMILES: ${smiles}`);
        continue;
      }
      graphs.push(graphFromMolJson(mol.get_json()));
      mol.delete();
    }
    if (molecules < MIN_FRAGMENT_CORPUS) {
      console.error(
        `corpus too small: ${molecules} molecules (< ${MIN_FRAGMENT_CORPUS})`,
      );
      return 1;
    }
    const table = buildFragmentTable(graphs);
    fs.writeFileSync(outPath, serializeFragmentTable(table, path.basename(corpusPath)));
    console.log(`wrote ${table.scores.size} fragment scores to ${outPath}`);
    return 0;
  }

  console.error(`unknown command ${command}`);
  return 1;
}

main().then((code) => process.exit(code));
