#!/usr/bin/env node
/**
 * powerbin-plot — render powerbin outputs as SVG figures.
 *
 * Usage:
 *   powerbin-plot tail         --in tail.csv [--fits report.json] --out fig.svg
 *   powerbin-plot alpha_hist   --in replicates.csv [--noise KIND] --out fig.svg
 *   powerbin-plot pvalue_hist  --in replicates.csv [--noise KIND] --out fig.svg
 *   powerbin-plot lambda_curve --in cells.csv --out fig.svg
 *   powerbin-plot contour      --in tolerance.csv --out fig.svg
 *
 * Inputs are the CSV/JSON files written by `powerbin simulate` and
 * `powerbin dataset`; nothing is recomputed. On any error the process exits
 * nonzero and the output file is not written.
 */

import { writeFileSync } from "fs";
import {
  renderAlphaHist,
  renderContour,
  renderLambdaCurve,
  renderPvalueHist,
  renderTail,
} from "./render.js";
import {
  readCells,
  readDatasetReport,
  readReplicates,
  readTail,
  readTolerance,
} from "./schema.js";

export const KINDS = ["tail", "alpha_hist", "pvalue_hist", "lambda_curve", "contour"] as const;

interface Args {
  kind: string;
  input: string;
  out: string;
  fits?: string;
  noise?: string;
}

function parseArgs(argv: string[]): Args {
  const [kind, ...rest] = argv;
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new Error(`usage: powerbin-plot <${KINDS.join("|")}> --in FILE --out FILE.svg`);
  }
  const flags: Record<string, string> = {};
  for (let i = 0; i < rest.length; i += 2) {
    const name = rest[i];
    const value = rest[i + 1];
    if (!name.startsWith("--") || value === undefined) {
      throw new Error(`cannot parse arguments near '${name}'`);
    }
    flags[name.slice(2)] = value;
  }
  for (const required of ["in", "out"]) {
    if (!flags[required]) throw new Error(`--${required} is required`);
  }
  return { kind, input: flags.in, out: flags.out, fits: flags.fits, noise: flags.noise };
}

export function renderFromArgs(args: Args): string {
  switch (args.kind) {
    case "tail":
      return renderTail(readTail(args.input), args.fits ? readDatasetReport(args.fits) : null);
    case "alpha_hist":
      return renderAlphaHist(readReplicates(args.input), args.noise);
    case "pvalue_hist":
      return renderPvalueHist(readReplicates(args.input), args.noise);
    case "lambda_curve":
      return renderLambdaCurve(readCells(args.input));
    case "contour":
      return renderContour(readTolerance(args.input));
    default:
      throw new Error(`unknown kind '${args.kind}'`);
  }
}

export function main(argv: string[]): number {
  let args: Args;
  let svg: string;
  try {
    args = parseArgs(argv);
    svg = renderFromArgs(args);
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  writeFileSync(args.out, svg);
  console.log(`wrote ${args.out}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
