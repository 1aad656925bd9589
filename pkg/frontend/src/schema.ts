/**
 * Typed row models for the powerbin output files (documented in the main
 * README under "Output schemas"). Loaders validate structure and never
 * recompute statistics.
 */

import { readFileSync } from "fs";
import { boolOrNull, num, numOrNull, parseCsv } from "./csv.js";

export interface CellRow {
  experiment: string;
  method: string;
  lambda: number;
  noiseKind: string;
  sigma: number;
  n: number;
  alpha: number;
  replicates: number;
  valid: number;
  meanAlpha: number | null;
  sdAlpha: number | null;
  mse: number | null;
  rejectionRate: number | null;
  flagged: boolean;
}

export function readCells(path: string): CellRow[] {
  const table = parseCsv(readFileSync(path, "utf-8"), [
    "experiment", "method", "lambda", "noise_kind", "sigma", "n", "alpha",
    "replicates", "valid", "mean_alpha", "sd_alpha", "mse", "rejection_rate",
    "flagged",
  ]);
  return table.rows.map((r) => ({
    experiment: r.experiment,
    method: r.method,
    lambda: num(r, "lambda"),
    noiseKind: r.noise_kind,
    sigma: num(r, "sigma"),
    n: num(r, "n"),
    alpha: num(r, "alpha"),
    replicates: num(r, "replicates"),
    valid: num(r, "valid"),
    meanAlpha: numOrNull(r, "mean_alpha"),
    sdAlpha: numOrNull(r, "sd_alpha"),
    mse: numOrNull(r, "mse"),
    rejectionRate: numOrNull(r, "rejection_rate"),
    flagged: r.flagged === "true",
  }));
}

export interface ReplicateRow {
  experiment: string;
  rep: number;
  method: string;
  lambda: number;
  noiseKind: string;
  sigma: number;
  alphaHat: number | null;
  pValue: number | null;
  reject: boolean | null;
}

export function readReplicates(path: string): ReplicateRow[] {
  const table = parseCsv(readFileSync(path, "utf-8"), [
    "experiment", "rep", "method", "lambda", "noise_kind", "sigma",
    "alpha_hat", "p_value", "reject",
  ]);
  return table.rows.map((r) => ({
    experiment: r.experiment,
    rep: num(r, "rep"),
    method: r.method,
    lambda: num(r, "lambda"),
    noiseKind: r.noise_kind,
    sigma: num(r, "sigma"),
    alphaHat: numOrNull(r, "alpha_hat"),
    pValue: numOrNull(r, "p_value"),
    reject: boolOrNull(r, "reject"),
  }));
}

export interface ToleranceRow {
  kind: string;
  alpha: number;
  lambda: number;
  n: number;
  sigmaHat: number | null;
  meanAlphaHat: number | null;
  rejectionRate: number | null;
  error: string | null;
}

export function readTolerance(path: string): ToleranceRow[] {
  const table = parseCsv(readFileSync(path, "utf-8"), [
    "kind", "alpha", "lambda", "n", "sigma_hat", "mean_alpha_hat",
    "rejection_rate", "error",
  ]);
  return table.rows.map((r) => ({
    kind: r.kind,
    alpha: num(r, "alpha"),
    lambda: num(r, "lambda"),
    n: num(r, "n"),
    sigmaHat: numOrNull(r, "sigma_hat"),
    meanAlphaHat: numOrNull(r, "mean_alpha_hat"),
    rejectionRate: numOrNull(r, "rejection_rate"),
    error: r.error === "" ? null : r.error,
  }));
}

export interface TailPoint {
  x: number;
  tailProb: number;
}

export function readTail(path: string): TailPoint[] {
  const table = parseCsv(readFileSync(path, "utf-8"), ["x", "tail_prob"]);
  return table.rows.map((r) => ({ x: num(r, "x"), tailProb: num(r, "tail_prob") }));
}

export interface DatasetFit {
  lambda: number;
  alphaHat: number;
  stdErr: number;
  n: number;
  method: string;
  dStat: number;
  pValue: number;
}

export interface DatasetReport {
  dataset: string;
  xM: number;
  fits: DatasetFit[];
  regressionAlpha: number | null;
}

export function readDatasetReport(path: string): DatasetReport {
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  if (typeof raw.dataset !== "string" || typeof raw.x_m !== "number" ||
      !Array.isArray(raw.fits)) {
    throw new Error(`not a dataset report: ${path}`);
  }
  const fits: DatasetFit[] = raw.fits.map((f: any, i: number) => {
    for (const key of ["lambda", "alpha_hat", "std_err", "n", "method", "d_stat", "p_value"]) {
      if (f[key] === undefined) {
        throw new Error(`dataset report fit #${i} is missing '${key}'`);
      }
    }
    return {
      lambda: f.lambda,
      alphaHat: f.alpha_hat,
      stdErr: f.std_err,
      n: f.n,
      method: f.method,
      dStat: f.d_stat,
      pValue: f.p_value,
    };
  });
  return {
    dataset: raw.dataset,
    xM: raw.x_m,
    fits,
    regressionAlpha: raw.regression ? raw.regression.alpha_hat : null,
  };
}
