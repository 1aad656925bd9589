/**
 * Strict CSV reading for the simulation outputs.
 *
 * The upstream files are plain comma-separated tables without quoting;
 * anything structurally off (ragged rows, missing columns, empty file) is a
 * schema violation and throws with a precise message. Empty fields encode
 * missing values.
 */

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, required: string[] = []): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const columns = lines[0].split(",");
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new Error(`missing column '${col}' (header: ${columns.join(",")})`);
    }
  }
  if (lines.length === 1) {
    throw new Error("empty CSV: header but no data rows");
  }
  const rows: Record<string, string>[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `row ${i + 1} has ${parts.length} fields, expected ${columns.length}`
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((c, j) => (row[c] = parts[j]));
    rows.push(row);
  }
  return { columns, rows };
}

/** Required numeric field. */
export function num(row: Record<string, string>, col: string): number {
  const v = Number(row[col]);
  if (row[col] === "" || row[col] === undefined || Number.isNaN(v)) {
    throw new Error(`field '${col}' is not numeric: '${row[col]}'`);
  }
  return v;
}

/** Optional numeric field; empty means missing. */
export function numOrNull(row: Record<string, string>, col: string): number | null {
  if (row[col] === "" || row[col] === undefined) return null;
  const v = Number(row[col]);
  if (Number.isNaN(v)) {
    throw new Error(`field '${col}' is not numeric: '${row[col]}'`);
  }
  return v;
}

export function boolOrNull(row: Record<string, string>, col: string): boolean | null {
  const v = row[col];
  if (v === "" || v === undefined) return null;
  if (v === "true") return true;
  if (v === "false") return false;
  throw new Error(`field '${col}' is not a boolean: '${v}'`);
}
