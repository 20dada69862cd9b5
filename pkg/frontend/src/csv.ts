/**
 * Reader for the harness CSV outputs.
 *
 * Every file the harness writes starts with a `# config: {...}` comment
 * holding the resolved experiment configuration, followed by a header row
 * and data rows. Unknown columns are carried through untouched; callers
 * pick the ones they need.
 */
import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface CsvTable {
  /** Parsed `# config:` JSON, or {} if the comment is absent. */
  config: Record<string, unknown>;
  columns: string[];
  rows: Record<string, string | number>[];
}

const CONFIG_PREFIX = "# config: ";

export function parseCsv(text: string, name: string): CsvTable {
  const lines = text.split(/\r?\n/);
  let config: Record<string, unknown> = {};
  let body = "";
  for (const line of lines) {
    if (line.startsWith("#")) {
      if (line.startsWith(CONFIG_PREFIX)) {
        config = JSON.parse(line.slice(CONFIG_PREFIX.length));
      }
      continue;
    }
    body += line + "\n";
  }
  if (body.trim() === "") {
    throw new Error(`${name}: no data rows`);
  }
  const parsed = Papa.parse<Record<string, string | number>>(body, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${name}: malformed CSV (${first.message})`);
  }
  const columns = parsed.meta.fields ?? [];
  if (columns.length === 0 || parsed.data.length === 0) {
    throw new Error(`${name}: no data rows`);
  }
  return { config, columns, rows: parsed.data };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf8"), path);
}

/** Throws if any required column is missing, naming the first one. */
export function requireColumns(table: CsvTable, required: string[], name: string): void {
  for (const col of required) {
    if (!table.columns.includes(col)) {
      throw new Error(`${name}: missing column "${col}"`);
    }
  }
}

export function numericColumn(table: CsvTable, col: string): number[] {
  return table.rows.map((row) => {
    const v = row[col];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new Error(`column "${col}" has non-numeric value ${JSON.stringify(v)}`);
    }
    return v;
  });
}
