/**
 * Reader for the CSV artifacts the qwmix CLI writes: a single header line,
 * comma-separated numeric rows, LF endings. No quoting ever appears in
 * those files, so none is handled here.
 */

import { readFileSync } from "fs";

export class InputError extends Error {}

export interface Table {
  file: string;
  header: string[];
  rows: number[][];
}

export function parseCsv(text: string, file: string): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new InputError(`${file}: expected a header line and at least one data row`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new InputError(
        `${file}: row ${i} has ${parts.length} fields, header has ${header.length}`);
    }
    const row = parts.map(Number);
    const bad = row.findIndex(Number.isNaN);
    if (bad >= 0) {
      throw new InputError(`${file}: row ${i}, column "${header[bad]}" is not a number`);
    }
    rows.push(row);
  }
  return { file, header, rows };
}

export function readCsv(file: string): Table {
  let text: string;
  try {
    text = readFileSync(file, "utf-8");
  } catch {
    throw new InputError(`cannot read ${file}`);
  }
  return parseCsv(text, file);
}

/** Column by name, or an error naming both the file and the column. */
export function column(table: Table, name: string): number[] {
  const j = table.header.indexOf(name);
  if (j < 0) {
    throw new InputError(
      `${table.file}: missing column "${name}" (header: ${table.header.join(",")})`);
  }
  return table.rows.map((r) => r[j]);
}
