import { readFileSync } from "fs";

export class SchemaError extends Error {}
export class EmptyDataError extends Error {}

export interface Table {
  source: string;
  columns: string[];
  rows: number[][];
  /** raw string cells, for label-like columns */
  cells: string[][];
}

export function parseCsvText(text: string, source = "<string>"): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new EmptyDataError(`${source}: empty file`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const cells = lines.slice(1).map((line) => line.split(",").map((c) => c.trim()));
  if (cells.length === 0) {
    throw new EmptyDataError(`${source}: no data rows`);
  }
  const rows = cells.map((cols, i) => {
    if (cols.length !== columns.length) {
      throw new SchemaError(
        `${source}: row ${i + 2} has ${cols.length} cells, header has ${columns.length}`
      );
    }
    return cols.map((c) => Number(c));
  });
  return { source, columns, rows, cells };
}

export function readCsv(path: string): Table {
  return parseCsvText(readFileSync(path, "utf-8"), path);
}

/** Indices of the required columns; throws naming the first missing one. */
export function requireColumns(table: Table, needed: string[], kind: string): number[] {
  return needed.map((name) => {
    const idx = table.columns.indexOf(name);
    if (idx < 0) {
      throw new SchemaError(
        `${table.source}: missing column '${name}' required by figure kind '${kind}' ` +
          `(found: ${table.columns.join(", ")})`
      );
    }
    return idx;
  });
}

export function numericColumn(table: Table, index: number): number[] {
  return table.rows.map((row, i) => {
    const v = row[index];
    if (!Number.isFinite(v)) {
      throw new SchemaError(
        `${table.source}: non-numeric value '${table.cells[i][index]}' in column ` +
          `'${table.columns[index]}' (row ${i + 2})`
      );
    }
    return v;
  });
}
