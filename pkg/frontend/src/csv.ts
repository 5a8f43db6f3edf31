import { existsSync, readFileSync } from 'fs';

export interface Table {
  header: string[];
  rows: number[][];
  raw: string[][];
}

/** Read a simple unquoted CSV with a header row; numbers parsed where possible. */
export function readCsv(path: string): Table {
  if (!existsSync(path)) {
    throw new Error(`missing input file: ${path}`);
  }
  const lines = readFileSync(path, 'utf8').split('\n').filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`empty CSV: ${path}`);
  }
  const header = lines[0].split(',').map((s) => s.trim());
  const raw = lines.slice(1).map((l) => l.split(',').map((s) => s.trim()));
  const rows = raw.map((cells) => cells.map((c) => Number(c)));
  return { header, rows, raw };
}

/** Column by name as a number array (NaN where unparsable). */
export function column(table: Table, name: string): number[] {
  const i = table.header.indexOf(name);
  if (i < 0) {
    throw new Error(`missing column '${name}' (have: ${table.header.join(', ')})`);
  }
  return table.rows.map((r) => r[i]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.header.includes(name);
}
