import Papa from "papaparse";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

/** Parse CSV text into a header + string-valued rows. */
export function parseCsv(text: string): Table {
  const out = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (out.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${out.errors[0].message}`);
  }
  const data = out.data;
  if (data.length === 0) {
    throw new SchemaError("no header row");
  }
  const columns = data[0];
  if (data.length === 1) {
    throw new SchemaError("no data rows");
  }
  const rows = data.slice(1).map((cells) => {
    const row: Record<string, string> = {};
    columns.forEach((c, i) => {
      row[c] = cells[i] ?? "";
    });
    return row;
  });
  return { columns, rows };
}

/** Error with a column diff when required columns are missing
 *  (unknown extra columns are ignored by design). */
export function requireColumns(table: Table, required: string[]): void {
  const have = new Set(table.columns);
  const missing = required.filter((c) => !have.has(c));
  if (missing.length > 0) {
    const extra = table.columns.filter((c) => !required.includes(c));
    throw new SchemaError(
      `schema mismatch: missing columns [${missing.join(", ")}]; ` +
        `required [${required.join(", ")}]; ` +
        `found [${table.columns.join(", ")}]` +
        (extra.length ? ` (extra columns ignored: [${extra.join(", ")}])` : ""),
    );
  }
}

export function num(row: Record<string, string>, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`column '${col}' has non-numeric value '${row[col]}'`);
  }
  return v;
}
