import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface SweepTable {
  /** key -> value pairs recovered from the leading `# section.key = value` lines */
  config: Map<string, string>;
  columns: string[];
  rows: Record<string, string>[];
}

/**
 * Read one of the sweep CSVs. The generator embeds its fully resolved
 * configuration as `#`-prefixed comment lines before the header row; those are
 * split off into `config` so renderers can recover e.g. the potentials that
 * produced a phase map.
 */
export function readSweepCsv(path: string): SweepTable {
  const text = readFileSync(path, "utf8");
  const config = new Map<string, string>();
  const dataLines: string[] = [];
  for (const line of text.split(/\r?\n/)) {
    if (line.startsWith("#")) {
      const m = line.slice(1).match(/^\s*([^=]+?)\s*=\s*(.*)$/);
      if (m) config.set(m[1], m[2]);
    } else if (line.trim() !== "") {
      dataLines.push(line);
    }
  }
  if (dataLines.length === 0) {
    return { config, columns: [], rows: [] };
  }
  const parsed = Papa.parse<Record<string, string>>(dataLines.join("\n"), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`CSV parse error in ${path}: ${e.message} (row ${e.row})`);
  }
  return { config, columns: parsed.meta.fields ?? [], rows: parsed.data };
}

/** Throw with a descriptive message unless every required column is present. */
export function requireColumns(table: SweepTable, kind: string, required: string[]): void {
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new Error(
      `schema mismatch for kind '${kind}': missing column(s) ${missing.join(", ")}` +
        ` (found: ${table.columns.join(", ") || "none"})`,
    );
  }
}

export function numericColumn(table: SweepTable, name: string): number[] {
  return table.rows.map((r, i) => {
    const v = Number(r[name]);
    if (Number.isNaN(v) && r[name] !== "nan") {
      throw new Error(`non-numeric value '${r[name]}' in column ${name}, row ${i}`);
    }
    return v;
  });
}
