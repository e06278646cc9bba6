import { ColumnSpec, DENSITY_COLUMN, ResultBundle } from "./types";

export const SUPPORTED_SCHEMA_VERSIONS = [1];

export class BundleError extends Error {}

const NUMERIC_KINDS = new Set(["int", "float", "bool"]);

function coerceNumeric(raw: unknown, column: string, row: number): number {
  if (raw === null) return NaN;
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  if (typeof raw === "number") return raw;
  throw new BundleError(`row ${row}, column ${column}: expected a number, got ${typeof raw}`);
}

/** Validate a parsed bundle JSON and build the columnar view. */
export function parseBundle(data: unknown): ResultBundle {
  if (typeof data !== "object" || data === null) {
    throw new BundleError("bundle is not a JSON object");
  }
  const body = data as Record<string, unknown>;
  const version = body["schema_version"];
  if (typeof version !== "number" || !SUPPORTED_SCHEMA_VERSIONS.includes(version)) {
    throw new BundleError(`unsupported bundle schema version ${String(version)}`);
  }
  const fingerprint = body["config_fingerprint"];
  if (typeof fingerprint !== "string") {
    throw new BundleError("bundle has no config_fingerprint");
  }
  const rawColumns = body["columns"];
  if (!Array.isArray(rawColumns) || rawColumns.length === 0) {
    throw new BundleError("bundle has no column manifest");
  }
  const columns: ColumnSpec[] = rawColumns.map((c, i) => {
    const col = c as Record<string, unknown>;
    if (typeof col["name"] !== "string" || typeof col["kind"] !== "string") {
      throw new BundleError(`column ${i} is missing name/kind`);
    }
    return {
      name: col["name"] as string,
      unit: (col["unit"] as string) ?? "",
      kind: col["kind"] as ColumnSpec["kind"],
    };
  });
  const rows = body["rows"];
  if (!Array.isArray(rows)) {
    throw new BundleError("bundle has no rows array");
  }

  const numeric = new Map<string, Float64Array>();
  const text = new Map<string, (string | null)[]>();
  for (const column of columns) {
    if (NUMERIC_KINDS.has(column.kind)) {
      numeric.set(column.name, new Float64Array(rows.length));
    } else {
      text.set(column.name, new Array(rows.length).fill(null));
    }
  }

  columns.forEach((column, columnIndex) => {
    const values = numeric.get(column.name);
    const strings = text.get(column.name);
    rows.forEach((row, rowIndex) => {
      if (!Array.isArray(row) || row.length !== columns.length) {
        throw new BundleError(`row ${rowIndex} has ${(row as unknown[]).length ?? 0} cells, expected ${columns.length}`);
      }
      const raw = row[columnIndex];
      if (values) {
        values[rowIndex] = coerceNumeric(raw, column.name, rowIndex);
      } else if (strings) {
        strings[rowIndex] = raw === null ? null : String(raw);
      }
    });
  });

  const bundle: ResultBundle = {
    schemaVersion: version,
    configFingerprint: fingerprint,
    columns,
    rowCount: rows.length,
    numeric,
    text,
  };
  addDensityColumn(bundle);
  return bundle;
}

function addDensityColumn(bundle: ResultBundle): void {
  const capacity = bundle.numeric.get("capacity_bytes");
  const area = bundle.numeric.get("area_mm2");
  if (!capacity || !area) return;
  const density = new Float64Array(bundle.rowCount);
  for (let i = 0; i < bundle.rowCount; i++) {
    const c = capacity[i] ?? NaN;
    const a = area[i] ?? NaN;
    density[i] = a > 0 ? (c * 8) / a : NaN;
  }
  bundle.numeric.set(DENSITY_COLUMN, density);
  bundle.columns = [
    ...bundle.columns,
    { name: DENSITY_COLUMN, unit: "bit/mm^2", kind: "float" },
  ];
}

export async function loadBundle(url: string): Promise<ResultBundle> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new BundleError(`fetching ${url} failed: HTTP ${response.status}`);
  }
  return parseBundle(await response.json());
}
