import { execFileSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { parseBundle } from "../src/bundle";
import { ResultBundle } from "../src/types";

const here = dirname(fileURLToPath(import.meta.url));
export const REPO_ROOT = join(here, "..", "..");
export const GENERATED = join(here, "fixtures", "generated");

let cached: ResultBundle | null = null;

export function fixtureBundle(): ResultBundle {
  if (cached === null) {
    const text = readFileSync(join(GENERATED, "bundle.json"), "utf-8");
    cached = parseBundle(JSON.parse(text));
  }
  return cached;
}

/** Row count the Python CLI filter reports for a predicate (header excluded). */
export function cliFilterCount(expression: string): number {
  const stdout = execFileSync(
    "python3",
    ["-m", "envmx", "filter", join(GENERATED, "results.csv"), "--where", expression],
    { cwd: REPO_ROOT, encoding: "utf-8", maxBuffer: 64 * 1024 * 1024 }
  );
  return stdout.trim().split("\n").length - 1;
}

/** A tiny hand-built bundle for unit tests that do not need the fixture. */
export function miniBundleJson(rows: unknown[][]): unknown {
  return {
    schema_version: 1,
    config_fingerprint: "f".repeat(64),
    columns: [
      { name: "row_id", unit: "", kind: "int" },
      { name: "technology", unit: "", kind: "categorical" },
      { name: "polarity", unit: "", kind: "categorical" },
      { name: "capacity_bytes", unit: "B", kind: "int" },
      { name: "bits_per_cell", unit: "bit", kind: "int" },
      { name: "opt_target", unit: "", kind: "categorical" },
      { name: "read_latency_ns", unit: "ns", kind: "float" },
      { name: "area_mm2", unit: "mm^2", kind: "float" },
      { name: "read_bytes_per_s", unit: "B/s", kind: "float" },
      { name: "write_bytes_per_s", unit: "B/s", kind: "float" },
      { name: "utilization", unit: "s/s", kind: "float" },
      { name: "feasible", unit: "", kind: "bool" },
      { name: "total_power_mw", unit: "mW", kind: "float" },
      { name: "lifetime_s", unit: "s", kind: "float" },
      { name: "error", unit: "", kind: "string" },
    ],
    rows,
  };
}

export function miniRow(overrides: Partial<Record<string, unknown>> = {}): unknown[] {
  const base: Record<string, unknown> = {
    row_id: 0,
    technology: "STT",
    polarity: "optimistic",
    capacity_bytes: 2097152,
    bits_per_cell: 1,
    opt_target: "ReadEnergy",
    read_latency_ns: 5.0,
    area_mm2: 1.0,
    read_bytes_per_s: 1e9,
    write_bytes_per_s: 1e6,
    utilization: 0.5,
    feasible: 1,
    total_power_mw: 2.0,
    lifetime_s: 1e8,
    error: null,
  };
  Object.assign(base, overrides);
  return [
    base["row_id"], base["technology"], base["polarity"], base["capacity_bytes"],
    base["bits_per_cell"], base["opt_target"], base["read_latency_ns"], base["area_mm2"],
    base["read_bytes_per_s"], base["write_bytes_per_s"], base["utilization"],
    base["feasible"], base["total_power_mw"], base["lifetime_s"], base["error"],
  ];
}
