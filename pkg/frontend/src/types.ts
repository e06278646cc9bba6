export type ColumnKind = "int" | "float" | "bool" | "categorical" | "string";

export interface ColumnSpec {
  name: string;
  unit: string;
  kind: ColumnKind;
}

/** Columnar view of a result bundle; numeric columns use NaN for absent. */
export interface ResultBundle {
  schemaVersion: number;
  configFingerprint: string;
  columns: ColumnSpec[];
  rowCount: number;
  numeric: Map<string, Float64Array>;
  text: Map<string, (string | null)[]>;
}

/** Data-space rectangle; edges touching a plot border become +-Infinity so a
 * whole-plot brush keeps every row, including sentinel-positioned ones. */
export interface Rect {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

export interface BrushSelection {
  x: string;
  y: string;
  rect: Rect;
}

export interface RangeFilter {
  min?: number;
  max?: number;
}

/** A row is visible iff it satisfies ALL active ranges, ALL active category
 * include-sets, and ALL active brushes (conjunction). */
export interface FilterState {
  ranges: Record<string, RangeFilter>;
  categories: Record<string, string[] | null>;
  brushes: Record<string, BrushSelection | null>;
}

export interface PlotSpec {
  id: string;
  title: string;
  x: string;
  y: string;
  logX: boolean;
  logY: boolean;
}

/** Derived client-side column: storage density in bits per mm^2. */
export const DENSITY_COLUMN = "density_bits_per_mm2";

export const DEFAULT_PLOTS: PlotSpec[] = [
  { id: "power-vs-read", title: "Total power vs read rate",
    x: "read_bytes_per_s", y: "total_power_mw", logX: true, logY: true },
  { id: "occupancy-vs-write", title: "Memory occupancy vs write rate",
    x: "write_bytes_per_s", y: "utilization", logX: true, logY: false },
  { id: "lifetime-vs-write", title: "Lifetime vs write rate",
    x: "write_bytes_per_s", y: "lifetime_s", logX: true, logY: true },
  { id: "read-energy-vs-latency", title: "Read energy vs read latency",
    x: "read_latency_ns", y: "read_energy_pj", logX: false, logY: false },
  { id: "density-vs-latency", title: "Storage density vs read latency",
    x: "read_latency_ns", y: DENSITY_COLUMN, logX: false, logY: false },
];
