import { describe, expect, it } from "vitest";

import { BundleError, parseBundle } from "../src/bundle";
import { DENSITY_COLUMN } from "../src/types";
import { fixtureBundle, miniBundleJson, miniRow } from "./helpers";

describe("parseBundle", () => {
  it("loads the generated 10k fixture", () => {
    const bundle = fixtureBundle();
    expect(bundle.rowCount).toBe(8 * 2 * 2 * 18 * 18);
    expect(bundle.schemaVersion).toBe(1);
    expect(bundle.numeric.has("total_power_mw")).toBe(true);
    expect(bundle.text.get("technology")).toContain("FeFET");
  });

  it("accepts an empty bundle", () => {
    const bundle = parseBundle(miniBundleJson([]));
    expect(bundle.rowCount).toBe(0);
  });

  it("rejects unknown schema versions", () => {
    const data = miniBundleJson([]) as Record<string, unknown>;
    data["schema_version"] = 99;
    expect(() => parseBundle(data)).toThrow(BundleError);
  });

  it("rejects rows with inconsistent column counts", () => {
    const data = miniBundleJson([[1, 2, 3]]);
    expect(() => parseBundle(data)).toThrow(/expected 15/);
  });

  it("maps inf strings to Infinity", () => {
    const bundle = parseBundle(miniBundleJson([miniRow({ lifetime_s: "inf" })]));
    expect(bundle.numeric.get("lifetime_s")?.[0]).toBe(Infinity);
  });

  it("maps null numerics to NaN and keeps strings", () => {
    const bundle = parseBundle(
      miniBundleJson([miniRow({ total_power_mw: null, error: "boom" })])
    );
    expect(Number.isNaN(bundle.numeric.get("total_power_mw")?.[0])).toBe(true);
    expect(bundle.text.get("error")?.[0]).toBe("boom");
  });

  it("derives the storage-density column", () => {
    const bundle = parseBundle(
      miniBundleJson([miniRow({ capacity_bytes: 1000, area_mm2: 2.0 })])
    );
    expect(bundle.numeric.get(DENSITY_COLUMN)?.[0]).toBe(4000);
    expect(bundle.columns.some((c) => c.name === DENSITY_COLUMN)).toBe(true);
  });

  it("never mutates the input rows", () => {
    const rows = [miniRow()];
    const copy = JSON.parse(JSON.stringify(rows));
    parseBundle(miniBundleJson(rows));
    expect(rows).toEqual(copy);
  });
});
