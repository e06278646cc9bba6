/** Dashboard release criteria against the generated 10k-row bundle:
 * slider/CLI visible-count parity, refined-config export validity, and
 * brush-then-clear restoration. */

import { execFileSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { refinedConfig } from "../src/exportConfig";
import { countVisible, emptyFilterState, visibleIndices, withBrush, withRange } from "../src/filters";
import { cliFilterCount, fixtureBundle, REPO_ROOT } from "./helpers";

// deterministic xorshift so the 10 thresholds are the same every run
function* thresholds(count: number, lo: number, hi: number): Generator<number> {
  let state = 0x9e3779b9;
  for (let i = 0; i < count; i++) {
    state ^= state << 13; state >>>= 0;
    state ^= state >> 17;
    state ^= state << 5; state >>>= 0;
    yield lo + (state / 0xffffffff) * (hi - lo);
  }
}

describe("dashboard acceptance", () => {
  it("power-slider visible counts equal cmd_filter for 10 random thresholds", () => {
    const bundle = fixtureBundle();
    expect(bundle.rowCount).toBeGreaterThanOrEqual(10_000);
    const power = bundle.numeric.get("total_power_mw")!;
    const finite = [...power].filter((v) => Number.isFinite(v));
    const lo = Math.min(...finite);
    const hi = Math.max(...finite);
    for (const threshold of thresholds(10, lo, hi)) {
      const state = withRange(emptyFilterState(), "total_power_mw", undefined, threshold);
      const dashboardCount = countVisible(bundle, state);
      const cliCount = cliFilterCount(`total_power_mw <= ${threshold}`);
      expect(dashboardCount).toBe(cliCount);
    }
  });

  it("export_refined_config output passes parse_config", () => {
    const bundle = fixtureBundle();
    const refined = refinedConfig(bundle, visibleIndices(bundle, emptyFilterState()));
    expect(refined).not.toBeNull();
    const dir = mkdtempSync(join(tmpdir(), "envmx-acc10-"));
    const path = join(dir, "refined.json");
    writeFileSync(path, JSON.stringify(refined!.config, null, 2));
    const stdout = execFileSync(
      "python3",
      ["-c",
       "import sys; from envmx.config import parse_config; parse_config(sys.argv[1]); print('parsed')",
       path],
      { cwd: REPO_ROOT, encoding: "utf-8" }
    );
    expect(stdout.trim()).toBe("parsed");
  });

  it("brush then clear restores the initial visible set", () => {
    const bundle = fixtureBundle();
    const initial = visibleIndices(bundle, emptyFilterState());
    let state = withBrush(emptyFilterState(), "lifetime-vs-write", {
      x: "write_bytes_per_s", y: "lifetime_s",
      rect: { x0: 1e6, x1: 1e7, y0: 1e6, y1: 1e9 },
    });
    expect(countVisible(bundle, state)).toBeLessThan(initial.length);
    state = withBrush(state, "lifetime-vs-write", null);
    expect(visibleIndices(bundle, state)).toEqual(initial);
  });
});
