import { describe, expect, it } from "vitest";

import { artifactX, interpolateX, xColumn } from "../src/layout.js";
import { parseTimeMode, yColumn } from "../src/transforms.js";
import { loadExpected, loadFixtureBundle } from "./helpers.js";

describe("layout agreement with the server renderer", () => {
  it("matches server dot positions within one device pixel on 20 views", async () => {
    const bundle = await loadFixtureBundle();
    const expected = loadExpected();
    expect(expected.views).toHaveLength(20);
    for (const view of expected.views) {
      const xs = xColumn(bundle, view.criterion);
      const ys = yColumn(bundle, parseTimeMode(view.time));
      for (let i = 0; i < bundle.nEvents; i++) {
        const cx = xs[i] * view.width;
        const cy = view.height - ys[i] * view.height;
        expect(Math.abs(cx - view.cx[i])).toBeLessThanOrEqual(1);
        expect(Math.abs(cy - view.cy[i])).toBeLessThanOrEqual(1);
      }
    }
  });

  it("y stays in the unit interval for every mode", async () => {
    const bundle = await loadFixtureBundle();
    for (const mode of ["absolute", "relstart", "relend", "relmedian", "normtime"] as const) {
      const ys = yColumn(bundle, mode);
      for (const y of ys) {
        expect(y).toBeGreaterThanOrEqual(0);
        expect(y).toBeLessThanOrEqual(1);
      }
    }
  });
});

describe("layout transitions", () => {
  it("endpoints match the source and target layouts exactly", async () => {
    const bundle = await loadFixtureBundle();
    const from = artifactX(bundle, "path");
    const to = artifactX(bundle, "last");
    expect(Array.from(interpolateX(from, to, 0))).toEqual(Array.from(from));
    expect(Array.from(interpolateX(from, to, 1))).toEqual(Array.from(to));
    // duration 0 means "switch instantly": progress clamps to the target
    expect(Array.from(interpolateX(from, to, 1.7))).toEqual(Array.from(to));
  });

  it("midpoint is the mean of the endpoints", async () => {
    const bundle = await loadFixtureBundle();
    const from = artifactX(bundle, "first");
    const to = artifactX(bundle, "events");
    const mid = interpolateX(from, to, 0.5);
    for (let i = 0; i < from.length; i++) {
      expect(mid[i]).toBeCloseTo((from[i] + to[i]) / 2, 12);
    }
  });

  it("ranks place artifacts at (rank + 0.5) / n", async () => {
    const bundle = await loadFixtureBundle();
    const perm = bundle.permutations.get("first")!;
    const xs = artifactX(bundle, "first");
    for (let rank = 0; rank < perm.length; rank++) {
      expect(xs[perm[rank]]).toBeCloseTo((rank + 0.5) / perm.length, 12);
    }
  });
});
