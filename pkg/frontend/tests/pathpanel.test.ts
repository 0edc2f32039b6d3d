import { describe, expect, it } from "vitest";

import { computePathLayout } from "../src/pathPanel.js";
import type { StepDetail } from "../src/types.js";

function step(index: number, distance: number, x0: number, w: number): StepDetail {
  return {
    index,
    distance_m: distance,
    zoom: 1,
    mosaic: { width: 180, height: 108 },
    points: [],
    masked: false,
    images: [],
    wall_window_m: { x0, y0: 0, w, h: w * 0.8 },
  };
}

describe("approach path layout", () => {
  it("is empty before the first step", () => {
    const layout = computePathLayout([], 280, 220);
    expect(layout.stations).toEqual([]);
  });

  it("places three approaching stations closer and closer to the wall line", () => {
    const steps = [step(0, 300, 0, 240), step(1, 60, 90, 48), step(2, 10, 110, 8)];
    const layout = computePathLayout(steps, 280, 220);
    expect(layout.stations).toHaveLength(3);
    const ys = layout.stations.map((s) => s.y);
    // wall is at the top; smaller distance means smaller y
    expect(ys[0]).toBeGreaterThan(ys[1]);
    expect(ys[1]).toBeGreaterThan(ys[2]);
    for (const s of layout.stations) {
      expect(s.y).toBeGreaterThan(layout.wallY);
    }
  });

  it("keeps every station inside the panel", () => {
    const steps = [step(0, 300, 0, 240), step(1, 60, 200, 48), step(2, 10, -30, 8)];
    const layout = computePathLayout(steps, 280, 220);
    for (const s of layout.stations) {
      expect(s.x).toBeGreaterThanOrEqual(0);
      expect(s.x).toBeLessThanOrEqual(280);
      expect(s.y).toBeLessThanOrEqual(220);
    }
  });

  it("tracks the lateral aim of each wall footprint", () => {
    // second footprint centered right of the first's center
    const steps = [step(0, 100, 0, 100), step(1, 50, 70, 20)];
    const layout = computePathLayout(steps, 280, 220);
    expect(layout.stations[1].x).toBeGreaterThan(layout.stations[0].x);
  });

  it("labels stations with their distance", () => {
    const layout = computePathLayout([step(0, 42.5, 0, 10)], 280, 220);
    expect(layout.stations[0].label).toBe("42.5 m");
  });
});
