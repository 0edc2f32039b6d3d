import { describe, expect, it } from "vitest";

import {
  HIT_RADIUS_PX,
  boxSide,
  computeMarkers,
  hitTest,
  rankColorName,
  rankCss,
} from "../src/markers.js";
import type { PointView } from "../src/types.js";

const MOSAIC = { width: 180, height: 108 };

function point(x: number, y: number, rank: number): PointView {
  return { x, y, score: 10 - rank, rank, color: rankColorName(rank) };
}

describe("rank colors", () => {
  it("maps ranks 1..3 to green, blue, red", () => {
    expect(rankColorName(1)).toBe("green");
    expect(rankColorName(2)).toBe("blue");
    expect(rankColorName(3)).toBe("red");
  });

  it("falls back to gray beyond rank 3", () => {
    expect(rankColorName(4)).toBe("gray");
    expect(rankColorName(99)).toBe("gray");
  });

  it("matches what the service reports for each point", () => {
    const pts = [point(10, 10, 1), point(50, 20, 2), point(90, 30, 3)];
    const markers = computeMarkers(pts, MOSAIC, 2);
    markers.forEach((m, i) => {
      expect(m.colorName).toBe(pts[i].color);
      expect(m.css).toBe(rankCss(pts[i].rank));
    });
  });

  it("keeps the server point order, green then blue then red", () => {
    const markers = computeMarkers(
      [point(10, 10, 1), point(50, 20, 2), point(90, 30, 3)],
      MOSAIC,
      1,
    );
    expect(markers.map((m) => m.colorName)).toEqual(["green", "blue", "red"]);
  });
});

describe("marker positions", () => {
  it("equal the reported pixel times the display zoom, exactly", () => {
    const pts = [point(13, 97, 1), point(0, 0, 2), point(179, 107, 3)];
    for (const zoom of [1, 2, 3, 4, 7]) {
      const markers = computeMarkers(pts, MOSAIC, zoom);
      markers.forEach((m, i) => {
        expect(m.x).toBe(pts[i].x * zoom);
        expect(m.y).toBe(pts[i].y * zoom);
      });
    }
  });

  it("holds for fractional zooms too", () => {
    const markers = computeMarkers([point(41, 33, 1)], MOSAIC, 2.5);
    expect(markers[0].x).toBe(102.5);
    expect(markers[0].y).toBe(82.5);
  });

  it("centers the bounding box on the marker", () => {
    const zoom = 3;
    const [m] = computeMarkers([point(60, 40, 1)], MOSAIC, zoom);
    expect(m.box.x + m.box.w / 2).toBeCloseTo(m.x, 10);
    expect(m.box.y + m.box.h / 2).toBeCloseTo(m.y, 10);
    expect(m.box.w).toBe(boxSide(MOSAIC) * zoom);
  });
});

describe("hitTest", () => {
  const markers = computeMarkers([point(10, 10, 1), point(14, 10, 2)], MOSAIC, 4);

  it("returns the marker under an exact click", () => {
    const hit = hitTest(markers, 40, 40);
    expect(hit?.rank).toBe(1);
  });

  it("accepts clicks within the pick radius", () => {
    const hit = hitTest(markers, 40 + HIT_RADIUS_PX - 1, 40);
    expect(hit).not.toBeNull();
  });

  it("returns null away from all markers", () => {
    expect(hitTest(markers, 500, 500)).toBeNull();
  });

  it("prefers the nearest of two overlapping markers", () => {
    // scaled positions are x=40 and x=56; 47 is closer to rank 1, 50 to rank 2
    expect(hitTest(markers, 47, 40)?.rank).toBe(1);
    expect(hitTest(markers, 50, 40)?.rank).toBe(2);
  });
});
