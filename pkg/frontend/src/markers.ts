/** Marker geometry and colors, kept free of DOM so it can be tested directly. */

import type { MosaicSize, PointView } from "./types.js";

/** rank 1 is the strongest candidate */
export const RANK_NAMES: Record<number, string> = { 1: "green", 2: "blue", 3: "red" };
export const FALLBACK_NAME = "gray";

const CSS: Record<string, string> = {
  green: "#00c853",
  blue: "#2962ff",
  red: "#d50000",
  gray: "#9e9e9e",
};

export function rankColorName(rank: number): string {
  return RANK_NAMES[rank] ?? FALLBACK_NAME;
}

export function rankCss(rank: number): string {
  return CSS[rankColorName(rank)];
}

export interface Marker {
  /** canvas position: mosaic pixel scaled by the display zoom, nothing else */
  x: number;
  y: number;
  rank: number;
  score: number;
  colorName: string;
  css: string;
  /** bounding box around the candidate, also in canvas pixels */
  box: { x: number; y: number; w: number; h: number };
}

/**
 * Box side in mosaic pixels. Sized from the mosaic so boxes stay readable on
 * both coarse (small) and fine (large) products.
 */
export function boxSide(mosaic: MosaicSize): number {
  return Math.max(9, Math.round(Math.min(mosaic.width, mosaic.height) / 6));
}

export function computeMarkers(points: PointView[], mosaic: MosaicSize, zoom: number): Marker[] {
  const side = boxSide(mosaic);
  return points.map((p) => ({
    x: p.x * zoom,
    y: p.y * zoom,
    rank: p.rank,
    score: p.score,
    colorName: rankColorName(p.rank),
    css: rankCss(p.rank),
    box: {
      x: (p.x - side / 2) * zoom,
      y: (p.y - side / 2) * zoom,
      w: side * zoom,
      h: side * zoom,
    },
  }));
}

/** Screen-space pick radius; independent of zoom so markers stay clickable when coarse. */
export const HIT_RADIUS_PX = 12;

/** Nearest marker within the pick radius of a canvas click, or null. */
export function hitTest(markers: Marker[], cx: number, cy: number): Marker | null {
  let best: Marker | null = null;
  let bestD = Infinity;
  for (const m of markers) {
    const d = Math.hypot(m.x - cx, m.y - cy);
    if (d <= HIT_RADIUS_PX && d < bestD) {
      best = m;
      bestD = d;
    }
  }
  return best;
}
