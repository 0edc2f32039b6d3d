/** Top-down approach-path layout: wall across the top, camera stations below. */

import type { StepDetail } from "./types.js";

export interface PathStation {
  x: number;
  y: number;
  label: string;
  distanceM: number;
}

export interface PathLayout {
  wallY: number;
  stations: PathStation[];
}

/**
 * Map visited stations into panel coordinates. Lateral position comes from the
 * center of each step's wall footprint, normalized to the first (widest) view;
 * depth is distance from the wall, so approaching stations climb toward the
 * wall line. Purely schematic, no attempt at true scale.
 */
export function computePathLayout(
  steps: StepDetail[],
  width: number,
  height: number,
  pad = 18,
): PathLayout {
  const wallY = pad;
  if (steps.length === 0) {
    return { wallY, stations: [] };
  }
  const first = steps[0].wall_window_m;
  const spanX0 = first.x0;
  const spanW = Math.max(first.w, 1e-9);
  const maxD = Math.max(...steps.map((s) => s.distance_m), 1e-9);
  const usableH = height - 2 * pad;
  const usableW = width - 2 * pad;

  const stations = steps.map((s) => {
    const cx = s.wall_window_m.x0 + s.wall_window_m.w / 2;
    let fx = (cx - spanX0) / spanW;
    fx = Math.min(1, Math.max(0, fx));
    return {
      x: pad + fx * usableW,
      y: wallY + (s.distance_m / maxD) * usableH,
      label: `${s.distance_m.toFixed(1)} m`,
      distanceM: s.distance_m,
    };
  });
  return { wallY, stations };
}
