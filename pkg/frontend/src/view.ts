/** View state for one analyzed step: display zoom, overlay choice, marker layout. */

import { computeMarkers, type Marker } from "./markers.js";
import type { StepDetail } from "./types.js";

/** Preferred toggle order; only layers the step actually produced are offered. */
const LAYER_ORDER = [
  "seg_h",
  "seg_s",
  "seg_i",
  "uncommon_h",
  "uncommon_s",
  "uncommon_i",
  "interest_raw",
  "interest_blur",
  "mask",
];

export class StepViewState {
  private layer: string | null = null;

  constructor(
    readonly detail: StepDetail,
    readonly zoom: number,
  ) {}

  /** Overlay layers available for this step, in a stable order. */
  layers(): string[] {
    const have = new Set(this.detail.images.map((n) => n.replace(/\.png$/, "")));
    return LAYER_ORDER.filter((name) => have.has(name));
  }

  activeLayer(): string | null {
    return this.layer;
  }

  /** Toggle a layer on, or off when it is already active. */
  setLayer(name: string | null): void {
    this.layer = this.layer === name ? null : name;
  }

  /** Overlay image filename to composite over the mosaic, if any. */
  layerImage(): string | null {
    return this.layer === null ? null : `${this.layer}.png`;
  }

  /** Marker layout depends only on the points and the display zoom. */
  markers(): Marker[] {
    return computeMarkers(this.detail.points, this.detail.mosaic, this.zoom);
  }

  canvasSize(): { width: number; height: number } {
    return {
      width: this.detail.mosaic.width * this.zoom,
      height: this.detail.mosaic.height * this.zoom,
    };
  }

  chipNames(): string[] {
    return this.detail.images.filter((n) => n.startsWith("chip_")).sort();
  }
}

/** Pick a display zoom that fits the mosaic into the given budget, at least 1. */
export function fitZoom(detail: StepDetail, maxW: number, maxH: number): number {
  const z = Math.min(maxW / detail.mosaic.width, maxH / detail.mosaic.height);
  return Math.max(1, Math.floor(z));
}
