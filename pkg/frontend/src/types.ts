/** JSON shapes served by the exploration service. Field names match the wire format. */

export interface PointView {
  x: number;
  y: number;
  score: number;
  rank: number;
  color: string;
}

export interface MosaicSize {
  width: number;
  height: number;
}

export interface StepSummary {
  index: number;
  distance_m: number;
  zoom: number;
  mosaic: MosaicSize;
  points: PointView[];
  masked: boolean;
}

export interface WallWindow {
  x0: number;
  y0: number;
  w: number;
  h: number;
}

export interface StepDetail extends StepSummary {
  /** png filenames available under /api/steps/<n>/image/<name> */
  images: string[];
  wall_window_m: WallWindow;
}

export type SessionStatus = "ready" | "awaiting-choice" | "finished";

export interface ChoiceView {
  step: number;
  rank: number;
  timestamp: string;
}

export interface SessionView {
  scenario: string;
  status: SessionStatus;
  distance_m: number;
  aim_m: [number, number];
  zoom: number;
  waypoint_index: number;
  waypoints_m: number[];
  steps: StepSummary[];
  choices: ChoiceView[];
}

export interface ErrorBody {
  error: { code: string; message: string };
}
