/**
 * Client-side session driver. Owns the polling and mutation discipline so the
 * DOM layer stays a dumb painter:
 *
 *   - at most one mutation (step or choice) in flight, clicks meanwhile are
 *     dropped without issuing a request
 *   - every mutation is followed by a session refetch
 *   - a successful choice immediately triggers the next step while the
 *     session still has waypoints
 *
 * All analysis happens server-side; this class only moves JSON around.
 */

import { ApiError, type ExplorerApi } from "./api.js";
import { hitTest, type Marker } from "./markers.js";
import type { SessionView, StepDetail } from "./types.js";

export interface ControllerHooks {
  renderSession(view: SessionView): void;
  renderStep(detail: StepDetail): void;
  showError(message: string): void;
  clearError(): void;
  setBusy(busy: boolean): void;
}

export const NO_PENDING_CHOICE = "no pending choice";

export class ExplorerController {
  private busy = false;
  private session: SessionView | null = null;
  readonly stepDetails: StepDetail[] = [];

  constructor(
    private readonly api: ExplorerApi,
    private readonly hooks: ControllerHooks,
  ) {}

  isBusy(): boolean {
    return this.busy;
  }

  currentSession(): SessionView | null {
    return this.session;
  }

  lastStep(): StepDetail | null {
    return this.stepDetails.length > 0 ? this.stepDetails[this.stepDetails.length - 1] : null;
  }

  /** Fetch the session and any step details we have not seen yet. */
  async refresh(): Promise<void> {
    try {
      const view = await this.api.getSession();
      this.session = view;
      for (let i = this.stepDetails.length; i < view.steps.length; i++) {
        this.stepDetails.push(await this.api.getStep(i));
      }
      this.hooks.clearError();
      this.hooks.renderSession(view);
      const last = this.lastStep();
      if (last !== null) {
        this.hooks.renderStep(last);
      }
    } catch (err) {
      this.hooks.showError(describe(err));
    }
  }

  /** Acquire and analyze the next station. No-op while another mutation runs. */
  async runStep(): Promise<void> {
    if (this.busy) {
      return;
    }
    this.setBusy(true);
    try {
      const detail = await this.api.runStep();
      this.stepDetails.push(detail);
      this.hooks.clearError();
      this.hooks.renderStep(detail);
    } catch (err) {
      this.hooks.showError(describe(err));
      return;
    } finally {
      this.setBusy(false);
    }
    await this.refresh();
  }

  /**
   * Commit the target with the given rank. Exactly one POST per accepted call;
   * calls during a running mutation never reach the network.
   */
  async chooseRank(rank: number): Promise<void> {
    if (this.busy) {
      return;
    }
    this.setBusy(true);
    let view: SessionView;
    try {
      view = await this.api.choose(rank);
    } catch (err) {
      if (err instanceof ApiError && err.code === "conflict") {
        this.hooks.showError(NO_PENDING_CHOICE);
      } else {
        this.hooks.showError(describe(err));
      }
      return;
    } finally {
      this.setBusy(false);
    }
    this.session = view;
    this.hooks.clearError();
    this.hooks.renderSession(view);
    if (view.status === "ready") {
      await this.runStep();
    }
  }

  /**
   * Canvas click: map to the nearest marker and choose it. Returns the rank
   * that was submitted, or null when the click hit nothing or was ignored.
   */
  async clickAt(markers: Marker[], cx: number, cy: number): Promise<number | null> {
    if (this.busy) {
      return null;
    }
    const hit = hitTest(markers, cx, cy);
    if (hit === null) {
      return null;
    }
    await this.chooseRank(hit.rank);
    return hit.rank;
  }

  private setBusy(busy: boolean): void {
    this.busy = busy;
    this.hooks.setBusy(busy);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.message;
  }
  return String(err);
}
