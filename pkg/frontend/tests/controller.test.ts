import { beforeEach, describe, expect, it } from "vitest";

import { ApiError, ExplorerApi } from "../src/api.js";
import { ExplorerController, NO_PENDING_CHOICE, type ControllerHooks } from "../src/controller.js";
import { computeMarkers } from "../src/markers.js";
import type { PointView, SessionView, StepDetail } from "../src/types.js";

const MOSAIC = { width: 180, height: 108 };

function points(): PointView[] {
  return [
    { x: 30, y: 40, score: 9.5, rank: 1, color: "green" },
    { x: 90, y: 40, score: 7.0, rank: 2, color: "blue" },
    { x: 150, y: 40, score: 5.5, rank: 3, color: "red" },
  ];
}

function detail(index: number): StepDetail {
  return {
    index,
    distance_m: [300, 60, 10][index] ?? 10,
    zoom: 1,
    mosaic: MOSAIC,
    points: points(),
    masked: index > 0,
    images: ["mosaic.png"],
    wall_window_m: { x0: 0, y0: 0, w: 108, h: 86.4 },
  };
}

function session(status: SessionView["status"], nSteps: number): SessionView {
  return {
    scenario: "fake",
    status,
    distance_m: 300,
    aim_m: [54, 43.2],
    zoom: 1,
    waypoint_index: nSteps,
    waypoints_m: [300, 60, 10],
    steps: Array.from({ length: nSteps }, (_, i) => detail(i)),
    choices: [],
  };
}

/**
 * Scripted stand-in for the HTTP client. Records every call; step and choice
 * behavior is driven by the small waypoint script above.
 */
class FakeApi extends ExplorerApi {
  calls: { method: string; rank?: number }[] = [];
  nSteps = 0;
  nChoices = 0;
  failNextGet = false;
  stepGate: Promise<void> | null = null;

  constructor() {
    super("fake://");
  }

  private awaiting(): boolean {
    return this.nSteps > this.nChoices;
  }

  private status(): SessionView["status"] {
    if (this.awaiting()) {
      return "awaiting-choice";
    }
    return this.nChoices >= 3 ? "finished" : "ready";
  }

  override async getSession(): Promise<SessionView> {
    this.calls.push({ method: "getSession" });
    if (this.failNextGet) {
      this.failNextGet = false;
      throw new ApiError("network", "service unreachable: connection refused", 0);
    }
    return session(this.status(), this.nSteps);
  }

  override async getStep(index: number): Promise<StepDetail> {
    this.calls.push({ method: "getStep" });
    return detail(index);
  }

  override async runStep(): Promise<StepDetail> {
    this.calls.push({ method: "runStep" });
    if (this.stepGate !== null) {
      await this.stepGate;
    }
    if (this.awaiting()) {
      throw new ApiError("conflict", "a choice is pending", 409);
    }
    if (this.nChoices >= 3) {
      throw new ApiError("conflict", "session is finished", 409);
    }
    const d = detail(this.nSteps);
    this.nSteps += 1;
    return d;
  }

  override async choose(rank: number): Promise<SessionView> {
    this.calls.push({ method: "choose", rank });
    if (!this.awaiting()) {
      throw new ApiError("conflict", "no step is awaiting a choice", 409);
    }
    this.nChoices += 1;
    return session(this.status(), this.nSteps);
  }

  chooseCalls(): number[] {
    return this.calls.filter((c) => c.method === "choose").map((c) => c.rank!);
  }

  countOf(method: string): number {
    return this.calls.filter((c) => c.method === method).length;
  }
}

class RecordingHooks implements ControllerHooks {
  sessions: SessionView[] = [];
  steps: StepDetail[] = [];
  errors: string[] = [];
  cleared = 0;
  busyLog: boolean[] = [];

  renderSession(view: SessionView): void {
    this.sessions.push(view);
  }
  renderStep(d: StepDetail): void {
    this.steps.push(d);
  }
  showError(message: string): void {
    this.errors.push(message);
  }
  clearError(): void {
    this.cleared += 1;
  }
  setBusy(busy: boolean): void {
    this.busyLog.push(busy);
  }
}

let api: FakeApi;
let hooks: RecordingHooks;
let controller: ExplorerController;

beforeEach(() => {
  api = new FakeApi();
  hooks = new RecordingHooks();
  controller = new ExplorerController(api, hooks);
});

describe("choosing a target", () => {
  it("sends exactly one choice request with the clicked rank", async () => {
    await controller.runStep();
    const markers = computeMarkers(points(), MOSAIC, 4);
    const rank = await controller.clickAt(markers, 90 * 4, 40 * 4);
    expect(rank).toBe(2);
    expect(api.chooseCalls()).toEqual([2]);
  });

  it("ignores clicks that miss every marker", async () => {
    await controller.runStep();
    const markers = computeMarkers(points(), MOSAIC, 4);
    const rank = await controller.clickAt(markers, 5, 5);
    expect(rank).toBeNull();
    expect(api.chooseCalls()).toEqual([]);
  });

  it("triggers the next step automatically after a successful choice", async () => {
    await controller.runStep();
    expect(api.countOf("runStep")).toBe(1);
    await controller.chooseRank(1);
    // choice accepted, session back to ready, next station acquired without another click
    expect(api.countOf("runStep")).toBe(2);
    expect(hooks.steps[hooks.steps.length - 1].index).toBe(1);
  });

  it("does not start another step once the session is finished", async () => {
    await controller.runStep();
    await controller.chooseRank(1);
    await controller.chooseRank(1);
    await controller.chooseRank(1);
    expect(api.countOf("runStep")).toBe(3);
    expect(controller.currentSession()?.status).toBe("finished");
  });
});

describe("busy discipline", () => {
  it("drops clicks while a step is running, without any request", async () => {
    let release: () => void = () => {};
    api.stepGate = new Promise((res) => {
      release = res;
    });
    const running = controller.runStep();
    expect(controller.isBusy()).toBe(true);

    const markers = computeMarkers(points(), MOSAIC, 4);
    const rank = await controller.clickAt(markers, 30 * 4, 40 * 4);
    expect(rank).toBeNull();
    expect(api.chooseCalls()).toEqual([]);

    release();
    await running;
    expect(controller.isBusy()).toBe(false);
  });

  it("drops a second step request while one is in flight", async () => {
    let release: () => void = () => {};
    api.stepGate = new Promise((res) => {
      release = res;
    });
    const first = controller.runStep();
    await controller.runStep(); // ignored
    release();
    await first;
    expect(api.countOf("runStep")).toBe(1);
  });
});

describe("error reporting", () => {
  it("shows the no-pending-choice notice on a choice conflict", async () => {
    await controller.chooseRank(1); // nothing pending yet
    expect(hooks.errors).toEqual([NO_PENDING_CHOICE]);
    expect(controller.isBusy()).toBe(false);
  });

  it("keeps the view usable after a fetch failure", async () => {
    api.failNextGet = true;
    await controller.refresh();
    expect(hooks.errors).toHaveLength(1);
    expect(hooks.errors[0]).toContain("unreachable");

    // next poll succeeds and renders normally
    await controller.refresh();
    expect(hooks.sessions).toHaveLength(1);
    expect(controller.currentSession()?.status).toBe("ready");
  });

  it("surfaces a step conflict without wedging the controller", async () => {
    await controller.runStep();
    await controller.runStep(); // server: choice pending
    expect(hooks.errors).toHaveLength(1);
    expect(controller.isBusy()).toBe(false);
    await controller.chooseRank(3); // still works
    expect(api.chooseCalls()).toEqual([3]);
  });
});

describe("polling after mutations", () => {
  it("refetches the session after a completed step", async () => {
    await controller.runStep();
    expect(api.countOf("getSession")).toBeGreaterThanOrEqual(1);
    const last = api.calls[api.calls.length - 1];
    expect(last.method).not.toBe("runStep");
  });

  it("renders the refreshed session after a choice", async () => {
    await controller.runStep();
    hooks.sessions = [];
    await controller.chooseRank(2);
    expect(hooks.sessions.length).toBeGreaterThanOrEqual(1);
  });
});

describe("a full scripted run", () => {
  it("walks three waypoints on clicks alone", async () => {
    await controller.runStep();
    const markers = computeMarkers(points(), MOSAIC, 4);
    await controller.clickAt(markers, 90 * 4, 40 * 4); // rank 2
    await controller.clickAt(markers, 30 * 4, 40 * 4); // rank 1
    await controller.clickAt(markers, 150 * 4, 40 * 4); // rank 3
    expect(api.chooseCalls()).toEqual([2, 1, 3]);
    expect(api.countOf("runStep")).toBe(3);
    expect(controller.currentSession()?.status).toBe("finished");
    expect(controller.stepDetails.map((d) => d.index)).toEqual([0, 1, 2]);
  });
});
