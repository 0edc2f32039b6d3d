/**
 * End-to-end check against the real Python service: a browser-style run driven
 * through the controller must leave artifacts byte-identical to a headless
 * replay of the same choice log.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ExplorerApi } from "../src/api.js";
import { ExplorerController, type ControllerHooks } from "../src/controller.js";
import { computeMarkers } from "../src/markers.js";

const execFileP = promisify(execFile);
const PY = "python3";

let work: string;
let server: ChildProcess | null = null;
let base = "";

class QuietHooks implements ControllerHooks {
  errors: string[] = [];
  renderSession(): void {}
  renderStep(): void {}
  showError(message: string): void {
    this.errors.push(message);
  }
  clearError(): void {}
  setBusy(): void {}
}

async function waitForServer(url: string, tries = 50): Promise<void> {
  for (let i = 0; i < tries; i++) {
    try {
      const resp = await fetch(url + "/api/session");
      if (resp.ok) {
        await resp.json();
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((res) => setTimeout(res, 200));
  }
  throw new Error(`service at ${url} never came up`);
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "explorer-ui-"));
  await execFileP(PY, ["-m", "geoscout.demo", join(work, "demo")]);

  server = spawn(
    PY,
    [
      "-m",
      "geoscout.cli",
      "serve",
      join(work, "demo", "scenario.json"),
      "--out",
      join(work, "ui_run"),
      "--bind",
      "127.0.0.1:0",
    ],
    { env: { ...process.env, PYTHONUNBUFFERED: "1" }, stdio: ["ignore", "pipe", "pipe"] },
  );

  base = await new Promise<string>((resolve, reject) => {
    let seen = "";
    const timer = setTimeout(() => reject(new Error(`no startup line in: ${seen}`)), 15000);
    server!.stdout!.on("data", (chunk: Buffer) => {
      seen += chunk.toString();
      const m = seen.match(/http:\/\/([\d.]+):(\d+)\//);
      if (m) {
        clearTimeout(timer);
        resolve(`http://${m[1]}:${m[2]}`);
      }
    });
    server!.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (${code}): ${seen}`));
    });
  });
  await waitForServer(base);
}, 90000);

afterAll(() => {
  if (server !== null) {
    server.kill("SIGTERM");
  }
  rmSync(work, { recursive: true, force: true });
});

describe("browser-driven run vs headless replay", () => {
  it("clicking through every waypoint leaves replayable artifacts", async () => {
    const api = new ExplorerApi(base);
    const hooks = new QuietHooks();
    const controller = new ExplorerController(api, hooks);

    await controller.refresh();
    expect(controller.currentSession()?.status).toBe("ready");
    expect(controller.currentSession()?.waypoints_m).toEqual([300, 60, 10]);

    await controller.runStep();
    const zoom = 3;
    for (const rank of [2, 1, 3]) {
      const detail = controller.lastStep();
      expect(detail).not.toBeNull();
      const markers = computeMarkers(detail!.points, detail!.mosaic, zoom);
      const target = detail!.points.find((p) => p.rank === rank)!;
      const clicked = await controller.clickAt(markers, target.x * zoom, target.y * zoom);
      expect(clicked).toBe(rank);
    }

    expect(hooks.errors).toEqual([]);
    expect(controller.currentSession()?.status).toBe("finished");
    expect(controller.stepDetails.map((d) => d.index)).toEqual([0, 1, 2]);
    const distances = controller.stepDetails.map((d) => d.distance_m);
    expect(distances).toEqual([300, 60, 10]);

    // the recorded choices are exactly the clicks, in order
    const choiceLog = readFileSync(join(work, "ui_run", "choices.jsonl"), "utf8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line) as { step: number; rank: number });
    expect(choiceLog.map((c) => c.rank)).toEqual([2, 1, 3]);
    expect(choiceLog.map((c) => c.step)).toEqual([0, 1, 2]);

    // headless replay of the same log reproduces every artifact bit for bit
    await execFileP(PY, [
      "-m",
      "geoscout.cli",
      "simulate",
      join(work, "demo", "scenario.json"),
      "--choices",
      join(work, "ui_run", "choices.jsonl"),
      "--out",
      join(work, "replay"),
    ]);

    const uiManifest = readFileSync(join(work, "ui_run", "manifest.json"), "utf8");
    const replayManifest = readFileSync(join(work, "replay", "manifest.json"), "utf8");
    expect(uiManifest).toBe(replayManifest);

    const hashes = JSON.parse(uiManifest) as Record<string, string>;
    expect(Object.keys(hashes).length).toBeGreaterThanOrEqual(42);

    for (const name of ["steps/0/points.json", "steps/2/mosaic.png", "steps/1/params.json"]) {
      const a = readFileSync(join(work, "ui_run", name));
      const b = readFileSync(join(work, "replay", name));
      expect(a.equals(b)).toBe(true);
    }
  }, 120000);

  it("rejects a choice when none is pending, with the documented code", async () => {
    const api = new ExplorerApi(base);
    const hooks = new QuietHooks();
    const controller = new ExplorerController(api, hooks);
    await controller.chooseRank(1); // session is finished by now
    expect(hooks.errors).toEqual(["no pending choice"]);
  }, 30000);
});
