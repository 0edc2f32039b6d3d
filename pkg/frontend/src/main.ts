/** DOM bootstrap. Everything testable lives in the imported modules. */

import { ExplorerApi } from "./api.js";
import { ExplorerController, type ControllerHooks } from "./controller.js";
import { computePathLayout } from "./pathPanel.js";
import type { SessionView, StepDetail } from "./types.js";
import { StepViewState, fitZoom } from "./view.js";

const api = new ExplorerApi("");

const statusLine = document.getElementById("status") as HTMLElement;
const errorBanner = document.getElementById("error-banner") as HTMLElement;
const stepButton = document.getElementById("run-step") as HTMLButtonElement;
const layerBar = document.getElementById("layer-bar") as HTMLElement;
const chipStrip = document.getElementById("chips") as HTMLElement;
const mosaicCanvas = document.getElementById("mosaic") as HTMLCanvasElement;
const pathCanvas = document.getElementById("path") as HTMLCanvasElement;

let viewState: StepViewState | null = null;
const imageCache = new Map<string, HTMLImageElement>();

async function loadImage(url: string): Promise<HTMLImageElement> {
  const cached = imageCache.get(url);
  if (cached !== undefined) {
    return cached;
  }
  const img = new Image();
  img.src = url;
  await img.decode();
  imageCache.set(url, img);
  return img;
}

async function paintStep(): Promise<void> {
  if (viewState === null) {
    return;
  }
  const vs = viewState;
  const detail = vs.detail;
  const { width, height } = vs.canvasSize();
  mosaicCanvas.width = width;
  mosaicCanvas.height = height;
  const ctx = mosaicCanvas.getContext("2d")!;
  ctx.imageSmoothingEnabled = false;

  const base = await loadImage(api.imageUrl(detail.index, "mosaic.png"));
  ctx.drawImage(base, 0, 0, width, height);

  const overlayName = vs.layerImage();
  if (overlayName !== null) {
    const layer = await loadImage(api.imageUrl(detail.index, overlayName));
    ctx.globalAlpha = 0.55;
    ctx.drawImage(layer, 0, 0, width, height);
    ctx.globalAlpha = 1.0;
  }

  for (const m of vs.markers()) {
    ctx.strokeStyle = m.css;
    ctx.lineWidth = 2;
    ctx.strokeRect(m.box.x, m.box.y, m.box.w, m.box.h);
    ctx.beginPath();
    ctx.arc(m.x, m.y, 5, 0, Math.PI * 2);
    ctx.fillStyle = m.css;
    ctx.fill();
    ctx.fillStyle = "#fff";
    ctx.font = "bold 11px sans-serif";
    ctx.fillText(String(m.rank), m.x + 7, m.y - 7);
  }
}

function paintLayerBar(): void {
  layerBar.textContent = "";
  if (viewState === null) {
    return;
  }
  const vs = viewState;
  for (const name of vs.layers()) {
    const btn = document.createElement("button");
    btn.textContent = name;
    btn.className = vs.activeLayer() === name ? "layer active" : "layer";
    btn.addEventListener("click", () => {
      vs.setLayer(name);
      paintLayerBar();
      void paintStep();
    });
    layerBar.appendChild(btn);
  }
}

function paintChips(detail: StepDetail): void {
  chipStrip.textContent = "";
  for (const name of new StepViewState(detail, 1).chipNames()) {
    const fig = document.createElement("figure");
    const img = document.createElement("img");
    img.src = api.imageUrl(detail.index, name);
    img.alt = name;
    const cap = document.createElement("figcaption");
    cap.textContent = name.replace(/chip_(\d)\.png/, "target $1");
    fig.appendChild(img);
    fig.appendChild(cap);
    chipStrip.appendChild(fig);
  }
}

function paintPath(): void {
  const details = controller.stepDetails;
  const w = pathCanvas.width;
  const h = pathCanvas.height;
  const ctx = pathCanvas.getContext("2d")!;
  ctx.clearRect(0, 0, w, h);

  const layout = computePathLayout(details, w, h);
  ctx.strokeStyle = "#607d8b";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(6, layout.wallY);
  ctx.lineTo(w - 6, layout.wallY);
  ctx.stroke();
  ctx.fillStyle = "#607d8b";
  ctx.font = "10px sans-serif";
  ctx.fillText("wall", 8, layout.wallY - 4);

  ctx.strokeStyle = "#ff8f00";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  layout.stations.forEach((s, i) => {
    if (i === 0) {
      ctx.moveTo(s.x, s.y);
    } else {
      ctx.lineTo(s.x, s.y);
    }
  });
  ctx.stroke();

  for (const s of layout.stations) {
    ctx.beginPath();
    ctx.arc(s.x, s.y, 4, 0, Math.PI * 2);
    ctx.fillStyle = "#ff8f00";
    ctx.fill();
    ctx.fillStyle = "#37474f";
    ctx.fillText(s.label, s.x + 7, s.y + 3);
  }
}

function describeSession(view: SessionView): string {
  const station = `station ${view.steps.length}/${view.waypoints_m.length}`;
  const pose = `${view.distance_m.toFixed(1)} m out, zoom ${view.zoom}`;
  return `${view.scenario}: ${view.status}, ${station}, ${pose}`;
}

const hooks: ControllerHooks = {
  renderSession(view) {
    statusLine.textContent = describeSession(view);
    stepButton.disabled = view.status !== "ready" || controller.isBusy();
    paintPath();
  },
  renderStep(detail) {
    viewState = new StepViewState(detail, fitZoom(detail, 1080, 640));
    paintLayerBar();
    paintChips(detail);
    void paintStep();
    paintPath();
  },
  showError(message) {
    errorBanner.textContent = message;
    errorBanner.classList.remove("hidden");
  },
  clearError() {
    errorBanner.textContent = "";
    errorBanner.classList.add("hidden");
  },
  setBusy(busy) {
    stepButton.disabled = busy || controller.currentSession()?.status !== "ready";
    mosaicCanvas.classList.toggle("busy", busy);
  },
};

const controller = new ExplorerController(api, hooks);

stepButton.addEventListener("click", () => {
  void controller.runStep();
});

mosaicCanvas.addEventListener("click", (ev) => {
  if (viewState === null) {
    return;
  }
  const rect = mosaicCanvas.getBoundingClientRect();
  const cx = ev.clientX - rect.left;
  const cy = ev.clientY - rect.top;
  void controller.clickAt(viewState.markers(), cx, cy);
});

// keep the status line fresh even if the server is driven from elsewhere
setInterval(() => {
  if (!controller.isBusy()) {
    void controller.refresh();
  }
}, 4000);

void controller.refresh();
