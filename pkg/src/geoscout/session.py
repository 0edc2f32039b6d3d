"""Exploration session: step loop, target choices, persistence, evaluation.

A session walks a camera through a scenario's waypoint distances.  Each
step acquires a mosaic at the current station, runs the analysis chain
(masked by the previous station's low-interest memory when enabled),
grabs full-resolution chips at the ranked points, and persists all
products.  A choice (human or auto) then recenters the camera on one
point and approaches the next waypoint.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .camera import (
    CameraPose,
    MosaicProduct,
    SceneModel,
    acquire_chip,
    acquire_mosaic,
    approach,
    register_coarse_mask,
)
from .config import PipelineConfig
from .imgio import read_image, write_class_png, write_png, write_scaled_gray_png
from .interest import InterestPoint
from .pipeline import ImageAnalysis, analyze_image
from .raster import RasterImage

STATUS_READY = "ready"
STATUS_AWAITING = "awaiting-choice"
STATUS_FINISHED = "finished"


class SessionConflictError(RuntimeError):
    """Raised when an operation does not match the session's status."""

    code = "conflict"


@dataclass(frozen=True)
class Scenario:
    """Everything needed to replay an exploration run deterministically."""

    name: str
    scene_path: str
    wall_width_m: float
    aim_x_m: float
    aim_y_m: float
    waypoints_m: tuple[float, ...]
    zooms: tuple[float, ...]  # one zoom per waypoint
    base_hfov_deg: float
    pipeline: PipelineConfig

    def __post_init__(self):
        if len(self.zooms) != len(self.waypoints_m):
            raise ValueError("zooms must match waypoints_m in length")
        for a, b in zip(self.waypoints_m, self.waypoints_m[1:]):
            if b >= a:
                raise ValueError("waypoints_m must be strictly decreasing")
        if any(d <= 0 for d in self.waypoints_m):
            raise ValueError("waypoints_m must be positive")

    def initial_pose(self) -> CameraPose:
        if not self.waypoints_m:
            raise ValueError("scenario has no waypoints")
        return CameraPose(
            distance_m=self.waypoints_m[0],
            aim_x_m=self.aim_x_m,
            aim_y_m=self.aim_y_m,
            zoom=self.zooms[0],
            base_hfov_deg=self.base_hfov_deg,
        )


def scenario_from_dict(d: dict, base_dir: str | Path = ".") -> Scenario:
    """Build a Scenario from parsed JSON, resolving the scene path.

    Raises ValueError naming the offending field on malformed input.
    """

    def need(key, kind):
        if key not in d:
            raise ValueError(f"scenario field missing: {key}")
        v = d[key]
        if kind is float and isinstance(v, (int, float)) and not isinstance(v, bool):
            return float(v)
        if not isinstance(v, kind):
            raise ValueError(f"scenario field {key} has wrong type")
        return v

    name = need("name", str)
    scene = need("scene", str)
    wall_w = need("wall_width_m", float)
    aim = need("aim", list)
    if len(aim) != 2 or not all(isinstance(a, (int, float)) for a in aim):
        raise ValueError("scenario field aim must be [x_m, y_m]")
    waypoints = need("waypoints_m", list)
    if not all(isinstance(wp, (int, float)) for wp in waypoints):
        raise ValueError("scenario field waypoints_m must be numbers")
    zoom_raw = d.get("zoom", 1.0)
    if isinstance(zoom_raw, (int, float)) and not isinstance(zoom_raw, bool):
        zooms = tuple(float(zoom_raw) for _ in waypoints)
    elif isinstance(zoom_raw, list) and len(zoom_raw) == len(waypoints):
        zooms = tuple(float(z) for z in zoom_raw)
    else:
        raise ValueError("scenario field zoom must be a number or one number per waypoint")
    try:
        cfg = PipelineConfig.from_dict(d.get("pipeline", {}))
    except (TypeError, ValueError) as e:
        raise ValueError(f"scenario field pipeline invalid: {e}") from e
    scene_path = str((Path(base_dir) / scene).resolve()) if not Path(scene).is_absolute() else scene
    return Scenario(
        name=name,
        scene_path=scene_path,
        wall_width_m=wall_w,
        aim_x_m=float(aim[0]),
        aim_y_m=float(aim[1]),
        waypoints_m=tuple(float(wp) for wp in waypoints),
        zooms=zooms,
        base_hfov_deg=float(d.get("base_hfov_deg", 45.0)),
        pipeline=cfg,
    )


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        d = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"scenario file is not valid JSON: {e}") from e
    if not isinstance(d, dict):
        raise ValueError("scenario file must hold a JSON object")
    return scenario_from_dict(d, base_dir=p.parent)


@dataclass(frozen=True)
class StepRecord:
    """Immutable record of one completed analysis step."""

    index: int
    pose: CameraPose
    product: MosaicProduct
    analysis: ImageAnalysis
    chips: tuple[RasterImage, ...]
    config: PipelineConfig


@dataclass(frozen=True)
class SessionSnapshot:
    """Point-in-time view of a session, safe to read without locking."""

    status: str
    pose: CameraPose
    steps: tuple[StepRecord, ...]
    choices: tuple[dict, ...]
    waypoint_index: int
    waypoints_m: tuple[float, ...]


class Session:
    """Single-writer exploration session over one scenario.

    Mutations (run_step, select_target) are serialized by a lock; reads
    go through immutable snapshots swapped in atomically, so any number
    of concurrent readers see either the pre- or post-mutation state.
    """

    def __init__(self, scenario: Scenario, out_dir: str | Path | None = None,
                 scene: SceneModel | None = None):
        self.scenario = scenario
        self.scene = scene or SceneModel(
            raster=read_image(scenario.scene_path), wall_width_m=scenario.wall_width_m
        )
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self._mutex = threading.Lock()
        self._steps: list[StepRecord] = []
        self._choices: list[dict] = []
        self._manifest: dict[str, str] = {}
        self._wp_index = 0
        if scenario.waypoints_m:
            self._pose = scenario.initial_pose()
            self._status = STATUS_READY
        else:
            # nowhere to stand: the session is over before it starts
            self._pose = CameraPose(
                distance_m=1.0, aim_x_m=scenario.aim_x_m, aim_y_m=scenario.aim_y_m
            )
            self._status = STATUS_FINISHED
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        self._snapshot = self._build_snapshot()

    def _build_snapshot(self) -> SessionSnapshot:
        return SessionSnapshot(
            status=self._status,
            pose=self._pose,
            steps=tuple(self._steps),
            choices=tuple(self._choices),
            waypoint_index=self._wp_index,
            waypoints_m=self.scenario.waypoints_m,
        )

    def _publish(self):
        self._snapshot = self._build_snapshot()

    def snapshot(self) -> SessionSnapshot:
        return self._snapshot

    @property
    def status(self) -> str:
        return self._snapshot.status

    @property
    def manifest(self) -> dict[str, str]:
        return dict(self._manifest)

    def run_step(self) -> StepRecord:
        """Acquire, analyze, and persist one step at the current station."""
        with self._mutex:
            if self._status != STATUS_READY:
                raise SessionConflictError(f"run_step requires status ready, not {self._status}")
            cfg = self.scenario.pipeline
            product = acquire_mosaic(
                self.scene, self._pose, cfg.mosaic_rows, cfg.mosaic_cols, cfg.downsample_f
            )
            mask = None
            if cfg.m_thresh > 0 and self._steps:
                prev = self._steps[-1]
                mask = register_coarse_mask(
                    prev.product, prev.analysis.interest_raw, product, cfg.m_thresh
                )
            analysis = analyze_image(product.mosaic, cfg, mask)
            chips = tuple(
                acquire_chip(self.scene, self._pose, pt, product) for pt in analysis.points
            )
            record = StepRecord(
                index=len(self._steps),
                pose=self._pose,
                product=product,
                analysis=analysis,
                chips=chips,
                config=cfg,
            )
            if self.out_dir is not None:
                step_manifest = persist_step(record, self.out_dir)
                for name, digest in step_manifest.items():
                    self._manifest[f"steps/{record.index}/{name}"] = digest
                self._write_manifest()
            # persisted successfully; only now does the step become history
            self._steps.append(record)
            self._status = STATUS_AWAITING
            self._publish()
            return record

    def select_target(self, choice: int | str = "auto") -> CameraPose:
        """Commit a choice of interest point and approach the next waypoint."""
        with self._mutex:
            if self._status != STATUS_AWAITING:
                raise SessionConflictError(
                    f"select_target requires status awaiting-choice, not {self._status}"
                )
            rank = 1 if choice == "auto" else int(choice)
            step = self._steps[-1]
            if not 1 <= rank <= len(step.analysis.points):
                raise ValueError(f"rank must be in 1..{len(step.analysis.points)}")
            point = step.analysis.points[rank - 1]
            wall = step.product.pixel_to_wall(point.x, point.y)
            entry = {
                "step": step.index,
                "rank": rank,
                "timestamp": datetime.now(timezone.utc).isoformat(),
            }
            self._choices.append(entry)
            if self.out_dir is not None:
                with open(self.out_dir / "choices.jsonl", "a") as f:
                    f.write(json.dumps(entry) + "\n")
            self._wp_index += 1
            if self._wp_index < len(self.scenario.waypoints_m):
                pose = approach(self._pose, wall, self.scenario.waypoints_m[self._wp_index])
                self._pose = replace(pose, zoom=self.scenario.zooms[self._wp_index])
                self._status = STATUS_READY
            else:
                self._status = STATUS_FINISHED
            self._publish()
            return self._pose

    def _write_manifest(self):
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(self._manifest, indent=2, sort_keys=True) + "\n")


def run_scenario(
    scenario: Scenario,
    out_dir: str | Path | None = None,
    choices: list[int] | None = None,
    scene: SceneModel | None = None,
) -> Session:
    """Drive a session to completion, choosing rank 1 unless told otherwise."""
    session = Session(scenario, out_dir=out_dir, scene=scene)
    i = 0
    while session.status == STATUS_READY:
        session.run_step()
        if session.status != STATUS_AWAITING:
            break
        rank = choices[i] if choices is not None and i < len(choices) else 1
        session.select_target(rank)
        i += 1
    return session


def load_choices(path: str | Path) -> list[int]:
    """Read the ranks out of a choices.jsonl file, in order."""
    ranks = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            ranks.append(int(json.loads(line)["rank"]))
    return ranks


# --- persistence ---------------------------------------------------------

PLANE_NAMES = ("h", "s", "i")


def persist_products(
    step_dir: str | Path,
    index: int,
    mosaic: RasterImage,
    analysis: ImageAnalysis,
    chips: tuple[RasterImage, ...],
    config: PipelineConfig,
    extra_params: dict | None = None,
) -> dict[str, str]:
    """Write one analysis pass's products into a directory and hash them.

    Returns {filename: sha256} for everything written.  Scale factors
    for the grayscale renderings live in params.json.
    """
    step_dir = Path(step_dir)
    try:
        step_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create step directory {step_dir}: {e}") from e
    scales: dict[str, float] = {}
    write_png(step_dir / "mosaic.png", mosaic)
    for name, unc in zip(PLANE_NAMES, analysis.uncommons):
        # palette index = area rank, which is exactly the uncommonness weight
        write_class_png(step_dir / f"seg_{name}.png", unc.weights)
        scales[f"uncommon_{name}"] = write_scaled_gray_png(
            step_dir / f"uncommon_{name}.png", unc.weights
        )
    scales["interest_raw"] = write_scaled_gray_png(
        step_dir / "interest_raw.png", analysis.interest_raw.values
    )
    scales["interest_blur"] = write_scaled_gray_png(
        step_dir / "interest_blur.png", analysis.interest_blur.values
    )
    if analysis.mask is not None:
        write_png(step_dir / "mask.png", RasterImage(analysis.mask.astype(np.uint8) * 255))
    for chip, point in zip(chips, analysis.points):
        write_png(step_dir / f"chip_{point.rank}.png", chip)
    points = [{"x": p.x, "y": p.y, "score": p.score, "rank": p.rank} for p in analysis.points]
    (step_dir / "points.json").write_text(json.dumps(points, indent=2) + "\n")
    params = {
        "step": index,
        "config": config.to_dict(),
        "scales": scales,
        "masked": analysis.mask is not None,
    }
    params.update(extra_params or {})
    (step_dir / "params.json").write_text(json.dumps(params, indent=2, sort_keys=True) + "\n")
    manifest = {}
    for f in sorted(step_dir.iterdir()):
        manifest[f.name] = hashlib.sha256(f.read_bytes()).hexdigest()
    return manifest


def persist_step(step: StepRecord, root_dir: str | Path) -> dict[str, str]:
    """Write one session step under root/steps/<n>/; see persist_products."""
    pose = step.pose
    extra = {
        "pose": {
            "distance_m": pose.distance_m,
            "aim_x_m": pose.aim_x_m,
            "aim_y_m": pose.aim_y_m,
            "pan_deg": pose.pan_deg,
            "tilt_deg": pose.tilt_deg,
            "zoom": pose.zoom,
            "base_hfov_deg": pose.base_hfov_deg,
        },
        "grid": {
            "rows": step.product.grid.rows,
            "cols": step.product.grid.cols,
            "tile_w": step.product.grid.tile_w,
            "tile_h": step.product.grid.tile_h,
        },
        "wall_window_m": {
            "x0": step.product.wall_x0_m,
            "y0": step.product.wall_y0_m,
            "w": step.product.wall_w_m,
            "h": step.product.wall_h_m,
        },
    }
    return persist_products(
        Path(root_dir) / "steps" / str(step.index),
        step.index,
        step.product.mosaic,
        step.analysis,
        step.chips,
        step.config,
        extra,
    )


# --- evaluation against ground truth -------------------------------------


def label_regions(binary: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected component labeling of a boolean mask.

    Returns (labels, count) with labels 1..count assigned in scan order.
    Uses run-based union-find, so it stays fast on large masks.
    """
    h, w = binary.shape
    labels = np.zeros((h, w), np.int32)
    parent: list[int] = []

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    prev_runs: list[tuple[int, int, int]] = []
    for y in range(h):
        row = binary[y].astype(np.int8)
        edges = np.diff(np.concatenate(([0], row, [0])))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        runs = []
        for x0, x1 in zip(starts, ends):
            rid = -1
            for px0, px1, plbl in prev_runs:
                if px0 < x1 + 1 and x0 - 1 < px1:  # diagonal contact counts
                    root = find(plbl)
                    if rid == -1:
                        rid = root
                    elif root != rid:
                        parent[root] = find(rid)
            if rid == -1:
                rid = len(parent)
                parent.append(rid)
            labels[y, int(x0) : int(x1)] = rid + 1
            runs.append((int(x0), int(x1), rid))
        prev_runs = runs
    if not parent:
        return labels, 0
    remap = np.zeros(len(parent) + 1, np.int32)
    next_id = 0
    seen: dict[int, int] = {}
    for i in range(len(parent)):
        root = find(i)
        if root not in seen:
            next_id += 1
            seen[root] = next_id
        remap[i + 1] = seen[root]
    return remap[labels], next_id


@dataclass(frozen=True)
class GroundTruthMask:
    """Reference regions an expert marked as interesting, as a binary raster."""

    mask: np.ndarray  # bool
    labels: np.ndarray  # int32, 0 outside regions
    n_regions: int

    @classmethod
    def from_binary(cls, binary: np.ndarray) -> "GroundTruthMask":
        b = np.asarray(binary).astype(bool)
        labels, count = label_regions(b)
        b.setflags(write=False)
        labels.setflags(write=False)
        return cls(mask=b, labels=labels, n_regions=count)

    @classmethod
    def from_image(cls, img: RasterImage) -> "GroundTruthMask":
        gray = img.pixels.max(axis=2)
        return cls.from_binary(gray > 0)


@dataclass(frozen=True)
class AgreementReport:
    """Hit/miss accounting of system points against reference regions.

    Rates derive from the integer counts, so agreement_rate and
    false_positive_rate sum to 1 exactly in rational arithmetic.
    """

    n_points: int
    n_hits: int
    n_regions: int
    n_regions_hit: int
    detail: tuple[dict, ...] = field(default=(), repr=False)

    @property
    def agreement_rate(self) -> float:
        return self.n_hits / self.n_points

    @property
    def false_positive_rate(self) -> float:
        return (self.n_points - self.n_hits) / self.n_points

    @property
    def false_negative_rate(self) -> float:
        return (self.n_regions - self.n_regions_hit) / self.n_regions

    def to_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "n_hits": self.n_hits,
            "n_regions": self.n_regions,
            "n_regions_hit": self.n_regions_hit,
            "agreement_rate": self.agreement_rate,
            "false_positive_rate": self.false_positive_rate,
            "false_negative_rate": self.false_negative_rate,
            "detail": list(self.detail),
        }


def evaluate_agreement(
    points, truth: GroundTruthMask, tolerance_px: float = 10.0
) -> AgreementReport:
    """Score points against reference regions in a shared pixel frame.

    A point hits if any region pixel lies within tolerance_px of it; a
    region is found if any point hits it.  Inputs must be non-empty.
    """
    pts = [(p.x, p.y) if isinstance(p, InterestPoint) else (p[0], p[1]) for p in points]
    if not pts:
        raise ValueError("no points to evaluate")
    if truth.n_regions == 0:
        raise ValueError("ground truth mask has no regions")
    h, w = truth.labels.shape
    reach = int(math.ceil(tolerance_px))
    tol2 = tolerance_px * tolerance_px
    detail = []
    regions_hit: set[int] = set()
    n_hits = 0
    for px, py in pts:
        x0, x1 = max(0, int(px) - reach), min(w, int(px) + reach + 1)
        y0, y1 = max(0, int(py) - reach), min(h, int(py) + reach + 1)
        ids: list[int] = []
        if x1 > x0 and y1 > y0:
            window = truth.labels[y0:y1, x0:x1]
            yy, xx = np.indices(window.shape)
            d2 = (yy + y0 - py) ** 2 + (xx + x0 - px) ** 2
            near = (window > 0) & (d2 <= tol2)
            ids = sorted(int(v) for v in np.unique(window[near]))
        if ids:
            n_hits += 1
            regions_hit.update(ids)
        detail.append({"x": px, "y": py, "hit": bool(ids), "regions": ids})
    return AgreementReport(
        n_points=len(pts),
        n_hits=n_hits,
        n_regions=truth.n_regions,
        n_regions_hit=len(regions_hit),
        detail=tuple(detail),
    )


def points_to_scene_pixels(product: MosaicProduct, scene: SceneModel, points) -> list[tuple[float, float]]:
    """Project mosaic-frame points into scene-raster pixel coordinates."""
    out = []
    ppm = scene.pixels_per_meter
    for p in points:
        x, y = (p.x, p.y) if isinstance(p, InterestPoint) else (p[0], p[1])
        wx, wy = product.pixel_to_wall(x, y)
        out.append((wx * ppm - 0.5, wy * ppm - 0.5))
    return out
