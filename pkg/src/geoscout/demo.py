"""Synthetic scene generators for demos and tests.

`python -m geoscout.demo <dir>` writes a cliff-like scene raster, its
reference anomaly mask, a ready-to-run three-waypoint scenario, and a
small wet-spot image pair for single-image analysis and scoring.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .imgio import write_png
from .raster import RasterImage, round_half_up

# Wet-spot analog: two dark ellipses (cx, cy, rx, ry) on a noisy tan wall.
WETSPOT_SIZE = (320, 240)
WETSPOT_WALL_RGB = (200, 180, 140)
WETSPOT_SPOT_RGB = (60, 55, 50)
WETSPOT_SPOTS = ((96, 120, 20, 12), (224, 120, 20, 12))
WETSPOT_NOISE_SIGMA = 5.0


def _paint_ellipses(canvas: np.ndarray, spots, rgb) -> np.ndarray:
    h, w = canvas.shape[:2]
    ys, xs = np.indices((h, w))
    for cx, cy, rx, ry in spots:
        inside = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
        canvas[inside] = rgb
    return canvas


def ellipse_mask(width: int, height: int, spots) -> np.ndarray:
    """Boolean mask of the given ellipses."""
    ys, xs = np.indices((height, width))
    mask = np.zeros((height, width), bool)
    for cx, cy, rx, ry in spots:
        mask |= ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
    return mask


def make_wetspot_image(
    seed: int = 0,
    size: tuple[int, int] = WETSPOT_SIZE,
    wall_rgb=WETSPOT_WALL_RGB,
    spot_rgb=WETSPOT_SPOT_RGB,
    spots=WETSPOT_SPOTS,
    noise_sigma: float = WETSPOT_NOISE_SIGMA,
) -> RasterImage:
    """A noisy tan wall with two small dark elliptical stains."""
    w, h = size
    base = np.empty((h, w, 3), np.float64)
    base[:] = wall_rgb
    _paint_ellipses(base, spots, spot_rgb)
    rng = np.random.default_rng(seed)
    base += rng.normal(0.0, noise_sigma, base.shape)
    return RasterImage(np.clip(round_half_up(base), 0, 255).astype(np.uint8))


# Demo cliff scene: strata bands plus a few colored anomalies.
DEMO_SIZE = (1600, 1280)
DEMO_WALL_WIDTH_M = 130.0
DEMO_ANOMALIES = (
    # (cx, cy, rx, ry, rgb)
    (520, 620, 38, 26, (70, 60, 48)),
    (1050, 700, 30, 40, (58, 76, 58)),
    (820, 420, 26, 20, (92, 90, 118)),
)


def make_demo_scene(seed: int = 7) -> tuple[RasterImage, np.ndarray]:
    """Banded tan cliff raster and the mask of its planted anomalies."""
    w, h = DEMO_SIZE
    ys = np.arange(h, dtype=np.float64)[:, None]
    band = 12.0 * np.sin(2.0 * np.pi * ys / 160.0)
    base = np.empty((h, w, 3), np.float64)
    base[..., 0] = 186.0 + band
    base[..., 1] = 168.0 + band
    base[..., 2] = 134.0 + 0.5 * band
    for cx, cy, rx, ry, rgb in DEMO_ANOMALIES:
        _paint_ellipses(base, ((cx, cy, rx, ry),), rgb)
    rng = np.random.default_rng(seed)
    base += rng.normal(0.0, 4.0, base.shape)
    scene = RasterImage(np.clip(round_half_up(base), 0, 255).astype(np.uint8))
    mask = ellipse_mask(w, h, [(cx, cy, rx, ry) for cx, cy, rx, ry, _ in DEMO_ANOMALIES])
    return scene, mask


def write_demo(out_dir: str | Path, seed: int = 7) -> dict:
    """Write scene.png, truth.png, and scenario.json into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scene, mask = make_demo_scene(seed)
    write_png(out / "scene.png", scene)
    write_png(out / "truth.png", RasterImage(mask.astype(np.uint8) * 255))
    scenario = {
        "name": "demo-cliff",
        "scene": "scene.png",
        "wall_width_m": DEMO_WALL_WIDTH_M,
        "aim": [65.0, 52.0],
        "zoom": 8.0,
        "waypoints_m": [300.0, 60.0, 10.0],
        # mask only pixels that were common in every plane at the prior station
        "pipeline": {"m_thresh": 1},
    }
    (out / "scenario.json").write_text(json.dumps(scenario, indent=2) + "\n")
    # single-image pair sized so the spots are detectable without a mosaic,
    # ready for `geoscout pipeline` + `geoscout evaluate`
    write_png(out / "wetspot.png", make_wetspot_image(seed=seed))
    w, h = WETSPOT_SIZE
    spot_mask = ellipse_mask(w, h, WETSPOT_SPOTS).astype(np.uint8) * 255
    write_png(out / "wetspot_truth.png", RasterImage(spot_mask))
    return {
        "scene": str(out / "scene.png"),
        "truth": str(out / "truth.png"),
        "scenario": str(out / "scenario.json"),
        "wetspot": str(out / "wetspot.png"),
        "wetspot_truth": str(out / "wetspot_truth.png"),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="generate the demo scene and scenario")
    parser.add_argument("out", help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    paths = write_demo(args.out, args.seed)
    print(json.dumps(paths, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
