"""Virtual pan/tilt/zoom camera viewing a planar scene from a distance.

The scene is a flat vertical wall textured by a high-resolution raster.
A pinhole camera at perpendicular distance D sees a wall window of width
2 * D * tan(hfov / 2) centered on the pan/tilt-displaced aim point, and
resamples it bilinearly to a fixed 360x288 sub-image.  Mosaics tile such
windows edge-to-edge; all geometry is exact, so mosaic pixels map to
wall coordinates and camera angles in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .interest import InterestMap, InterestPoint
from .raster import (
    SUB_HEIGHT,
    SUB_WIDTH,
    MosaicGrid,
    RasterImage,
    assemble_mosaic,
    downsample,
    round_half_up,
)

OFF_WALL_GRAY = 128
BASE_HFOV_DEG = 45.0


@dataclass(frozen=True)
class SceneModel:
    """A wall raster plus its physical width; height follows the aspect."""

    raster: RasterImage
    wall_width_m: float

    def __post_init__(self):
        if self.wall_width_m <= 0:
            raise ValueError("wall width must be positive")
        if self.raster.channels != 3:
            raise ValueError("scene raster must be RGB")

    @property
    def wall_height_m(self) -> float:
        return self.wall_width_m * self.raster.height / self.raster.width

    @property
    def pixels_per_meter(self) -> float:
        return self.raster.width / self.wall_width_m


@dataclass(frozen=True)
class CameraPose:
    """Camera station: distance to wall, aim point on it, pan/tilt/zoom.

    Wall coordinates are meters with origin at the wall's top-left
    corner, x rightward and y downward; positive tilt aims down (+y).
    """

    distance_m: float
    aim_x_m: float
    aim_y_m: float
    pan_deg: float = 0.0
    tilt_deg: float = 0.0
    zoom: float = 1.0
    base_hfov_deg: float = BASE_HFOV_DEG

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("distance must be positive")
        if self.zoom < 1:
            raise ValueError("zoom must be >= 1")
        if not 0 < self.base_hfov_deg < 180:
            raise ValueError("base hfov must be in (0, 180) degrees")

    @property
    def hfov_deg(self) -> float:
        return self.base_hfov_deg / self.zoom

    @property
    def window_width_m(self) -> float:
        """Wall width spanned by one sub-image at this pose."""
        return 2.0 * self.distance_m * math.tan(math.radians(self.hfov_deg) / 2.0)

    @property
    def window_height_m(self) -> float:
        return self.window_width_m * SUB_HEIGHT / SUB_WIDTH

    @property
    def window_center_m(self) -> tuple[float, float]:
        """Wall point the optical axis hits after pan/tilt deflection."""
        cx = self.aim_x_m + self.distance_m * math.tan(math.radians(self.pan_deg))
        cy = self.aim_y_m + self.distance_m * math.tan(math.radians(self.tilt_deg))
        return (cx, cy)


@dataclass(frozen=True)
class MosaicProduct:
    """A butted mosaic plus the exact geometry it was acquired with."""

    mosaic: RasterImage
    grid: MosaicGrid
    pose: CameraPose
    tile_angles: tuple  # rows x cols of (pan_deg, tilt_deg)
    wall_x0_m: float  # top-left corner of the mosaic's wall footprint
    wall_y0_m: float
    wall_w_m: float
    wall_h_m: float

    def pixel_to_wall(self, x: float, y: float) -> tuple[float, float]:
        """Wall coordinates of mosaic pixel center (x, y)."""
        wx = self.wall_x0_m + (x + 0.5) * self.wall_w_m / self.mosaic_width
        wy = self.wall_y0_m + (y + 0.5) * self.wall_h_m / self.mosaic_height
        return (wx, wy)

    def wall_to_pixel(self, wx: float, wy: float) -> tuple[float, float]:
        """Continuous mosaic pixel coordinates of a wall point."""
        x = (wx - self.wall_x0_m) * self.mosaic_width / self.wall_w_m - 0.5
        y = (wy - self.wall_y0_m) * self.mosaic_height / self.wall_h_m - 0.5
        return (x, y)

    @property
    def mosaic_width(self) -> int:
        return self.mosaic.width

    @property
    def mosaic_height(self) -> int:
        return self.mosaic.height


def acquire_subimage(scene: SceneModel, pose: CameraPose) -> tuple[RasterImage, float]:
    """Project the wall through a pinhole view and resample to 360x288.

    Returns the sub-image and the fraction of its pixels whose sample
    point fell off the wall (those render neutral gray).
    """
    cx, cy = pose.window_center_m
    win_w = pose.window_width_m
    win_h = pose.window_height_m
    xs = cx - win_w / 2.0 + (np.arange(SUB_WIDTH) + 0.5) * (win_w / SUB_WIDTH)
    ys = cy - win_h / 2.0 + (np.arange(SUB_HEIGHT) + 0.5) * (win_h / SUB_HEIGHT)
    wx = np.broadcast_to(xs[None, :], (SUB_HEIGHT, SUB_WIDTH))
    wy = np.broadcast_to(ys[:, None], (SUB_HEIGHT, SUB_WIDTH))
    on_wall = (
        (wx >= 0) & (wx <= scene.wall_width_m) & (wy >= 0) & (wy <= scene.wall_height_m)
    )
    ppm = scene.pixels_per_meter
    px = wx * ppm - 0.5
    py = wy * ppm - 0.5
    raster = scene.raster.pixels.astype(np.float64)
    h, w = raster.shape[:2]
    x0 = np.clip(np.floor(px).astype(np.int64), 0, w - 1)
    y0 = np.clip(np.floor(py).astype(np.int64), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(px - x0, 0.0, 1.0)[..., None]
    fy = np.clip(py - y0, 0.0, 1.0)[..., None]
    top = raster[y0, x0] * (1 - fx) + raster[y0, x1] * fx
    bot = raster[y1, x0] * (1 - fx) + raster[y1, x1] * fx
    sampled = top * (1 - fy) + bot * fy
    vals = np.clip(round_half_up(sampled), 0, 255).astype(np.uint8)
    vals[~on_wall] = OFF_WALL_GRAY
    off_fraction = float((~on_wall).sum()) / on_wall.size
    return RasterImage(vals), off_fraction


def acquire_mosaic(
    scene: SceneModel, pose: CameraPose, rows: int, cols: int, downsample_f: int = 8
) -> MosaicProduct:
    """Tile rows x cols sub-image windows edge-to-edge and butt them.

    Tiles step by exactly one window footprint on the wall (row-major,
    top-left first), each recorded with the pan/tilt angle whose optical
    axis hits that tile's center.  Each sub-image is downsampled by
    downsample_f before butting.
    """
    if rows < 1 or cols < 1:
        raise ValueError("mosaic grid must be at least 1x1")
    if downsample_f < 1:
        raise ValueError("downsample factor must be >= 1")
    win_w = pose.window_width_m
    win_h = pose.window_height_m
    cx0, cy0 = pose.window_center_m
    tiles = []
    angles = []
    for r in range(rows):
        row_tiles = []
        row_angles = []
        for c in range(cols):
            tcx = cx0 + (c - (cols - 1) / 2.0) * win_w
            tcy = cy0 + (r - (rows - 1) / 2.0) * win_h
            pan = math.degrees(math.atan((tcx - pose.aim_x_m) / pose.distance_m))
            tilt = math.degrees(math.atan((tcy - pose.aim_y_m) / pose.distance_m))
            sub, _ = acquire_subimage(scene, replace(pose, pan_deg=pan, tilt_deg=tilt))
            row_tiles.append(downsample(sub, downsample_f, downsample_f))
            row_angles.append((pan, tilt))
        tiles.append(row_tiles)
        angles.append(tuple(row_angles))
    grid = MosaicGrid(
        rows=rows, cols=cols, tile_w=SUB_WIDTH // downsample_f, tile_h=SUB_HEIGHT // downsample_f
    )
    return MosaicProduct(
        mosaic=assemble_mosaic(tiles, grid),
        grid=grid,
        pose=pose,
        tile_angles=tuple(angles),
        wall_x0_m=cx0 - cols * win_w / 2.0,
        wall_y0_m=cy0 - rows * win_h / 2.0,
        wall_w_m=cols * win_w,
        wall_h_m=rows * win_h,
    )


def pixel_to_pantilt(product: MosaicProduct, x: float, y: float) -> tuple[float, float]:
    """Pan/tilt angles that aim the optical axis at a mosaic pixel's wall point."""
    if not (0 <= x < product.mosaic_width and 0 <= y < product.mosaic_height):
        raise ValueError(f"pixel ({x}, {y}) outside mosaic bounds")
    wx, wy = product.pixel_to_wall(x, y)
    pose = product.pose
    pan = math.degrees(math.atan((wx - pose.aim_x_m) / pose.distance_m))
    tilt = math.degrees(math.atan((wy - pose.aim_y_m) / pose.distance_m))
    return (pan, tilt)


def acquire_chip(
    scene: SceneModel, pose: CameraPose, point: InterestPoint, product: MosaicProduct
) -> RasterImage:
    """Re-aim at an interest point and grab a full-resolution sub-image."""
    pan, tilt = pixel_to_pantilt(product, point.x, point.y)
    chip, _ = acquire_subimage(scene, replace(pose, pan_deg=pan, tilt_deg=tilt))
    return chip


def approach(pose: CameraPose, target_wall_m: tuple[float, float], new_distance_m: float) -> CameraPose:
    """Move to a closer station aimed squarely at a wall point.

    Pan and tilt reset to zero; zoom carries over.
    """
    if new_distance_m >= pose.distance_m:
        raise ValueError("approach must decrease the distance")
    return replace(
        pose,
        distance_m=new_distance_m,
        aim_x_m=float(target_wall_m[0]),
        aim_y_m=float(target_wall_m[1]),
        pan_deg=0.0,
        tilt_deg=0.0,
    )


def register_coarse_mask(
    coarse_product: MosaicProduct,
    coarse_interest: InterestMap,
    fine_product: MosaicProduct,
    m_thresh: int = 2,
) -> np.ndarray:
    """Mask fine-mosaic pixels judged low-interest at the coarser view.

    Each fine pixel projects to wall coordinates and back into the
    coarse mosaic; pixels landing on coarse summed-uncommonness
    <= 3 * m_thresh are masked (True).  m_thresh <= 0 disables masking,
    as do non-overlapping footprints (with a warning).
    """
    fh, fw = fine_product.mosaic_height, fine_product.mosaic_width
    mask = np.zeros((fh, fw), bool)
    if m_thresh <= 0:
        return mask
    if coarse_interest.values.shape != (coarse_product.mosaic_height, coarse_product.mosaic_width):
        raise ValueError("coarse interest map does not match the coarse mosaic")
    overlap_x = (
        fine_product.wall_x0_m < coarse_product.wall_x0_m + coarse_product.wall_w_m
        and coarse_product.wall_x0_m < fine_product.wall_x0_m + fine_product.wall_w_m
    )
    overlap_y = (
        fine_product.wall_y0_m < coarse_product.wall_y0_m + coarse_product.wall_h_m
        and coarse_product.wall_y0_m < fine_product.wall_y0_m + fine_product.wall_h_m
    )
    if not (overlap_x and overlap_y):
        warnings.warn("coarse and fine mosaics do not overlap; nothing masked", stacklevel=2)
        return mask
    ys, xs = np.indices((fh, fw))
    wx = fine_product.wall_x0_m + (xs + 0.5) * fine_product.wall_w_m / fw
    wy = fine_product.wall_y0_m + (ys + 0.5) * fine_product.wall_h_m / fh
    cw, ch = coarse_product.mosaic_width, coarse_product.mosaic_height
    cx = (wx - coarse_product.wall_x0_m) * cw / coarse_product.wall_w_m
    cy = (wy - coarse_product.wall_y0_m) * ch / coarse_product.wall_h_m
    inside = (cx >= 0) & (cx < cw) & (cy >= 0) & (cy < ch)
    ci = np.clip(cx.astype(np.int64), 0, cw - 1)
    cj = np.clip(cy.astype(np.int64), 0, ch - 1)
    low = coarse_interest.values[cj, ci] <= 3 * m_thresh
    mask[inside & low] = True
    return mask
