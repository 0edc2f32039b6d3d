"""Raster image primitives: 8-bit images, HSI color planes, mosaics, chips.

Everything in the pixel pipeline flows through :class:`RasterImage`, a
read-only row-major grid of 8-bit samples with 1 or 3 channels.  All
operations here are pure functions: equal inputs give bit-equal outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Native sub-image dimensions of the simulated camera.
SUB_WIDTH = 360
SUB_HEIGHT = 288


def round_half_up(x: np.ndarray | float) -> np.ndarray | float:
    """Round with .5 always going up, independent of banker's rounding."""
    return np.floor(x + 0.5)


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Planar 2D grid of 8-bit samples (1 or 3 channels).

    Pixels are stored as a read-only ``(height, width, channels)`` uint8
    array; a 2D array is accepted and treated as single-channel.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ValueError(f"expected (h, w) or (h, w, 1|3) samples, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError("samples must be integers in 0..255")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("samples out of 0..255 range")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def plane(self) -> np.ndarray:
        """2D view of a single-channel image."""
        if self.channels != 1:
            raise ValueError("plane view requires a single-channel image")
        return self.pixels[:, :, 0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return f"RasterImage({self.width}x{self.height}x{self.channels})"


@dataclass(frozen=True)
class HsiPlanes:
    """Hue/saturation/intensity decomposition, each plane quantized to 0..255."""

    h: RasterImage
    s: RasterImage
    i: RasterImage

    def __post_init__(self):
        dims = {(p.width, p.height, p.channels) for p in (self.h, self.s, self.i)}
        if len(dims) != 1 or next(iter(dims))[2] != 1:
            raise ValueError("H, S, I planes must be single-channel and share dimensions")

    @property
    def planes(self) -> tuple[RasterImage, RasterImage, RasterImage]:
        return (self.h, self.s, self.i)


@dataclass(frozen=True)
class MosaicGrid:
    """Grid geometry of a butted mosaic: rows x cols of tile_w x tile_h tiles."""

    rows: int
    cols: int
    tile_w: int
    tile_h: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must have at least one row and one column")
        if self.tile_w < 1 or self.tile_h < 1:
            raise ValueError("tiles must be at least 1x1")

    @property
    def mosaic_width(self) -> int:
        return self.cols * self.tile_w

    @property
    def mosaic_height(self) -> int:
        return self.rows * self.tile_h


def rgb_to_hsi(img: RasterImage) -> HsiPlanes:
    """Decompose an RGB image into quantized hue/saturation/intensity planes.

    Intensity is the rounded channel mean, saturation the classic
    min-over-intensity form (0 at zero intensity), and hue the hexagonal
    hue angle mapped from [0, 360) onto 0..255.  Achromatic pixels get
    hue 0 by convention.
    """
    if img.channels != 3:
        raise ValueError("rgb_to_hsi requires a 3-channel image")
    rgb = img.pixels.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    i_exact = (r + g + b) / 3.0
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    chroma = mx - mn

    safe_c = np.where(chroma == 0, 1.0, chroma)
    hue_r = np.mod((g - b) / safe_c, 6.0)
    hue_g = (b - r) / safe_c + 2.0
    hue_b = (r - g) / safe_c + 4.0
    hue6 = np.where(mx == r, hue_r, np.where(mx == g, hue_g, hue_b))
    hue_deg = np.where(chroma == 0, 0.0, hue6 * 60.0)
    h = round_half_up(hue_deg * (255.0 / 360.0))

    safe_i = np.where(i_exact == 0, 1.0, i_exact)
    s = np.where(i_exact == 0, 0.0, round_half_up(255.0 * (1.0 - mn / safe_i)))

    i = round_half_up(i_exact)
    as_plane = lambda a: RasterImage(np.clip(a, 0, 255).astype(np.uint8))
    return HsiPlanes(h=as_plane(h), s=as_plane(s), i=as_plane(i))


def downsample(img: RasterImage, fx: int, fy: int) -> RasterImage:
    """Block-average downsample by integer factors, rounding half up.

    Trailing rows/columns that do not fill a complete fx x fy block are
    discarded.
    """
    if fx < 1 or fy < 1:
        raise ValueError("downsample factors must be >= 1")
    out_w = img.width // fx
    out_h = img.height // fy
    if out_w < 1 or out_h < 1:
        raise ValueError("downsample factor exceeds image dimensions")
    a = img.pixels[: out_h * fy, : out_w * fx].astype(np.int64)
    sums = a.reshape(out_h, fy, out_w, fx, img.channels).sum(axis=(1, 3))
    n = fx * fy
    # exact round-half-up of sums/n in integer arithmetic
    vals = (2 * sums + n) // (2 * n)
    return RasterImage(vals.astype(np.uint8))


def assemble_mosaic(tiles, grid: MosaicGrid) -> RasterImage:
    """Butt tiles together on a grid with no overlap or blending.

    ``tiles`` is a rows x cols nested sequence; tile (r, c) lands at
    pixels [c*tile_w, (c+1)*tile_w) x [r*tile_h, (r+1)*tile_h).
    """
    if len(tiles) != grid.rows or any(len(row) != grid.cols for row in tiles):
        raise ValueError(f"expected {grid.rows}x{grid.cols} tiles")
    channels = tiles[0][0].channels
    out = np.zeros((grid.mosaic_height, grid.mosaic_width, channels), np.uint8)
    for r, row in enumerate(tiles):
        for c, tile in enumerate(row):
            if tile.width != grid.tile_w or tile.height != grid.tile_h:
                raise ValueError(
                    f"tile ({r},{c}) is {tile.width}x{tile.height}, "
                    f"expected {grid.tile_w}x{grid.tile_h}"
                )
            if tile.channels != channels:
                raise ValueError(f"tile ({r},{c}) channel count differs")
            out[
                r * grid.tile_h : (r + 1) * grid.tile_h,
                c * grid.tile_w : (c + 1) * grid.tile_w,
            ] = tile.pixels
    return RasterImage(out)


def crop_chip(img: RasterImage, center: tuple[int, int], w: int, h: int) -> tuple[RasterImage, int]:
    """Crop a w x h window centered at (x, y); the window may exceed borders.

    Out-of-bounds pixels are filled with 0.  Returns the chip and the
    count of pixels that fell inside the source image.
    """
    if w < 1 or h < 1:
        raise ValueError("chip dimensions must be >= 1")
    cx = int(round_half_up(float(center[0])))
    cy = int(round_half_up(float(center[1])))
    x0 = cx - w // 2
    y0 = cy - h // 2
    out = np.zeros((h, w, img.channels), np.uint8)
    sx0, sy0 = max(0, x0), max(0, y0)
    sx1, sy1 = min(img.width, x0 + w), min(img.height, y0 + h)
    valid = 0
    if sx1 > sx0 and sy1 > sy0:
        out[sy0 - y0 : sy1 - y0, sx0 - x0 : sx1 - x0] = img.pixels[sy0:sy1, sx0:sx1]
        valid = (sx1 - sx0) * (sy1 - sy0)
    return RasterImage(out), valid
