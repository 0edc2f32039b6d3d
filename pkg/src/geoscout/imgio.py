"""Image file IO: PNG (via Pillow), binary PPM/PGM, and palette renderings."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

from .raster import RasterImage, round_half_up

# Display palette for segmentation classes 1..8, in descending-area order.
# Index 0 (unassigned pixels) renders black.
CLASS_PALETTE = (
    (0, 0, 0),  # class 0: unassigned
    (255, 0, 0),  # red
    (0, 0, 255),  # blue
    (128, 0, 128),  # purple
    (0, 255, 0),  # green
    (0, 255, 255),  # cyan
    (255, 255, 0),  # yellow
    (255, 255, 255),  # white
    (255, 165, 0),  # orange
)


def write_png(path: str | Path, img: RasterImage) -> None:
    arr = img.pixels[:, :, 0] if img.channels == 1 else img.pixels
    Image.fromarray(arr).save(path, format="PNG")


def read_png(path: str | Path) -> RasterImage:
    with Image.open(path) as im:
        if im.mode in ("L", "RGB"):
            arr = np.asarray(im)
        elif im.mode in ("LA", "I;16", "I"):
            arr = np.asarray(im.convert("L"))
        else:
            arr = np.asarray(im.convert("RGB"))
    return RasterImage(arr)


def write_pnm(path: str | Path, img: RasterImage) -> None:
    """Write a binary PGM (P5, 1 channel) or PPM (P6, 3 channels)."""
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
    Path(path).write_bytes(header + img.pixels.tobytes())


def read_pnm(path: str | Path) -> RasterImage:
    """Read a binary PGM/PPM, tolerating comment lines in the header."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P5", b"P6"):
        raise ValueError(f"unsupported PNM magic {data[:2]!r}")
    channels = 1 if data[:2] == b"P5" else 3
    pos = 2
    fields = []
    while len(fields) < 3:
        m = re.compile(rb"\s+(?:#[^\n]*\n\s*)*(\d+)").match(data, pos)
        if m is None:
            raise ValueError("truncated PNM header")
        fields.append(int(m.group(1)))
        pos = m.end()
    w, h, maxval = fields
    if maxval != 255:
        raise ValueError("only 8-bit PNM supported")
    pos += 1  # single whitespace byte after maxval
    need = w * h * channels
    raw = data[pos : pos + need]
    if len(raw) != need:
        raise ValueError("truncated PNM pixel data")
    return RasterImage(np.frombuffer(raw, np.uint8).reshape(h, w, channels))


def read_image(path: str | Path) -> RasterImage:
    p = Path(path)
    if p.suffix.lower() in (".ppm", ".pgm", ".pnm"):
        return read_pnm(p)
    return read_png(p)


def write_class_png(path: str | Path, classes: np.ndarray) -> None:
    """Render a class-id map (values 0..8) with the fixed display palette."""
    ids = np.asarray(classes)
    if ids.min() < 0 or ids.max() >= len(CLASS_PALETTE):
        raise ValueError("class ids out of palette range")
    lut = np.array(CLASS_PALETTE, np.uint8)
    write_png(path, RasterImage(lut[ids]))


def write_scaled_gray_png(path: str | Path, values: np.ndarray) -> float:
    """Write a float map as an 8-bit grayscale PNG scaled so max -> 255.

    Returns the scale factor applied (pixel = round(value * scale));
    an all-zero map gets scale 1.0.
    """
    v = np.asarray(values, np.float64)
    peak = float(v.max()) if v.size else 0.0
    scale = 255.0 / peak if peak > 0 else 1.0
    arr = np.clip(round_half_up(v * scale), 0, 255).astype(np.uint8)
    write_png(path, RasterImage(arr))
    return scale
