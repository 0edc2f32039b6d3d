"""Uncommonness weighting, interest-map fusion, blurring, and peak picking.

Segmentation classes are weighted inversely to their pixel area (small
class = uncommon = interesting).  The three per-plane uncommon maps sum
into one interest map, which is Gaussian-blurred before the top-k peaks
are extracted as ranked interest points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .segmentation import SegmentationMap, class_areas

BLUR_SIGMA = 10.0
TOP_K = 3

# Marker colors for ranks 1..3, best first.
RANK_COLOR_NAMES = ("green", "blue", "red")


@dataclass(frozen=True)
class UncommonMap:
    """Per-pixel uncommonness weights 0..8; 0 marks unsegmented pixels."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, np.uint8)
        if w.ndim != 2:
            raise ValueError("weights must be a 2D array")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    @property
    def width(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class InterestMap:
    """Non-negative per-pixel interest values (float; integers pre-blur)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, np.float64)
        if v.ndim != 2:
            raise ValueError("values must be a 2D array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class InterestPoint:
    """A ranked peak of the blurred interest map, in mosaic pixel coords."""

    x: int
    y: int
    score: float
    rank: int

    @property
    def rank_color(self) -> str:
        if 1 <= self.rank <= len(RANK_COLOR_NAMES):
            return RANK_COLOR_NAMES[self.rank - 1]
        return "gray"


def uncommon_map(seg: SegmentationMap) -> UncommonMap:
    """Weight each class inversely to its area: largest class 1, smallest K.

    Area ties give the lower class id the lower (more common) weight.
    Unsegmented pixels keep weight 0.
    """
    stats = [s for s in class_areas(seg) if s.id >= 1]
    stats.sort(key=lambda s: (-s.pixel_count, s.id))
    lut = np.zeros(seg.n_classes + 1, np.uint8)
    for rank0, s in enumerate(stats):
        lut[s.id] = rank0 + 1
    return UncommonMap(weights=lut[seg.labels])


def fuse_interest(u_h: UncommonMap, u_s: UncommonMap, u_i: UncommonMap) -> InterestMap:
    """Pointwise unweighted sum of the three per-plane uncommon maps."""
    shapes = {u.weights.shape for u in (u_h, u_s, u_i)}
    if len(shapes) != 1:
        raise ValueError("uncommon maps must share dimensions")
    total = (
        u_h.weights.astype(np.int64) + u_s.weights.astype(np.int64) + u_i.weights.astype(np.int64)
    )
    return InterestMap(values=total.astype(np.float64))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1D Gaussian kernel with radius ceil(3*sigma), normalized to sum 1."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return k / k.sum()


def _convolve_axis(a: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    # symmetric (edge-repeating) reflection keeps total mass unchanged
    padded = np.pad(a, pad, mode="symmetric")
    out = np.zeros(a.shape, np.float64)
    for i, kv in enumerate(kernel):
        if axis == 0:
            out += kv * padded[i : i + a.shape[0], :]
        else:
            out += kv * padded[:, i : i + a.shape[1]]
    return out


def gaussian_blur(imap: InterestMap, sigma: float = BLUR_SIGMA) -> InterestMap:
    """Separable Gaussian blur with reflected borders, in double precision."""
    kernel = gaussian_kernel(sigma)
    blurred = _convolve_axis(_convolve_axis(imap.values, kernel, 0), kernel, 1)
    return InterestMap(values=blurred)


def top_k_peaks(imap: InterestMap, k: int = TOP_K, r_excl: float = 2 * BLUR_SIGMA) -> list[InterestPoint]:
    """Pick up to k ranked peaks, suppressing a disk around each one.

    Each round takes the global maximum over unsuppressed pixels (ties
    break toward the smallest (y, x) in lexicographic order), then
    suppresses the closed disk of radius r_excl around it.  Fewer than k
    points come back only when every pixel is suppressed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    v = imap.values
    if v.size == 0:
        raise ValueError("empty interest map")
    h, w = v.shape
    ys, xs = np.indices((h, w))
    suppressed = np.zeros((h, w), bool)
    points: list[InterestPoint] = []
    r2 = r_excl * r_excl
    for rank in range(1, k + 1):
        if suppressed.all():
            break
        open_vals = np.where(suppressed, -np.inf, v)
        flat = int(np.argmax(open_vals))
        py, px = flat // w, flat % w
        points.append(InterestPoint(x=px, y=py, score=float(v[py, px]), rank=rank))
        suppressed |= (ys - py) ** 2 + (xs - px) ** 2 <= r2
    return points
