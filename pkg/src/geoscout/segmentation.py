"""Single-plane image segmentation driven by 2D co-occurrence histograms.

A plane's gray values are quantized into G bins; a G x G histogram counts
(pixel, neighbor) value pairs over the right and down neighbor offsets,
accumulated symmetrically.  Peak regions of that histogram define pixel
classes: each pixel is assigned to the class whose histogram region
captures the most of its own neighbor pairs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .raster import RasterImage

HIST_BINS = 64
PEAK_ALPHA = 0.05  # flood-fill floor as a fraction of the peak bin count
PEAK_TAU = 0.001  # stop extracting when a peak falls below this fraction of all pairs
MAX_CLASSES = 8

# Neighbor offsets (dy, dx) used for pair statistics.
PAIR_OFFSETS = ((0, 1), (1, 0))


@dataclass(frozen=True)
class CoocHistogram:
    """Symmetric G x G histogram of quantized (pixel, neighbor) value pairs."""

    counts: np.ndarray
    bins: int
    total_pairs: int

    def __post_init__(self):
        c = np.asarray(self.counts, np.int64)
        if c.shape != (self.bins, self.bins):
            raise ValueError("histogram shape must be bins x bins")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)


@dataclass(frozen=True)
class PeakRegion:
    """A 4-connected set of histogram bins claimed around one peak."""

    id: int
    peak_bin: tuple[int, int]
    peak_count: int
    bin_set: frozenset[tuple[int, int]]
    mass: int


@dataclass(frozen=True)
class SegmentationMap:
    """Per-pixel class labels 0..n_classes; 0 marks unsegmented pixels."""

    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        a = np.asarray(self.labels, np.uint8)
        if a.ndim != 2:
            raise ValueError("labels must be a 2D array")
        if self.n_classes < 0 or self.n_classes > MAX_CLASSES:
            raise ValueError("n_classes out of range")
        if a.size and a.max() > self.n_classes:
            raise ValueError("label exceeds n_classes")
        a.setflags(write=False)
        object.__setattr__(self, "labels", a)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class ClassStats:
    """Pixel area and centroid of one class; centroid is None for empty classes."""

    id: int
    pixel_count: int
    centroid: tuple[float, float] | None = field(default=None)


def quantize_plane(plane: RasterImage, bins: int = HIST_BINS) -> np.ndarray:
    """Map 0..255 samples onto bin indices 0..bins-1 via (v * bins) // 256."""
    if plane.channels != 1:
        raise ValueError("quantization requires a single-channel plane")
    return (plane.plane.astype(np.int64) * bins) // 256


def build_cooc_histogram(plane: RasterImage, bins: int = HIST_BINS) -> CoocHistogram:
    """Accumulate the symmetric co-occurrence histogram of a gray plane.

    For each pixel and each in-bounds neighbor at offsets (0,+1) and
    (+1,0), both (pixel, neighbor) and (neighbor, pixel) bins are
    incremented, so the histogram is symmetric by construction.
    """
    q = quantize_plane(plane, bins)
    h, w = q.shape
    n_pairs = 2 * ((w - 1) * h + w * (h - 1))
    if n_pairs == 0:
        raise ValueError("plane has no neighbor pairs (1x1)")
    counts = np.zeros((bins, bins), np.int64)
    for dy, dx in PAIR_OFFSETS:
        a = q[: h - dy, : w - dx].ravel()
        b = q[dy:, dx:].ravel()
        np.add.at(counts, (a, b), 1)
        np.add.at(counts, (b, a), 1)
    return CoocHistogram(counts=counts, bins=bins, total_pairs=n_pairs)


def extract_peak_regions(
    hist: CoocHistogram,
    max_classes: int = MAX_CLASSES,
    alpha: float = PEAK_ALPHA,
    tau: float = PEAK_TAU,
) -> list[PeakRegion]:
    """Iteratively claim up to max_classes peak regions from the histogram.

    Each round takes the highest unclaimed bin (ties broken toward the
    lexicographically smallest (row, col)), stops if it holds less than
    tau * total_pairs, and otherwise flood-fills 4-connected unclaimed
    bins holding at least alpha * peak_count.  Regions come back in
    extraction order, i.e. descending peak height.
    """
    counts = hist.counts
    g = hist.bins
    claimed = np.zeros((g, g), bool)
    regions: list[PeakRegion] = []
    while len(regions) < max_classes:
        open_counts = np.where(claimed, -1, counts)
        flat = int(np.argmax(open_counts))
        peak = (flat // g, flat % g)
        peak_count = int(counts[peak])
        if peak_count <= 0 or peak_count < tau * hist.total_pairs:
            break
        floor = alpha * peak_count
        members = []
        queue = deque([peak])
        claimed[peak] = True
        while queue:
            a, b = queue.popleft()
            members.append((a, b))
            for na, nb in ((a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1)):
                if 0 <= na < g and 0 <= nb < g and not claimed[na, nb] and counts[na, nb] >= floor:
                    claimed[na, nb] = True
                    queue.append((na, nb))
        mass = int(sum(counts[m] for m in members))
        regions.append(
            PeakRegion(
                id=len(regions) + 1,
                peak_bin=peak,
                peak_count=peak_count,
                bin_set=frozenset(members),
                mass=mass,
            )
        )
    return regions


def assign_classes(
    plane: RasterImage, regions: list[PeakRegion], bins: int = HIST_BINS
) -> SegmentationMap:
    """Label each pixel with the region that wins its neighbor-pair vote.

    A pixel casts one vote per in-bounds neighbor over the offsets
    (0,+1) and (+1,0) in both directions (so up to 4 votes), each vote
    going to the region containing the (pixel, neighbor) bin pair.  The
    label is the plurality winner; ties go to the lowest region id and
    pixels with no votes stay 0.
    """
    q = quantize_plane(plane, bins)
    h, w = q.shape
    if not regions:
        return SegmentationMap(labels=np.zeros((h, w), np.uint8), n_classes=0)
    lut = np.zeros((bins, bins), np.uint8)
    for reg in regions:
        for a, b in reg.bin_set:
            lut[a, b] = reg.id
    tallies = np.zeros((len(regions) + 1, h, w), np.int32)
    shifts = [(dy, dx) for dy, dx in PAIR_OFFSETS] + [(-dy, -dx) for dy, dx in PAIR_OFFSETS]
    for dy, dx in shifts:
        ys0, ys1 = max(0, -dy), min(h, h - dy)
        xs0, xs1 = max(0, -dx), min(w, w - dx)
        vote = lut[q[ys0:ys1, xs0:xs1], q[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx]]
        for rid in range(1, len(regions) + 1):
            tallies[rid, ys0:ys1, xs0:xs1] += vote == rid
    region_votes = tallies[1:]
    best = region_votes.argmax(axis=0).astype(np.uint8) + 1
    labels = np.where(region_votes.max(axis=0) > 0, best, 0).astype(np.uint8)
    return SegmentationMap(labels=labels, n_classes=len(regions))


def class_areas(seg: SegmentationMap) -> list[ClassStats]:
    """Pixel counts and centroids for every class id 0..n_classes."""
    n = seg.n_classes + 1
    flat = seg.labels.ravel().astype(np.int64)
    counts = np.bincount(flat, minlength=n)
    ys, xs = np.indices(seg.labels.shape)
    sum_x = np.bincount(flat, weights=xs.ravel(), minlength=n)
    sum_y = np.bincount(flat, weights=ys.ravel(), minlength=n)
    stats = []
    for cid in range(n):
        c = int(counts[cid])
        centroid = (sum_x[cid] / c, sum_y[cid] / c) if c else None
        stats.append(ClassStats(id=cid, pixel_count=c, centroid=centroid))
    return stats
