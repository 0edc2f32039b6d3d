"""The per-image analysis chain shared by the CLI and the session loop.

One call takes an RGB image (a mosaic or a plain photo) through HSI
decomposition, per-plane co-occurrence segmentation, uncommonness
weighting, interest fusion, optional coarse-memory masking, blurring,
and ranked peak extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .interest import (
    InterestMap,
    InterestPoint,
    UncommonMap,
    fuse_interest,
    gaussian_blur,
    top_k_peaks,
    uncommon_map,
)
from .raster import HsiPlanes, RasterImage, rgb_to_hsi
from .segmentation import SegmentationMap, assign_classes, build_cooc_histogram, extract_peak_regions


@dataclass(frozen=True)
class ImageAnalysis:
    """Every product of one pass of the analysis chain over one image."""

    hsi: HsiPlanes
    segmentations: tuple[SegmentationMap, SegmentationMap, SegmentationMap]  # H, S, I order
    uncommons: tuple[UncommonMap, UncommonMap, UncommonMap]
    interest_raw: InterestMap  # unmasked integer sum of the three uncommon maps
    mask: np.ndarray | None  # True where coarse memory suppressed interest
    interest_blur: InterestMap  # blur of the (masked) sum
    points: tuple[InterestPoint, ...]


def segment_plane(plane: RasterImage, cfg: PipelineConfig) -> SegmentationMap:
    """Histogram, peak regions, and pixel classes for one gray plane."""
    hist = build_cooc_histogram(plane, cfg.hist_bins)
    regions = extract_peak_regions(hist, cfg.max_classes, cfg.peak_alpha, cfg.peak_tau)
    return assign_classes(plane, regions, cfg.hist_bins)


def analyze_image(
    img: RasterImage, cfg: PipelineConfig, mask: np.ndarray | None = None
) -> ImageAnalysis:
    """Run the full interest-detection chain over one RGB image.

    If a coarse-memory mask is given (True = suppress), masked pixels'
    interest is zeroed before blurring so remembered low-interest areas
    cannot spawn new points.
    """
    hsi = rgb_to_hsi(img)
    segs = tuple(segment_plane(p, cfg) for p in hsi.planes)
    uncs = tuple(uncommon_map(s) for s in segs)
    raw = fuse_interest(*uncs)
    pre_blur = raw
    if mask is not None:
        if mask.shape != raw.values.shape:
            raise ValueError("mask dimensions do not match the image")
        pre_blur = InterestMap(values=np.where(mask, 0.0, raw.values))
    blurred = gaussian_blur(pre_blur, cfg.blur_sigma)
    points = tuple(top_k_peaks(blurred, cfg.top_k, cfg.excl_radius))
    return ImageAnalysis(
        hsi=hsi,
        segmentations=segs,
        uncommons=uncs,
        interest_raw=raw,
        mask=None if mask is None else mask.copy(),
        interest_blur=blurred,
        points=points,
    )
