"""Tunable pipeline parameters with their standard defaults."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .interest import BLUR_SIGMA, TOP_K
from .segmentation import HIST_BINS, MAX_CLASSES, PEAK_ALPHA, PEAK_TAU


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the analysis chain, bundled for CLI/scenario use.

    m_thresh may be 0, which disables coarse-memory masking entirely;
    everything else must be positive.
    """

    hist_bins: int = HIST_BINS
    peak_alpha: float = PEAK_ALPHA
    peak_tau: float = PEAK_TAU
    max_classes: int = MAX_CLASSES
    blur_sigma: float = BLUR_SIGMA
    top_k: int = TOP_K
    excl_radius: float = 2 * BLUR_SIGMA
    downsample_f: int = 8
    m_thresh: int = 2
    tolerance_px: float = 10.0
    mosaic_rows: int = 3
    mosaic_cols: int = 4

    def __post_init__(self):
        positives = (
            self.hist_bins,
            self.peak_alpha,
            self.peak_tau,
            self.max_classes,
            self.blur_sigma,
            self.top_k,
            self.downsample_f,
            self.tolerance_px,
            self.mosaic_rows,
            self.mosaic_cols,
        )
        if any(p <= 0 for p in positives):
            raise ValueError("pipeline parameters must be positive")
        if self.max_classes > MAX_CLASSES:
            raise ValueError(f"max_classes must be <= {MAX_CLASSES}")
        if self.excl_radius < 1:
            raise ValueError("excl_radius must be >= 1")
        if self.m_thresh < 0:
            raise ValueError("m_thresh must be >= 0")

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown pipeline parameter(s): {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
