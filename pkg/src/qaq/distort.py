"""Reference distortions for reproducing the statistical-separation figures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DomainError
from .images import as_image

DISTORTION_KINDS = ("blur", "awgn")


@dataclass(frozen=True)
class DistortionSpec:
    """blur: Gaussian std in pixels; awgn: noise std in luminance units."""

    kind: str
    level: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in DISTORTION_KINDS:
            raise DomainError(
                f"unknown distortion kind {self.kind!r} (expected blur or awgn)"
            )
        if not (self.level > 0 and math.isfinite(self.level)):
            raise DomainError(f"distortion level must be > 0, got {self.level}")


def gaussian_blur(img, std: float) -> np.ndarray:
    """Gaussian convolution with kernel radius ceil(3 std), reflection padding."""
    if std <= 0 or not math.isfinite(std):
        raise DomainError(f"blur std must be > 0, got {std}")
    img = as_image(img)
    radius = max(1, math.ceil(3.0 * std))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * std * std))
    kernel /= kernel.sum()
    tmp = ndimage.correlate1d(img, kernel, axis=0, mode="reflect")
    return ndimage.correlate1d(tmp, kernel, axis=1, mode="reflect")


def add_awgn(img, std: float, seed: int = 0) -> np.ndarray:
    """Seeded additive white Gaussian noise, clamped to [0, 255]."""
    if std <= 0 or not math.isfinite(std):
        raise DomainError(f"noise std must be > 0, got {std}")
    img = as_image(img)
    rng = np.random.default_rng(seed)
    return np.clip(img + rng.normal(0.0, std, size=img.shape), 0.0, 255.0)


def apply_distortion(img, spec: DistortionSpec) -> np.ndarray:
    if spec.kind == "blur":
        return gaussian_blur(img, spec.level)
    return add_awgn(img, spec.level, spec.seed)
