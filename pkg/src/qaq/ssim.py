"""SSIM component maps, image-level SSIM, derived distance metrics, SSIM-GP.

The luminance map L and contrast-structure map CS are

    L  = (2 mu_P mu_T + C1) / (mu_P^2 + mu_T^2 + C1)
    CS = (2 sigma_PT + C2) / (sigma_P^2 + sigma_T^2 + C2)

with the per-pixel SSIM their product and the image-level score the pixel
mean.  The derived metrics are pixel means of sqrt(1 - L), sqrt(1 - CS) and
sqrt(2 - L - CS); each pointwise radicand is clamped at zero to absorb
floating-point excursions of order 1e-15.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError
from .images import (
    Window,
    as_image,
    default_ssim_window,
    require_same_shape,
    weighted_filter,
)

# Standard stabilizers for 8-bit dynamic range L = 255.
DEFAULT_C1 = (0.01 * 255.0) ** 2
DEFAULT_C2 = (0.03 * 255.0) ** 2


@dataclass(frozen=True)
class SsimParams:
    """Stabilizing constants and window for the SSIM family.

    Defaults assume luminance range 255; override c1/c2 for inputs with a
    different dynamic range (e.g. gradient fields).
    """

    c1: float = DEFAULT_C1
    c2: float = DEFAULT_C2
    window: Window = field(default_factory=default_ssim_window)

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise DomainError("SSIM stabilizers c1, c2 must be positive")


class SsimMaps(NamedTuple):
    luminance: np.ndarray
    contrast_structure: np.ndarray
    ssim: np.ndarray


def ssim_maps(p, t, params: SsimParams | None = None) -> SsimMaps:
    """Per-pixel luminance, contrast-structure and SSIM maps."""
    params = params or SsimParams()
    p = as_image(p, "P")
    t = as_image(t, "T")
    require_same_shape(p, t)
    window = params.window
    if p.shape[0] < window.diameter or p.shape[1] < window.diameter:
        raise DimensionError(
            f"image {p.shape} smaller than window diameter {window.diameter}"
        )
    # Raw (unclipped) second moments: identical images then satisfy
    # 2 sigma_PT == var_P + var_T bitwise, making CS and the derived
    # distances exactly 1 and 0.
    mu_p = weighted_filter(p, window)
    mu_t = weighted_filter(t, window)
    var_p = weighted_filter(p * p, window) - mu_p * mu_p
    var_t = weighted_filter(t * t, window) - mu_t * mu_t
    sig_pt = weighted_filter(p * t, window) - mu_p * mu_t
    lum = (2.0 * mu_p * mu_t + params.c1) / (mu_p**2 + mu_t**2 + params.c1)
    cs = (2.0 * sig_pt + params.c2) / (var_p + var_t + params.c2)
    return SsimMaps(luminance=lum, contrast_structure=cs, ssim=lum * cs)


def ssim_index(p, t, params: SsimParams | None = None) -> float:
    """Image-level SSIM: arithmetic mean of the per-pixel SSIM map."""
    return float(np.mean(ssim_maps(p, t, params).ssim))


def _distance_mean(radicand: np.ndarray) -> float:
    return float(np.mean(np.sqrt(np.clip(radicand, 0.0, None))))


def d1_distance(p, t, params: SsimParams | None = None) -> float:
    """Pixel mean of sqrt(1 - L): the luminance-component distance metric."""
    maps = ssim_maps(p, t, params)
    return _distance_mean(1.0 - maps.luminance)


def d2_distance(p, t, params: SsimParams | None = None) -> float:
    """Pixel mean of sqrt(1 - CS): the contrast-structure distance metric."""
    maps = ssim_maps(p, t, params)
    return _distance_mean(1.0 - maps.contrast_structure)


def dq_distance(p, t, params: SsimParams | None = None) -> float:
    """Pixel mean of sqrt(2 - L - CS): the combined quality-aware distance."""
    maps = ssim_maps(p, t, params)
    return _distance_mean(2.0 - maps.luminance - maps.contrast_structure)


def ssim_gp_penalty(
    d_x: float,
    d_y: float,
    x,
    y,
    params: SsimParams | None = None,
    floor: float = 1e-8,
) -> float:
    """Per-pair coupled gradient penalty (|d_x - d_y| / dq(x, y) - 1)^2.

    ``d_x`` and ``d_y`` are the discriminator outputs for the two images.
    The denominator is floored to keep the penalty finite when the pair is
    (nearly) coincident; the batch expectation over pairs is the caller's.
    """
    if floor <= 0 or not np.isfinite(floor):
        raise DomainError(f"floor must be a positive real, got {floor}")
    if not (np.isfinite(d_x) and np.isfinite(d_y)):
        raise DomainError("discriminator outputs must be finite")
    dq = dq_distance(x, y, params)
    ratio = abs(d_x - d_y) / max(dq, floor)
    return (ratio - 1.0) ** 2
