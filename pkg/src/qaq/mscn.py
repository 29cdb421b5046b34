"""Natural-scene statistics: MSCN transform, GGD/AGGD fits, patch features.

The MSCN field of an image I is (I - mu) / (sigma + 1) with mu, sigma the
windowed local statistics; for natural photographs its coefficients are
near-Gaussian and distortions push them away from that signature.  Each
patch is summarized by 18 numbers — a generalized Gaussian fit of the
coefficients plus asymmetric fits of the four neighbor-product fields —
computed at two scales for a 36-long feature vector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.special import gamma as gamma_fn

from .errors import DegenerateDataError, DimensionError, DomainError, PatchSelectionError
from .images import Window, as_image, default_mscn_window, local_stats

log = logging.getLogger(__name__)

ORIENTATIONS = ("H", "V", "D1", "D2")

FEATURES_PER_SCALE = 2 + 4 * 4  # GGD(alpha, sigma^2) + 4 x AGGD(alpha, eta, sl^2, sr^2)

# Shape-parameter search grid shared by the GGD and AGGD fits.
_ALPHA_GRID_START, _ALPHA_GRID_STOP, _ALPHA_GRID_STEP = 0.2, 10.0, 0.001

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = _SOBEL_X.T


@dataclass(frozen=True)
class GgdParams:
    """Generalized Gaussian shape alpha and scale sigma.

    Density ~ exp(-(|x| / sigma)^alpha); alpha = 2 is Gaussian, 1 Laplacian.
    """

    alpha: float
    sigma: float


@dataclass(frozen=True)
class AggdParams:
    """Asymmetric generalized Gaussian: shape, left/right scales, mean offset."""

    alpha: float
    sigma_l: float
    sigma_r: float
    eta: float


_GRID: tuple[np.ndarray, np.ndarray] | None = None


def _alpha_grid() -> tuple[np.ndarray, np.ndarray]:
    global _GRID
    if _GRID is None:
        alphas = np.arange(
            _ALPHA_GRID_START, _ALPHA_GRID_STOP + _ALPHA_GRID_STEP / 2, _ALPHA_GRID_STEP
        )
        rho = gamma_fn(2.0 / alphas) ** 2 / (
            gamma_fn(1.0 / alphas) * gamma_fn(3.0 / alphas)
        )
        # The moment-ratio function must be strictly monotone for
        # nearest-match inversion to be well defined.
        if not np.all(np.diff(rho) > 0):
            raise AssertionError("GGD moment-ratio grid is not strictly increasing")
        _GRID = (alphas, rho)
    return _GRID


def _nearest_alpha(ratio: float) -> float:
    alphas, rho = _alpha_grid()
    return float(alphas[np.argmin((rho - ratio) ** 2)])


def mscn(img, window: Window | None = None) -> np.ndarray:
    """Mean-subtracted contrast-normalized coefficients (I - mu) / (sigma + 1).

    The +1 stabilizer is exactly 1, the convention for 8-bit-range inputs.
    """
    window = window or default_mscn_window()
    img = as_image(img)
    mu, sigma = local_stats(img, window)
    return (img - mu) / (sigma + 1.0)


def paired_products(coeffs, orientation: str) -> np.ndarray:
    """Products of each coefficient with its shifted neighbor.

    H pairs (i,j) with (i,j+1);  V with (i+1,j);  D1 with (i+1,j+1);
    D2 with (i+1,j-1).  Output shrinks by the shift (no wrap-around).
    """
    c = as_image(coeffs, "coefficient field")
    if c.shape[0] < 2 or c.shape[1] < 2:
        raise DimensionError(f"coefficient field must be at least 2x2, got {c.shape}")
    if orientation == "H":
        return c[:, :-1] * c[:, 1:]
    if orientation == "V":
        return c[:-1, :] * c[1:, :]
    if orientation == "D1":
        return c[:-1, :-1] * c[1:, 1:]
    if orientation == "D2":
        return c[:-1, 1:] * c[1:, :-1]
    raise DomainError(f"unknown orientation {orientation!r} (expected H, V, D1, D2)")


def fit_ggd(samples) -> GgdParams:
    """Moment-matching GGD fit.

    Inverts rho(alpha) = Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)) at the sample
    ratio (E|x|)^2 / E[x^2] by nearest match on a step-0.001 grid over
    [0.2, 10], then recovers the scale from the second moment.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 100:
        raise DegenerateDataError(f"GGD fit needs >= 100 samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("GGD fit input contains non-finite values")
    m2 = float(np.mean(x * x))
    if m2 <= 0.0 or np.var(x) == 0.0:
        raise DegenerateDataError("GGD fit needs samples with nonzero variance")
    ratio = float(np.mean(np.abs(x))) ** 2 / m2
    alpha = _nearest_alpha(ratio)
    sigma = float(np.sqrt(m2 * gamma_fn(1.0 / alpha) / gamma_fn(3.0 / alpha)))
    return GgdParams(alpha=alpha, sigma=sigma)


def fit_aggd(samples) -> AggdParams:
    """Moment-matching AGGD fit (standard half-sample procedure).

    Left/right standard deviations come from the negative/positive halves;
    the generalized ratio corrected by gamma = sd_l / sd_r is inverted on the
    shared alpha grid; scales follow from the half second moments and
    eta = (sigma_r - sigma_l) Gamma(2/a) / Gamma(1/a).
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 100:
        raise DegenerateDataError(f"AGGD fit needs >= 100 samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("AGGD fit input contains non-finite values")
    neg = x[x < 0]
    pos = x[x > 0]
    if neg.size == 0 or pos.size == 0:
        raise DegenerateDataError("AGGD fit needs samples of both signs")
    sd_l = float(np.sqrt(np.mean(neg * neg)))
    sd_r = float(np.sqrt(np.mean(pos * pos)))
    gamma_hat = sd_l / sd_r
    r_hat = float(np.mean(np.abs(x))) ** 2 / float(np.mean(x * x))
    r_corrected = (
        r_hat * (gamma_hat**3 + 1.0) * (gamma_hat + 1.0) / (gamma_hat**2 + 1.0) ** 2
    )
    alpha = _nearest_alpha(r_corrected)
    to_scale = float(np.sqrt(gamma_fn(1.0 / alpha) / gamma_fn(3.0 / alpha)))
    sigma_l = sd_l * to_scale
    sigma_r = sd_r * to_scale
    eta = (sigma_r - sigma_l) * float(gamma_fn(2.0 / alpha) / gamma_fn(1.0 / alpha))
    return AggdParams(alpha=alpha, sigma_l=sigma_l, sigma_r=sigma_r, eta=eta)


@dataclass(frozen=True)
class FeatureConfig:
    """Patch-feature extraction settings.

    ``patch_size`` auto-clamps (with a logged warning) to the image when the
    image is smaller; small inputs give poorer parameter estimates, so the
    clamp is a concession, not a recommendation.  ``sharpness_fraction``
    discards scale-1 patches whose mean local sigma falls below the fraction
    of the sharpest patch's.
    """

    patch_size: int = 96
    sharpness_fraction: float = 0.75
    scales: int = 2
    window: Window = field(default_factory=default_mscn_window)

    def __post_init__(self):
        if self.patch_size < 2:
            raise DomainError(f"patch_size must be >= 2, got {self.patch_size}")
        if not 0.0 <= self.sharpness_fraction <= 1.0:
            raise DomainError(
                f"sharpness_fraction must be in [0, 1], got {self.sharpness_fraction}"
            )
        if self.scales not in (1, 2):
            raise DomainError(f"scales must be 1 or 2, got {self.scales}")

    @property
    def feature_length(self) -> int:
        return FEATURES_PER_SCALE * self.scales


def downscale2(img) -> np.ndarray:
    """Halve resolution by non-overlapping 2x2 local averaging."""
    img = as_image(img)
    h, w = (img.shape[0] // 2) * 2, (img.shape[1] // 2) * 2
    if h < 2 or w < 2:
        raise DimensionError(f"image {img.shape} too small to downscale")
    c = img[:h, :w]
    return (c[0::2, 0::2] + c[0::2, 1::2] + c[1::2, 0::2] + c[1::2, 1::2]) / 4.0


def spatial_gradient(img) -> np.ndarray:
    """Sobel gradient magnitude sqrt(Gx^2 + Gy^2), reflection padding."""
    img = as_image(img)
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise DimensionError(f"image must be at least 3x3 for gradients, got {img.shape}")
    gx = ndimage.correlate(img, _SOBEL_X, mode="reflect")
    gy = ndimage.correlate(img, _SOBEL_Y, mode="reflect")
    return np.sqrt(gx * gx + gy * gy)


def _block_features(block: np.ndarray) -> list[float]:
    ggd = fit_ggd(block)
    feats = [ggd.alpha, ggd.sigma**2]
    for orientation in ORIENTATIONS:
        aggd = fit_aggd(paired_products(block, orientation))
        feats.extend([aggd.alpha, aggd.eta, aggd.sigma_l**2, aggd.sigma_r**2])
    return feats


def _effective_patch(img: np.ndarray, config: FeatureConfig) -> int:
    patch = min(config.patch_size, img.shape[0], img.shape[1])
    patch -= patch % 2  # keep the two scales grid-aligned
    if patch != config.patch_size:
        log.warning(
            "patch size clamped from %d to %d for image %s",
            config.patch_size,
            patch,
            img.shape,
        )
    # Smallest analyzed block must leave enough paired-product samples.
    smallest = patch // (2 ** (config.scales - 1))
    if smallest < 12:
        raise DimensionError(
            f"effective patch size {patch} too small for {config.scales}-scale "
            "feature extraction (minimum block side 12)"
        )
    return patch


def patch_features(img, config: FeatureConfig | None = None) -> np.ndarray:
    """Per-patch feature matrix of shape (n_selected_patches, 18 * scales).

    The image is cropped to a whole number of non-overlapping patches; patch
    selection by sharpness happens at scale 1 only and the surviving patch
    indices are reused at scale 2 (the same regions at half resolution).
    """
    config = config or FeatureConfig()
    img = as_image(img)
    patch = _effective_patch(img, config)
    img = img[: (img.shape[0] // patch) * patch, : (img.shape[1] // patch) * patch]
    rows, cols = img.shape[0] // patch, img.shape[1] // patch

    mu, sigma = local_stats(img, config.window)
    coeffs = (img - mu) / (sigma + 1.0)

    sharpness = np.array(
        [
            [
                sigma[r * patch : (r + 1) * patch, c * patch : (c + 1) * patch].mean()
                for c in range(cols)
            ]
            for r in range(rows)
        ]
    )
    peak = float(sharpness.max())
    if peak <= 0.0:
        raise PatchSelectionError(
            "no patch survives sharpness selection (all local sigma are ~0); "
            "use a lower sharpness fraction or a less uniform image"
        )
    selected = [
        (r, c)
        for r in range(rows)
        for c in range(cols)
        if sharpness[r, c] >= config.sharpness_fraction * peak
    ]
    if not selected:
        raise PatchSelectionError(
            "no patch survives sharpness selection; use a lower sharpness fraction"
        )

    per_scale = [
        [
            _block_features(
                coeffs[r * patch : (r + 1) * patch, c * patch : (c + 1) * patch]
            )
            for (r, c) in selected
        ]
    ]
    if config.scales == 2:
        half = downscale2(img)
        hp = patch // 2
        coeffs2 = mscn(half, config.window)
        per_scale.append(
            [
                _block_features(
                    coeffs2[r * hp : (r + 1) * hp, c * hp : (c + 1) * hp]
                )
                for (r, c) in selected
            ]
        )
    return np.hstack([np.asarray(s, dtype=np.float64) for s in per_scale])


def extract_features(img, config: FeatureConfig | None = None) -> np.ndarray:
    """Patch-averaged feature vector (length 18 * scales; 36 by default)."""
    return patch_features(img, config).mean(axis=0)
