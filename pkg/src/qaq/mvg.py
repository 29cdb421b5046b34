"""Multivariate-Gaussian image-class models and the naturalness distance.

A model is the sample mean and unbiased covariance of per-patch feature
vectors, plus a fingerprint of the feature configuration that produced
them.  Two models are comparable only under the same fingerprint; the
distance between comparable models is

    sqrt((mu_a - mu_b)^T ((Sigma_a + Sigma_b) / 2)^{-1} (mu_a - mu_b))

with the averaged covariance inverted by pseudo-inverse (relative cutoff
1e-10), since desk-scale corpora routinely produce rank-deficient
covariances.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import (
    CorruptModelError,
    DegenerateDataError,
    DimensionError,
    DomainError,
    InputError,
    ModelIncompatibilityError,
    ModelVersionError,
)
from .mscn import FeatureConfig, patch_features
from .images import gaussian_window

MODEL_FORMAT_VERSION = "1"

_PINV_RCOND = 1e-10


@dataclass(frozen=True)
class ModelMeta:
    """Feature-config fingerprint; models with different fingerprints are
    incommensurable and refuse to be compared.

    ``sample_count`` is provenance, not part of the compatibility check.
    ``gradient`` records whether features were taken of raw images or of
    their spatial-gradient fields.
    """

    patch_size: int
    sharpness_fraction: float
    scales: int
    window_radius: int
    window_std: float
    gradient: bool
    sample_count: int

    def compatible_with(self, other: "ModelMeta") -> bool:
        return (
            self.patch_size == other.patch_size
            and self.sharpness_fraction == other.sharpness_fraction
            and self.scales == other.scales
            and self.window_radius == other.window_radius
            and self.window_std == other.window_std
            and self.gradient == other.gradient
        )

    def mismatched_fields(self, other: "ModelMeta") -> list[str]:
        fields = [
            "patch_size",
            "sharpness_fraction",
            "scales",
            "window_radius",
            "window_std",
            "gradient",
        ]
        return [f for f in fields if getattr(self, f) != getattr(other, f)]

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(
            patch_size=self.patch_size,
            sharpness_fraction=self.sharpness_fraction,
            scales=self.scales,
            window=gaussian_window(self.window_radius, self.window_std),
        )


def meta_from_config(config: FeatureConfig, gradient: bool, sample_count: int) -> ModelMeta:
    if config.window.std is None:
        raise InputError(
            "model meta requires a Gaussian window (one built by gaussian_window)"
        )
    return ModelMeta(
        patch_size=config.patch_size,
        sharpness_fraction=config.sharpness_fraction,
        scales=config.scales,
        window_radius=config.window.radius,
        window_std=config.window.std,
        gradient=gradient,
        sample_count=sample_count,
    )


@dataclass(frozen=True)
class MvgModel:
    """Mean vector + covariance matrix representing a class of images."""

    mu: np.ndarray
    sigma: np.ndarray
    meta: ModelMeta | None = None

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if mu.ndim != 1:
            raise DimensionError(f"model mean must be 1-D, got {mu.ndim}-D")
        if sigma.shape != (mu.size, mu.size):
            raise DimensionError(
                f"model covariance must be {mu.size}x{mu.size}, got {sigma.shape}"
            )
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise DomainError("model parameters contain non-finite values")
        if np.abs(sigma - sigma.T).max() > 1e-10:
            raise DomainError("model covariance must be symmetric")
        if np.any(np.diag(sigma) < 0):
            raise DomainError("model covariance has negative diagonal entries")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return self.mu.size


def fit_mvg(features, meta: ModelMeta | None = None) -> MvgModel:
    """Sample mean and unbiased (n-1) covariance of row feature vectors."""
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 2:
        raise DimensionError(f"feature matrix must be 2-D, got {f.ndim}-D")
    if f.shape[0] < 2:
        raise DegenerateDataError(
            f"MVG fit needs at least 2 feature vectors, got {f.shape[0]}"
        )
    if not np.all(np.isfinite(f)):
        raise DomainError("feature matrix contains non-finite values")
    mu = f.mean(axis=0)
    centered = f - mu
    sigma = centered.T @ centered / (f.shape[0] - 1)
    sigma = (sigma + sigma.T) / 2.0  # exact symmetry against fp drift
    if meta is not None and meta.sample_count != f.shape[0]:
        meta = ModelMeta(**{**asdict(meta), "sample_count": f.shape[0]})
    return MvgModel(mu=mu, sigma=sigma, meta=meta)


def niqe_distance(model_a: MvgModel, model_b: MvgModel) -> float:
    """Distance between two models under the averaged-covariance inverse."""
    if model_a.dim != model_b.dim:
        raise DimensionError(
            f"model dimensions differ: {model_a.dim} vs {model_b.dim}"
        )
    if (
        model_a.meta is not None
        and model_b.meta is not None
        and not model_a.meta.compatible_with(model_b.meta)
    ):
        raise ModelIncompatibilityError(
            "models were built under different feature configs: "
            + ", ".join(model_a.meta.mismatched_fields(model_b.meta))
        )
    avg = (model_a.sigma + model_b.sigma) / 2.0
    inv = np.linalg.pinv(avg, rcond=_PINV_RCOND)
    diff = model_a.mu - model_b.mu
    return float(np.sqrt(max(0.0, float(diff @ inv @ diff))))


def score_image(img, pristine: MvgModel, config: FeatureConfig | None = None) -> float:
    """Naturalness score of one image against a pristine model (lower = closer).

    Extracts per-patch features under the pristine model's configuration,
    fits the test-image model and returns the model distance.
    """
    if config is None:
        if pristine.meta is None:
            raise ModelIncompatibilityError(
                "pristine model has no meta; pass the feature config explicitly"
            )
        config = pristine.meta.feature_config()
    feats = patch_features(img, config)
    test = fit_mvg(feats, meta=pristine.meta)
    return niqe_distance(pristine, test)


# ---------------------------------------------------------------------------
# Persistence: versioned JSON, full float precision.
# ---------------------------------------------------------------------------


def save_model(model: MvgModel, path) -> None:
    if model.meta is None:
        raise InputError("cannot persist a model without meta provenance")
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "feature_dim": model.dim,
        "mu": model.mu.tolist(),
        "sigma": model.sigma.ravel().tolist(),
        "meta": asdict(model.meta),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path) -> MvgModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptModelError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CorruptModelError(f"{path}: model document must be a JSON object")
    version = doc.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelVersionError(
            f"{path}: unsupported model version {version!r} "
            f"(supported versions: {MODEL_FORMAT_VERSION})"
        )
    try:
        dim = int(doc["feature_dim"])
        mu = np.asarray(doc["mu"], dtype=np.float64)
        sigma_flat = np.asarray(doc["sigma"], dtype=np.float64)
        meta = ModelMeta(**doc["meta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModelError(f"{path}: malformed model fields: {exc}") from exc
    if mu.shape != (dim,):
        raise CorruptModelError(
            f"{path}: mean length {mu.size} does not match feature_dim {dim}"
        )
    if sigma_flat.shape != (dim * dim,):
        raise CorruptModelError(
            f"{path}: covariance length {sigma_flat.size} does not match "
            f"feature_dim {dim} (expected {dim * dim})"
        )
    if meta.sample_count < 2:
        raise CorruptModelError(f"{path}: sample_count must be >= 2")
    try:
        return MvgModel(mu=mu, sigma=sigma_flat.reshape(dim, dim), meta=meta)
    except (DimensionError, DomainError) as exc:
        raise CorruptModelError(f"{path}: {exc}") from exc
