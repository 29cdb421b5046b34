"""Discriminator penalty functionals and the interpolated-sample constructor.

All penalties are per-sample value scorers: batch expectations, weighting
and gradient flow belong to the training loop consuming them.  This module
is the numeric oracle any autodiff reimplementation is validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .images import as_image, require_same_shape
from .mscn import FeatureConfig
from .mvg import MvgModel, score_image


@dataclass(frozen=True)
class PenaltyWeights:
    """Weights of the two regularizer terms in the discriminator loss.

    Defaults are the empirically chosen 1 and 0.1.
    """

    lambda1: float = 1.0
    lambda2: float = 0.1

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise DomainError("penalty weights must be non-negative")


def interpolate_sample(x_real, x_fake, epsilon: float) -> np.ndarray:
    """Convex combination epsilon * x_real + (1 - epsilon) * x_fake."""
    if not (0.0 <= epsilon <= 1.0):
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    a = as_image(x_real, "x_real")
    b = as_image(x_fake, "x_fake")
    require_same_shape(a, b)
    return epsilon * a + (1.0 - epsilon) * b


def one_gp_penalty(grad) -> float:
    """WGAN-GP unit-norm penalty (||grad||_2 - 1)^2 over all field entries."""
    g = np.asarray(grad, dtype=np.float64)
    if g.size == 0:
        raise DimensionError("gradient field is empty")
    if not np.all(np.isfinite(g)):
        raise DomainError("gradient field contains non-finite values")
    norm = float(np.linalg.norm(g.ravel()))
    return (norm - 1.0) ** 2


def niqe_gp_penalty(
    grad, pristine: MvgModel, config: FeatureConfig | None = None
) -> float:
    """Naturalness penalty of one gradient field against a pristine-gradient
    model: the model distance of the field's own patch statistics."""
    return score_image(grad, pristine, config)


def discriminator_loss_terms(
    wasserstein_gap: float,
    one_gp_mean: float,
    quality_mean: float,
    weights: PenaltyWeights | None = None,
) -> float:
    """Total loss: gap + lambda1 * one_gp_mean + lambda2 * quality_mean.

    The quality slot takes either penalty family's batch mean (the coupled
    SSIM ratio penalty or the naturalness penalty).
    """
    weights = weights or PenaltyWeights()
    terms = (wasserstein_gap, one_gp_mean, quality_mean)
    if not all(math.isfinite(t) for t in terms):
        raise DomainError(f"loss terms must be finite, got {terms}")
    return wasserstein_gap + weights.lambda1 * one_gp_mean + weights.lambda2 * quality_mean
