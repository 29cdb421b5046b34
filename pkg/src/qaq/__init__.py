"""qaq: quality-aware scoring toolkit.

Building blocks for quality-aware training objectives: the SSIM index and
its derived distance metrics, mean-subtracted contrast-normalized scene
statistics with GGD/AGGD fits, multivariate-Gaussian naturalness models,
and the discriminator gradient-penalty functionals built on them.
"""

from .errors import (
    CorruptModelError,
    DegenerateDataError,
    DimensionError,
    DomainError,
    ImageFormatError,
    InputError,
    ModelIncompatibilityError,
    ModelVersionError,
    PatchSelectionError,
    QaqError,
)
from .images import (
    LocalStatsField,
    Window,
    as_image,
    cross_covariance,
    default_mscn_window,
    default_ssim_window,
    gaussian_window,
    load_image,
    local_stats,
    save_pgm,
)
from .ssim import (
    SsimMaps,
    SsimParams,
    d1_distance,
    d2_distance,
    dq_distance,
    ssim_gp_penalty,
    ssim_index,
    ssim_maps,
)
from .mscn import (
    AggdParams,
    FeatureConfig,
    GgdParams,
    ORIENTATIONS,
    downscale2,
    extract_features,
    fit_aggd,
    fit_ggd,
    mscn,
    paired_products,
    patch_features,
    spatial_gradient,
)
from .mvg import (
    ModelMeta,
    MvgModel,
    fit_mvg,
    load_model,
    meta_from_config,
    niqe_distance,
    save_model,
    score_image,
)
from .regularizers import (
    PenaltyWeights,
    discriminator_loss_terms,
    interpolate_sample,
    niqe_gp_penalty,
    one_gp_penalty,
)
from .distort import DistortionSpec, add_awgn, apply_distortion, gaussian_blur

__version__ = "0.1.0"

__all__ = [
    "AggdParams",
    "CorruptModelError",
    "DegenerateDataError",
    "DimensionError",
    "DistortionSpec",
    "DomainError",
    "FeatureConfig",
    "GgdParams",
    "ImageFormatError",
    "InputError",
    "LocalStatsField",
    "ModelIncompatibilityError",
    "ModelMeta",
    "ModelVersionError",
    "MvgModel",
    "ORIENTATIONS",
    "PatchSelectionError",
    "PenaltyWeights",
    "QaqError",
    "SsimMaps",
    "SsimParams",
    "Window",
    "add_awgn",
    "apply_distortion",
    "as_image",
    "cross_covariance",
    "d1_distance",
    "d2_distance",
    "default_mscn_window",
    "default_ssim_window",
    "discriminator_loss_terms",
    "downscale2",
    "dq_distance",
    "extract_features",
    "fit_aggd",
    "fit_ggd",
    "fit_mvg",
    "gaussian_blur",
    "gaussian_window",
    "interpolate_sample",
    "load_image",
    "load_model",
    "local_stats",
    "meta_from_config",
    "mscn",
    "niqe_distance",
    "niqe_gp_penalty",
    "one_gp_penalty",
    "paired_products",
    "patch_features",
    "save_model",
    "save_pgm",
    "score_image",
    "spatial_gradient",
    "ssim_gp_penalty",
    "ssim_index",
    "ssim_maps",
]
