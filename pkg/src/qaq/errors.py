"""Exception hierarchy shared by the library, CLI and service layers.

Every error carries an ``EXIT_CODE`` so the CLI can map failures onto its
stable exit-code contract: 2 = input error, 3 = degenerate data,
4 = model incompatibility.
"""


class QaqError(Exception):
    """Base class for all library errors."""

    EXIT_CODE = 2


class InputError(QaqError):
    """Invalid input: bad files, bad shapes, bad parameter values."""

    EXIT_CODE = 2


class ImageFormatError(InputError):
    """Unreadable or unsupported image file."""


class DimensionError(InputError):
    """Image/field dimensions missing a precondition (mismatch or too small)."""


class DomainError(InputError):
    """Scalar parameter outside its valid domain (std <= 0, non-finite, ...)."""


class CorruptModelError(InputError):
    """Model file is structurally broken (truncated arrays, shape mismatch)."""


class DegenerateDataError(QaqError):
    """Data too thin or too flat to fit (few samples, zero variance, one-signed)."""

    EXIT_CODE = 3


class PatchSelectionError(DegenerateDataError):
    """No patch survived sharpness selection."""


class ModelIncompatibilityError(QaqError):
    """Models (or model and request) built under different feature configs."""

    EXIT_CODE = 4


class ModelVersionError(ModelIncompatibilityError):
    """Model file version not supported by this build."""
