"""Image substrate: decoding, grayscale conversion, windows, local statistics.

A grayscale image is represented throughout the library as a 2-D float64
numpy array of shape (height, width), nominal range [0, 255].  Real-valued
fields (e.g. discriminator gradients) use the same representation, which is
why pixels are stored as floats rather than bytes.

Local statistics use symmetric reflection padding at the boundary
(numpy's ``symmetric`` / ndimage's ``reflect``: the edge sample is repeated).
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .errors import DimensionError, DomainError, ImageFormatError, InputError

# Rec.601 luma weights for RGB reduction.
_LUMA_R, _LUMA_G, _LUMA_B = 0.299, 0.587, 0.114

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def as_image(data, name: str = "image") -> np.ndarray:
    """Validate and coerce ``data`` into the canonical 2-D float64 image form.

    Raises DimensionError for non-2-D or empty input and DomainError for
    non-finite values.
    """
    img = np.asarray(data, dtype=np.float64)
    if img.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got {img.ndim}-D")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise DimensionError(f"{name} must be at least 1x1, got {img.shape}")
    if not np.all(np.isfinite(img)):
        raise DomainError(f"{name} contains non-finite values")
    return img


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class Window:
    """Normalized, flip-symmetric (2K+1) x (2K+1) weighting window.

    ``factors`` holds the 1-D separable factors when the window is an outer
    product (Gaussian windows are); ``None`` selects the general 2-D path.
    ``std`` records the generating Gaussian std, when there is one, so model
    fingerprints can cite it.
    """

    radius: int
    weights: np.ndarray
    factors: np.ndarray | None = field(default=None, compare=False)
    std: float | None = field(default=None, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        side = 2 * self.radius + 1
        if self.radius < 1:
            raise DomainError(f"window radius must be >= 1, got {self.radius}")
        if w.shape != (side, side):
            raise DimensionError(
                f"window weights must be {side}x{side}, got {w.shape}"
            )
        if np.any(w < 0):
            raise DomainError("window weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("window weights must sum to 1")
        if not (np.allclose(w, w[::-1, :]) and np.allclose(w, w[:, ::-1])):
            raise DomainError("window weights must be flip-symmetric")
        object.__setattr__(self, "weights", w)

    @property
    def diameter(self) -> int:
        return 2 * self.radius + 1


def gaussian_window(radius: int, std: float) -> Window:
    """Gaussian window, weights ~ exp(-(m^2+n^2) / (2 std^2)), normalized.

    The SSIM path conventionally uses radius 5, std 1.5; the MSCN path
    radius 3, std 7/6.
    """
    if std <= 0 or not np.isfinite(std):
        raise DomainError(f"window std must be positive, got {std}")
    if radius < 1:
        raise DomainError(f"window radius must be >= 1, got {radius}")
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(offsets**2) / (2.0 * std * std))
    weights = np.outer(g, g)
    weights /= weights.sum()
    return Window(radius=radius, weights=weights, factors=g / g.sum(), std=float(std))


# Module-level defaults; both are parameters everywhere they are consumed.
def default_ssim_window() -> Window:
    return gaussian_window(5, 1.5)


def default_mscn_window() -> Window:
    return gaussian_window(3, 7.0 / 6.0)


class LocalStatsField(NamedTuple):
    mu: np.ndarray
    sigma: np.ndarray


def _check_window_fits(img: np.ndarray, window: Window) -> None:
    if img.shape[0] < window.diameter or img.shape[1] < window.diameter:
        raise DimensionError(
            f"image {img.shape} smaller than window diameter {window.diameter}"
        )


def weighted_filter(img: np.ndarray, window: Window) -> np.ndarray:
    """Windowed weighted mean of ``img`` with symmetric reflection padding."""
    if window.factors is not None:
        tmp = ndimage.correlate1d(img, window.factors, axis=0, mode="reflect")
        return ndimage.correlate1d(tmp, window.factors, axis=1, mode="reflect")
    return ndimage.correlate(img, window.weights, mode="reflect")


def local_stats(img, window: Window) -> LocalStatsField:
    """Per-pixel weighted local mean and standard deviation.

    sigma = sqrt(max(0, E[x^2] - mu^2)); the clamp guards tiny negative
    values from floating-point cancellation.  Moments are taken about the
    global mean so that cancellation is relative to local contrast, not to
    absolute luminance: a constant image yields mu == constant and
    sigma == 0 exactly.
    """
    img = as_image(img)
    _check_window_fits(img, window)
    shift = float(img.mean())
    centered = img - shift
    mu = weighted_filter(centered, window)
    ex2 = weighted_filter(centered * centered, window)
    var = ex2 - mu * mu
    np.clip(var, 0.0, None, out=var)
    return LocalStatsField(mu=mu + shift, sigma=np.sqrt(var))


def cross_covariance(p, t, window: Window) -> np.ndarray:
    """Per-pixel weighted cross covariance E[(P - mu_P)(T - mu_T)].

    Uses the same window and padding as :func:`local_stats`; exactly
    symmetric in (p, t).
    """
    p = as_image(p, "P")
    t = as_image(t, "T")
    require_same_shape(p, t)
    _check_window_fits(p, window)
    cp = p - float(p.mean())
    ct = t - float(t.mean())
    mu_p = weighted_filter(cp, window)
    mu_t = weighted_filter(ct, window)
    return weighted_filter(cp * ct, window) - mu_p * mu_t


# ---------------------------------------------------------------------------
# File I/O: 8-bit PGM (binary P5) and 8-bit gray/RGB PNG.
# ---------------------------------------------------------------------------


def load_image(path) -> np.ndarray:
    """Load an 8-bit PNG or binary PGM file as a float64 grayscale image.

    RGB input is reduced to luminance with Rec.601 weights
    (0.299 R + 0.587 G + 0.114 B).
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read image file {path}: {exc}") from exc
    if raw[:8] == _PNG_SIGNATURE:
        return _decode_png(raw, str(path))
    if raw[:2] == b"P5":
        return _decode_pgm(raw, str(path))
    raise ImageFormatError(
        f"{path}: unsupported file format (expected PNG or binary PGM P5)"
    )


def save_pgm(img, path) -> None:
    """Write an image to binary PGM (P5), rounding and clamping to [0, 255]."""
    img = as_image(img)
    data = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def _decode_pgm(raw: bytes, path: str) -> np.ndarray:
    # Header: "P5" <ws> width <ws> height <ws> maxval <single ws> data,
    # with '#' comments allowed between tokens.
    pos = 2
    tokens = []
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: truncated PGM header")
        tokens.append(raw[start:pos])
    pos += 1  # single whitespace byte after maxval
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ImageFormatError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: invalid PGM dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(
            f"{path}: unsupported PGM maxval {maxval} (only 8-bit, maxval 255)"
        )
    data = raw[pos : pos + width * height]
    if len(data) != width * height:
        raise ImageFormatError(f"{path}: truncated PGM pixel data")
    return (
        np.frombuffer(data, dtype=np.uint8)
        .reshape(height, width)
        .astype(np.float64)
    )


def _decode_png(raw: bytes, path: str) -> np.ndarray:
    try:
        chunks = list(_iter_png_chunks(raw))
    except (struct.error, IndexError):
        raise ImageFormatError(f"{path}: truncated PNG file") from None
    if not chunks or chunks[0][0] != b"IHDR":
        raise ImageFormatError(f"{path}: missing PNG IHDR chunk")
    ihdr = chunks[0][1]
    if len(ihdr) != 13:
        raise ImageFormatError(f"{path}: malformed PNG IHDR chunk")
    width, height, bit_depth, color_type, _comp, _filt, interlace = struct.unpack(
        ">IIBBBBB", ihdr
    )
    if bit_depth != 8:
        raise ImageFormatError(f"{path}: unsupported PNG bit depth {bit_depth}")
    if color_type not in (0, 2):
        raise ImageFormatError(
            f"{path}: unsupported PNG color type {color_type} "
            "(only grayscale (0) and RGB (2))"
        )
    if interlace != 0:
        raise ImageFormatError(f"{path}: interlaced PNG is not supported")
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: invalid PNG dimensions {width}x{height}")
    idat = b"".join(data for ctype, data in chunks if ctype == b"IDAT")
    if not idat:
        raise ImageFormatError(f"{path}: PNG has no IDAT data")
    try:
        decompressed = zlib.decompress(idat)
    except zlib.error:
        raise ImageFormatError(f"{path}: corrupt PNG pixel stream") from None
    channels = 1 if color_type == 0 else 3
    stride = width * channels
    if len(decompressed) != (stride + 1) * height:
        raise ImageFormatError(f"{path}: truncated PNG pixel data")
    pixels = _unfilter_scanlines(decompressed, height, stride, channels, path)
    if channels == 1:
        gray = pixels.reshape(height, width).astype(np.float64)
    else:
        rgb = pixels.reshape(height, width, 3).astype(np.float64)
        gray = _LUMA_R * rgb[:, :, 0] + _LUMA_G * rgb[:, :, 1] + _LUMA_B * rgb[:, :, 2]
    return gray


def _iter_png_chunks(raw: bytes):
    pos = 8
    while pos < len(raw):
        (length,) = struct.unpack(">I", raw[pos : pos + 4])
        ctype = raw[pos + 4 : pos + 8]
        if len(ctype) != 4:
            raise IndexError("truncated chunk header")
        data = raw[pos + 8 : pos + 8 + length]
        if len(data) != length:
            raise IndexError("truncated chunk payload")
        yield ctype, data
        pos += 12 + length  # length + type + data + CRC
        if ctype == b"IEND":
            return


def _unfilter_scanlines(
    stream: bytes, height: int, stride: int, bpp: int, path: str
) -> np.ndarray:
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(height):
        row_start = y * (stride + 1)
        ftype = stream[row_start]
        raw = np.frombuffer(
            stream, dtype=np.uint8, count=stride, offset=row_start + 1
        ).copy()
        if ftype == 0:  # None
            recon = raw
        elif ftype == 1:  # Sub
            recon = raw
            for x in range(bpp, stride):
                recon[x] = (int(recon[x]) + int(recon[x - bpp])) & 0xFF
        elif ftype == 2:  # Up
            recon = raw + prev
        elif ftype == 3:  # Average
            recon = raw
            for x in range(stride):
                left = int(recon[x - bpp]) if x >= bpp else 0
                recon[x] = (int(recon[x]) + (left + int(prev[x])) // 2) & 0xFF
        elif ftype == 4:  # Paeth
            recon = raw
            for x in range(stride):
                left = int(recon[x - bpp]) if x >= bpp else 0
                up = int(prev[x])
                ul = int(prev[x - bpp]) if x >= bpp else 0
                recon[x] = (int(recon[x]) + _paeth(left, up, ul)) & 0xFF
        else:
            raise ImageFormatError(f"{path}: unknown PNG filter type {ftype}")
        out[y] = recon
        prev = recon
    return out


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c
