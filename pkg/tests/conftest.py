import struct
import sys
import zlib
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from naturals import load_photo_corpus

import qaq


@pytest.fixture(scope="session")
def photo_corpus():
    """[(name, 192x192 float64 image)] — twelve natural photographs."""
    return load_photo_corpus()


@pytest.fixture(scope="session")
def corpus_dir(photo_corpus, tmp_path_factory):
    """The photo corpus materialized as PGM files for CLI-level tests."""
    root = tmp_path_factory.mktemp("corpus")
    for name, img in photo_corpus:
        qaq.save_pgm(img, root / f"{name}.pgm")
    return root


@pytest.fixture(scope="session")
def acc_config():
    """Feature config sized for the 192 px corpus: 4x4 patch grid, mild
    sharpness cut so every image and distorted variant keeps >= 2 patches."""
    return qaq.FeatureConfig(patch_size=48, sharpness_fraction=0.5, scales=2)


@pytest.fixture(scope="session")
def pristine_model(photo_corpus, acc_config):
    feats = np.vstack([qaq.patch_features(img, acc_config) for _, img in photo_corpus])
    meta = qaq.meta_from_config(acc_config, gradient=False, sample_count=feats.shape[0])
    return qaq.fit_mvg(feats, meta=meta)


@pytest.fixture(scope="session")
def pristine_gradient_model(photo_corpus, acc_config):
    feats = np.vstack(
        [
            qaq.patch_features(qaq.spatial_gradient(img), acc_config)
            for _, img in photo_corpus
        ]
    )
    meta = qaq.meta_from_config(acc_config, gradient=True, sample_count=feats.shape[0])
    return qaq.fit_mvg(feats, meta=meta)


# ---------------------------------------------------------------------------
# Minimal PNG encoder for building file fixtures (filter 0 scanlines).
# ---------------------------------------------------------------------------


def write_png(path, array: np.ndarray) -> None:
    """Write uint8 grayscale (h, w) or RGB (h, w, 3) data as a PNG file."""
    data = np.asarray(array, dtype=np.uint8)
    if data.ndim == 2:
        color_type, channels = 0, 1
    elif data.ndim == 3 and data.shape[2] == 3:
        color_type, channels = 2, 3
    else:
        raise ValueError(f"unsupported fixture array shape {data.shape}")
    h, w = data.shape[:2]
    raw = b"".join(
        b"\x00" + data[y].tobytes() for y in range(h)
    )
    ihdr = struct.pack(">IIBBBBB", w, h, 8, color_type, 0, 0, 0)
    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(_png_chunk(b"IHDR", ihdr))
        fh.write(_png_chunk(b"IDAT", zlib.compress(raw)))
        fh.write(_png_chunk(b"IEND", b""))


def _png_chunk(ctype: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(ctype + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + ctype + payload + struct.pack(">I", crc)
