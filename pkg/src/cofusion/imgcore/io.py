"""Image I/O.

Grayscale images are 2-D float64 arrays, color images are H x W x 3 (RGB),
both in [0, 1].  Supported formats: binary PGM/PPM (8/16-bit) via a small
built-in codec, PNG (8/16-bit, gray and RGB) via OpenCV.
"""

import os
import re

import cv2
import numpy as np

from ..errors import CorruptImageError, UnsupportedFormatError

_PNM_EXTS = {".pgm", ".ppm", ".pnm"}
_PNG_EXTS = {".png"}


def _read_pnm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    m = re.match(rb"(P[56])\s+(?:#[^\n]*\n\s*)*(\d+)\s+(\d+)\s+(\d+)\s", data)
    if m is None:
        raise CorruptImageError(f"{path}: not a binary PGM/PPM file")
    magic, width, height, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    channels = 3 if magic == b"P6" else 1
    if maxval <= 0 or maxval > 65535:
        raise CorruptImageError(f"{path}: invalid maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.uint8
    count = width * height * channels
    raw = np.frombuffer(data, dtype=dtype, count=-1, offset=m.end())
    if raw.size < count:
        raise CorruptImageError(f"{path}: truncated pixel data")
    img = raw[:count].astype(np.float64) / maxval
    if channels == 3:
        return img.reshape(height, width, 3)
    return img.reshape(height, width)


def _write_pnm(path, img, bit_depth):
    maxval = (1 << bit_depth) - 1
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval)
    magic = b"P6" if img.ndim == 3 else b"P5"
    h, w = img.shape[:2]
    header = magic + b"\n%d %d\n%d\n" % (w, h, maxval)
    payload = q.astype(np.dtype(">u2") if bit_depth == 16 else np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def _read_png(path):
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise CorruptImageError(f"{path}: PNG decode failed")
    if raw.dtype == np.uint8:
        img = raw.astype(np.float64) / 255.0
    elif raw.dtype == np.uint16:
        img = raw.astype(np.float64) / 65535.0
    else:
        raise CorruptImageError(f"{path}: unsupported PNG sample type {raw.dtype}")
    if img.ndim == 3:
        if img.shape[2] == 4:
            img = img[:, :, :3]
        img = img[:, :, ::-1].copy()  # BGR -> RGB
    return img


def _write_png(path, img, bit_depth):
    maxval = (1 << bit_depth) - 1
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval)
    q = q.astype(np.uint16 if bit_depth == 16 else np.uint8)
    if q.ndim == 3:
        q = q[:, :, ::-1]  # RGB -> BGR
    if not cv2.imwrite(path, q):
        raise OSError(f"{path}: PNG encode failed")


def load_image(path):
    """Load an image, scaled to [0, 1].

    Returns a 2-D array for grayscale sources and an H x W x 3 RGB array
    for color sources.  Raises FileNotFoundError, UnsupportedFormatError
    or CorruptImageError.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such image file: {path}")
    ext = os.path.splitext(path)[1].lower()
    if ext in _PNM_EXTS:
        return _read_pnm(path)
    if ext in _PNG_EXTS:
        return _read_png(path)
    raise UnsupportedFormatError(f"{path}: unsupported extension {ext!r} (use PGM/PPM/PNG)")


def save_image(img, path, bit_depth=8):
    """Write an image quantized to 8 or 16 bits (rounding to nearest).

    Values are clamped to [0, 1] first; the format is chosen from the
    file extension.
    """
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    img = np.asarray(img, dtype=np.float64)
    if img.ndim not in (2, 3) or (img.ndim == 3 and img.shape[2] != 3):
        raise ValueError(f"expected HxW or HxWx3 image, got shape {img.shape}")
    ext = os.path.splitext(path)[1].lower()
    if ext in _PNM_EXTS:
        _write_pnm(path, img, bit_depth)
    elif ext in _PNG_EXTS:
        _write_png(path, img, bit_depth)
    else:
        raise UnsupportedFormatError(f"{path}: unsupported extension {ext!r} (use PGM/PPM/PNG)")
