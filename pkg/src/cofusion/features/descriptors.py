"""Modality-robust patch description and descriptor matching.

The descriptor is a 4x4 spatial grid of 8-bin orientation histograms
taken on a smoothed symmetric log-contrast transform of the image, with
orientations folded modulo pi.  Folding plus the antisymmetric transform
make the descriptor invariant to intensity polarity inversion, which is
what survives across spectral bands.
"""

import numpy as np
from scipy.ndimage import gaussian_filter

from ..imgcore.filters import central_gradient
from ..imgcore.pyramid import gaussian_pyramid
from .types import Feature, FeatureSet

GRID = 4
ORI_BINS = 8
DIM = GRID * GRID * ORI_BINS
_LOG_EPS = 1e-2
_CLIP = 0.2


def log_contrast(img, eps=_LOG_EPS):
    """Antisymmetric log transform: T(1 - p) = -T(p) exactly."""
    p = np.asarray(img, dtype=np.float64)
    return np.log(p + eps) - np.log(1.0 + eps - p)


def _gradient_fields(img, smooth_sigma=1.5):
    t = gaussian_filter(log_contrast(img), smooth_sigma, mode="nearest")
    gx, gy = central_gradient(t)
    mag = np.sqrt(gx * gx + gy * gy)
    ori = np.mod(np.arctan2(gy, gx), np.pi)  # fold to [0, pi)
    return mag, ori


def _patch_descriptor(mag, ori, cx, cy, radius):
    size = 2 * radius + 1
    m = mag[cy - radius:cy + radius + 1, cx - radius:cx + radius + 1]
    o = ori[cy - radius:cy + radius + 1, cx - radius:cx + radius + 1]
    dyx = np.arange(size, dtype=np.float64) - radius
    win = np.exp(-(dyx[:, None] ** 2 + dyx[None, :] ** 2) / (2.0 * (0.6 * radius) ** 2))
    w = (m * win).ravel()

    # soft-assign into spatial cells (clamped) and circular orientation bins
    u = (np.arange(size, dtype=np.float64) + 0.5) / size * GRID - 0.5
    u0 = np.floor(u)
    fu = u - u0
    lo = np.clip(u0.astype(np.int64), 0, GRID - 1)
    hi = np.clip(u0.astype(np.int64) + 1, 0, GRID - 1)

    ob = o.ravel() * (ORI_BINS / np.pi)
    ob0 = np.floor(ob)
    fo = ob - ob0
    b0 = ob0.astype(np.int64) % ORI_BINS
    b1 = (b0 + 1) % ORI_BINS

    hist = np.zeros((GRID, GRID, ORI_BINS))
    ys = np.repeat(np.arange(size), size)
    xs = np.tile(np.arange(size), size)
    for yi, ywt in ((lo, 1.0 - fu), (hi, fu)):
        for xi, xwt in ((lo, 1.0 - fu), (hi, fu)):
            cell_w = w * ywt[ys] * xwt[xs]
            np.add.at(hist, (yi[ys], xi[xs], b0), cell_w * (1.0 - fo))
            np.add.at(hist, (yi[ys], xi[xs], b1), cell_w * fo)

    d = hist.ravel()
    norm = np.linalg.norm(d)
    if norm < 1e-12:
        return np.full(DIM, 1.0 / np.sqrt(DIM))
    d = np.minimum(d / norm, _CLIP)
    return d / np.linalg.norm(d)


def describe(img, features, patch_radius=12):
    """Attach descriptors to features; border features are dropped.

    Gradient fields are computed per pyramid level so multi-scale
    features are described at their own resolution.
    """
    img = np.asarray(img, dtype=np.float64)
    max_level = max((f.level for f in features), default=0)
    pyr = gaussian_pyramid(img, max_level + 1)
    fields = {}
    out = []
    for f in features:
        if f.level not in fields:
            fields[f.level] = _gradient_fields(pyr.levels[f.level])
        mag, ori = fields[f.level]
        h, w = mag.shape
        cx, cy = int(round(f.x)), int(round(f.y))
        if not (patch_radius <= cx < w - patch_radius and patch_radius <= cy < h - patch_radius):
            continue
        desc = _patch_descriptor(mag, ori, cx, cy, patch_radius)
        out.append(Feature(x=f.x, y=f.y, level=f.level, exposure=f.exposure,
                           response=f.response, descriptor=desc))
    return FeatureSet(out, width=getattr(features, "width", img.shape[1]),
                      height=getattr(features, "height", img.shape[0]))


def match(set_a, set_b, ratio_threshold=0.8):
    """Mutual nearest neighbors passing the Lowe ratio test.

    Returns (index_a, index_b) pairs; symmetric in its arguments.
    """
    if len(set_a) == 0 or len(set_b) == 0:
        return []
    da = set_a.descriptors()
    db = set_b.descriptors()
    d2 = np.maximum((da * da).sum(1)[:, None] + (db * db).sum(1)[None, :]
                    - 2.0 * da @ db.T, 0.0)
    dist = np.sqrt(d2)

    nn_b_of_a = np.argmin(dist, axis=1)
    nn_a_of_b = np.argmin(dist, axis=0)
    pairs = []
    for ia in range(len(set_a)):
        ib = int(nn_b_of_a[ia])
        if int(nn_a_of_b[ib]) != ia:
            continue
        d1 = dist[ia, ib]
        if dist.shape[1] > 1:
            row = dist[ia].copy()
            row[ib] = np.inf
            d2nd = row.min()
        else:
            d2nd = np.inf
        if d1 < ratio_threshold * d2nd:
            pairs.append((ia, ib))
    return pairs
