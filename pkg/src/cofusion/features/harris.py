"""Multi-scale Harris corner detection with sub-pixel refinement."""

import numpy as np
from scipy.ndimage import gaussian_filter, maximum_filter

from ..imgcore.filters import central_gradient
from ..imgcore.pyramid import gaussian_pyramid


def harris_response(img, k=0.04, window_sigma=1.5):
    """det(M) - k * trace(M)^2 of the Gaussian-windowed structure tensor."""
    gx, gy = central_gradient(np.asarray(img, dtype=np.float64))
    sxx = gaussian_filter(gx * gx, window_sigma, mode="nearest")
    syy = gaussian_filter(gy * gy, window_sigma, mode="nearest")
    sxy = gaussian_filter(gx * gy, window_sigma, mode="nearest")
    return sxx * syy - sxy * sxy - k * (sxx + syy) ** 2


def _subpixel_offset(r, y, x):
    # quadratic fit on the 3x3 neighborhood of a response peak
    gx = (r[y, x + 1] - r[y, x - 1]) / 2.0
    gy = (r[y + 1, x] - r[y - 1, x]) / 2.0
    hxx = r[y, x + 1] - 2.0 * r[y, x] + r[y, x - 1]
    hyy = r[y + 1, x] - 2.0 * r[y, x] + r[y - 1, x]
    hxy = (r[y + 1, x + 1] - r[y + 1, x - 1] - r[y - 1, x + 1] + r[y - 1, x - 1]) / 4.0
    det = hxx * hyy - hxy * hxy
    if abs(det) < 1e-18:
        return 0.0, 0.0
    ox = -(hyy * gx - hxy * gy) / det
    oy = -(hxx * gy - hxy * gx) / det
    if abs(ox) > 1.0 or abs(oy) > 1.0:
        return 0.0, 0.0
    return ox, oy


def detect_harris(img, levels=1, k=0.04, rel_threshold=0.01, exposure=0):
    """Detect Harris corners on a Gaussian pyramid.

    Keeps 3x3 local maxima whose response reaches `rel_threshold` times
    the level maximum, refined to sub-pixel by a quadratic fit.  Feature
    coordinates are expressed at their own pyramid level.
    """
    from .types import Feature, FeatureSet

    img = np.asarray(img, dtype=np.float64)
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError(f"rel_threshold must be in (0, 1), got {rel_threshold}")
    pyr = gaussian_pyramid(img, levels)  # validates level count vs size
    feats = []
    for lvl, level_img in enumerate(pyr.levels):
        if min(level_img.shape) < 3:
            continue
        r = harris_response(level_img, k=k)
        rmax = float(r.max())
        if rmax <= 0.0:
            continue
        thresh = rel_threshold * rmax
        peaks = (r >= thresh) & (r == maximum_filter(r, size=3, mode="nearest"))
        peaks[0, :] = peaks[-1, :] = False
        peaks[:, 0] = peaks[:, -1] = False
        ys, xs = np.nonzero(peaks)
        for y, x in zip(ys.tolist(), xs.tolist()):
            ox, oy = _subpixel_offset(r, y, x)
            feats.append(Feature(x=x + ox, y=y + oy, level=lvl,
                                 exposure=exposure, response=float(r[y, x])))
    feats.sort(key=lambda f: (-f.response, f.level, f.x, f.y))
    return FeatureSet(feats, width=img.shape[1], height=img.shape[0])


def detect_stack(stack, levels=1, k=0.04, rel_threshold=0.01):
    """Per-exposure Harris detection; returns one FeatureSet per channel."""
    return [detect_harris(chan, levels=levels, k=k, rel_threshold=rel_threshold, exposure=i)
            for i, chan in enumerate(stack.channels)]
