"""Multi-exposure fusion: Retinex split, dual illumination weighting,
reflectance saliency weighting, and joint pyramid blending.

Illumination and reflectance streams are fused separately (Laplacian
pyramids of the layers against Gaussian pyramids of their weights) and
recombined multiplicatively into the pre-fusion image.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .imgcore.filters import gradient_magnitude, guided_filter
from .imgcore.pyramid import build_pyramids, gaussian_pyramid, max_levels, reconstruct_laplacian

L_FLOOR = 1e-4
HIST_BINS = 256
HIST_SMOOTH_SIGMA = 2.0
SLOPE_FLOOR = 1e-6


@dataclass
class RetinexPair:
    """Illumination (floored to (0, 1]) and reflectance with L * R = source."""

    illumination: np.ndarray
    reflectance: np.ndarray


@dataclass
class WeightStack:
    """K non-negative maps normalized to the per-pixel simplex."""

    maps: np.ndarray  # (K, H, W)

    def __post_init__(self):
        m = np.asarray(self.maps, dtype=np.float64)
        if m.ndim != 3:
            raise ValueError(f"weight maps must be (K, H, W), got {m.shape}")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ValueError("weights must be finite and non-negative")
        self.maps = m

    @property
    def k(self):
        return self.maps.shape[0]


def _normalize_simplex(maps):
    total = maps.sum(axis=0, keepdims=True)
    k = maps.shape[0]
    out = np.where(total > 1e-12, maps / np.where(total > 1e-12, total, 1.0), 1.0 / k)
    return WeightStack(out)


def retinex_decompose(img, radius=15, eps=1e-3):
    """Split into illumination (edge-aware smooth, floored) and reflectance."""
    img = np.asarray(img, dtype=np.float64)
    lum = np.clip(guided_filter(img, img, radius, eps), L_FLOOR, 1.0)
    return RetinexPair(illumination=lum, reflectance=img / lum)


def _cdf_slope_lut(lum):
    """Slope of the smoothed cumulative histogram per intensity bin."""
    hist, _ = np.histogram(lum, bins=HIST_BINS, range=(0.0, 1.0))
    dens = gaussian_filter1d(hist.astype(np.float64), HIST_SMOOTH_SIGMA, mode="nearest")
    dens /= max(dens.sum(), 1e-12)
    cdf = np.cumsum(dens)
    pad = np.concatenate([[cdf[0]], cdf, [cdf[-1]]])
    slope = (pad[2:] - pad[:-2]) / 2.0 * HIST_BINS
    return np.maximum(slope, SLOPE_FLOOR)


def illumination_weights(lums, regions=None, sigma_w=0.2, eps=1e-6):
    """Dual illumination weights: inverse histogram-slope rarity times a
    region-adapted well-exposedness bump, normalized to the simplex.

    The per-region target u pulls mid-gray halfway toward the region's
    own mean brightness in that channel.
    """
    if len(lums) == 0:
        raise ValueError("no illumination maps")
    if sigma_w <= 0:
        raise ValueError(f"sigma_w must be positive, got {sigma_w}")
    lums = np.asarray(lums, dtype=np.float64)
    k, h, w = lums.shape

    w1 = np.empty_like(lums)
    for i in range(k):
        lut = _cdf_slope_lut(lums[i])
        bins = np.clip((lums[i] * HIST_BINS).astype(np.int64), 0, HIST_BINS - 1)
        w1[i] = 1.0 / lut[bins]
    w1 = w1 / (w1.sum(axis=0, keepdims=True) + eps)

    w2 = np.empty_like(lums)
    for i in range(k):
        target = np.full((h, w), 0.5)
        if regions is not None:
            for lab in range(1, regions.m + 1):
                mask = regions.labels == lab
                if mask.any():
                    target[mask] = 0.5 * (0.5 + float(lums[i][mask].mean()))
        else:
            target[:] = 0.5 * (0.5 + float(lums[i].mean()))
        w2[i] = np.exp(-((lums[i] - target) ** 2) / (2.0 * sigma_w * sigma_w))

    return _normalize_simplex(w1 * w2)


def reflectance_weights(refls, radius=8, eps=1e-4):
    """Gradient-saliency weights smoothed by guided filtering on each layer."""
    refls = np.asarray(refls, dtype=np.float64)
    sal = np.empty_like(refls)
    for i, r in enumerate(refls):
        sal[i] = np.maximum(guided_filter(gradient_magnitude(r), r, radius, eps), 0.0)
    return _normalize_simplex(sal)


def _fuse_decomposed(lums, refls, w_l, w_r, levels):
    fused_l = None
    fused_r = None
    for lum, refl, wl, wr in zip(lums, refls, w_l.maps, w_r.maps):
        _, lap_l = build_pyramids(lum, levels)
        _, lap_r = build_pyramids(refl, levels)
        g_wl = gaussian_pyramid(wl, levels)
        g_wr = gaussian_pyramid(wr, levels)
        terms_l = [a * b for a, b in zip(lap_l.levels, g_wl.levels)]
        terms_r = [a * b for a, b in zip(lap_r.levels, g_wr.levels)]
        if fused_l is None:
            fused_l, fused_r = terms_l, terms_r
        else:
            fused_l = [acc + t for acc, t in zip(fused_l, terms_l)]
            fused_r = [acc + t for acc, t in zip(fused_r, terms_r)]
    from .imgcore.pyramid import Pyramid
    lum_hat = reconstruct_laplacian(Pyramid(fused_l, "laplacian"), clamp=False)
    refl_hat = reconstruct_laplacian(Pyramid(fused_r, "laplacian"), clamp=False)
    return np.clip(lum_hat * refl_hat, 0.0, 1.0)


def pyramid_fuse(stack, w_l, w_r, levels, retinex_radius=15, retinex_eps=1e-3):
    """Fuse an exposure stack with given illumination/reflectance weights."""
    if w_l.k != stack.k or w_r.k != stack.k:
        raise ValueError("weight stacks must match the exposure count")
    if w_l.maps.shape[1:] != stack.shape or w_r.maps.shape[1:] != stack.shape:
        raise ValueError("weight map dimensions must match the stack")
    pairs = [retinex_decompose(c, retinex_radius, retinex_eps) for c in stack.channels]
    lums = [p.illumination for p in pairs]
    refls = [p.reflectance for p in pairs]
    return _fuse_decomposed(lums, refls, w_l, w_r, levels)


def fuse_mef(stack, regions=None, levels=None, sigma_w=0.2,
             retinex_radius=15, retinex_eps=1e-3, saliency_radius=8, saliency_eps=1e-4):
    """Full MEF stage: Retinex, both weight stacks, pyramid fusion.

    Returns (pre-fusion image, dict of intermediates).
    """
    if levels is None:
        levels = min(5, max_levels(stack.shape))
    pairs = [retinex_decompose(c, retinex_radius, retinex_eps) for c in stack.channels]
    lums = np.stack([p.illumination for p in pairs])
    refls = np.stack([p.reflectance for p in pairs])
    w_l = illumination_weights(lums, regions, sigma_w=sigma_w)
    w_r = reflectance_weights(refls, radius=saliency_radius, eps=saliency_eps)
    pre = _fuse_decomposed(lums, refls, w_l, w_r, levels)
    return pre, {"w_illum": w_l, "w_refl": w_r, "illumination": lums, "reflectance": refls}
