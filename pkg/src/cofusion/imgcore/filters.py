"""Box statistics, guided filtering and gradient helpers."""

import numpy as np


def box_sum(img, radius):
    """Sum over (2*radius+1)^2 windows clipped at the image border."""
    h, w = img.shape
    c = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(np.cumsum(img, axis=0), axis=1, out=c[1:, 1:])
    y0 = np.clip(np.arange(h) - radius, 0, h)
    y1 = np.clip(np.arange(h) + radius + 1, 0, h)
    x0 = np.clip(np.arange(w) - radius, 0, w)
    x1 = np.clip(np.arange(w) + radius + 1, 0, w)
    return (c[np.ix_(y1, x1)] - c[np.ix_(y0, x1)]
            - c[np.ix_(y1, x0)] + c[np.ix_(y0, x0)])


def box_count(shape, radius):
    """Pixel count of each clipped window (denominator for box means)."""
    return box_sum(np.ones(shape, dtype=np.float64), radius)


def guided_filter(src, guide, radius, eps, eps_map=None):
    """Edge-preserving smoothing of `src` by a local linear model on `guide`.

    Box-window statistics with windows clipped at the border.  `eps_map`
    optionally replaces the scalar regularizer with a per-pixel map
    (edge-aware variant).  `radius` 0 is an exact pass-through.
    """
    src = np.asarray(src, dtype=np.float64)
    guide = np.asarray(guide, dtype=np.float64)
    if src.shape != guide.shape:
        raise ValueError(f"src {src.shape} and guide {guide.shape} differ")
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return src.copy()
    if eps_map is None:
        if eps <= 0:
            raise ValueError(f"eps must be positive, got {eps}")
        reg = eps
    else:
        reg = np.asarray(eps_map, dtype=np.float64)
        if reg.shape != src.shape:
            raise ValueError("eps_map shape mismatch")

    n = box_count(src.shape, radius)
    mean_g = box_sum(guide, radius) / n
    mean_s = box_sum(src, radius) / n
    cov_gs = box_sum(guide * src, radius) / n - mean_g * mean_s
    var_g = box_sum(guide * guide, radius) / n - mean_g * mean_g

    a = cov_gs / (var_g + reg)
    b = mean_s - a * mean_g
    mean_a = box_sum(a, radius) / n
    mean_b = box_sum(b, radius) / n
    return mean_a * guide + mean_b


def central_gradient(img):
    """Central-difference gradients (gx, gy) with replicate borders."""
    p = np.pad(img, 1, mode="edge")
    gx = (p[1:-1, 2:] - p[1:-1, :-2]) * 0.5
    gy = (p[2:, 1:-1] - p[:-2, 1:-1]) * 0.5
    return gx, gy


def gradient_magnitude(img):
    gx, gy = central_gradient(img)
    return np.sqrt(gx * gx + gy * gy)


def forward_gradient_periodic(img):
    """Forward differences with wraparound; adjoint of -divergence below."""
    gx = np.roll(img, -1, axis=1) - img
    gy = np.roll(img, -1, axis=0) - img
    return gx, gy


def divergence_periodic(gx, gy):
    """Discrete divergence matching `forward_gradient_periodic` (= -grad^T)."""
    dx = gx - np.roll(gx, 1, axis=1)
    dy = gy - np.roll(gy, 1, axis=0)
    return dx + dy
