"""Regional perception model: four per-pixel feature maps, their weighted
combination, and histogram + Gaussian-mixture segmentation into M regions.

All features follow the 8-bit conventions of the underlying formulas, so
stack intensities are scaled by 255 internally.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import maximum_filter, minimum_filter

from .imgcore.filters import central_gradient

SCALE = 255.0
DEFAULT_WEIGHTS = (0.25, 0.25, 0.25, 0.25)


@dataclass
class PerceptionFeatures:
    """The four raw feature maps and their weighted combination."""

    bi: np.ndarray
    wc: np.ndarray
    cf: np.ndarray
    v: np.ndarray
    f: np.ndarray = None
    weights: tuple = DEFAULT_WEIGHTS


@dataclass
class RegionMap:
    """Per-pixel labels in 1..m (empty regions permitted but recorded)."""

    labels: np.ndarray
    m: int
    region_stats: list = field(default_factory=list)

    def mask(self, label):
        return self.labels == label


def brightness_deviation(stack):
    """Average brightness deviation BI; dark pixels are floored at half the
    channel mean before the deviation is taken."""
    chans = stack.channels * SCALE
    if chans.shape[0] < 1:
        raise ValueError("empty stack")
    mu = chans.mean(axis=(1, 2), keepdims=True)
    dev = np.maximum(chans, mu / 2.0) - mu
    return np.sqrt(np.sum(dev * dev, axis=0)) / stack.k


def weber_contrast(stack):
    """Average Weber contrast: gradient magnitude over local intensity + 1."""
    if stack.k < 1:
        raise ValueError("empty stack")
    acc = np.zeros(stack.shape, dtype=np.float64)
    for chan in stack.channels:
        c = chan * SCALE
        gx, gy = central_gradient(c)
        acc += np.sqrt(gx * gx + gy * gy) / (c + 1.0)
    return acc / stack.k


def contrast_feature(stack, window_radius=7):
    """Generalized multi-exposure contrast: 1 - dark channel / bright channel.

    Dark/bright channels are channel-wise min/max followed by a local
    window min/max; the bright channel is floored at 1 (8-bit scale).
    """
    if stack.k < 1:
        raise ValueError("empty stack")
    dark = stack.channels.min(axis=0) * SCALE
    bright = stack.channels.max(axis=0) * SCALE
    if window_radius > 0:
        size = 2 * window_radius + 1
        dark = minimum_filter(dark, size=size, mode="nearest")
        bright = maximum_filter(bright, size=size, mode="nearest")
    return 1.0 - dark / np.maximum(bright, 1.0)


def response_variance(stack, eps=1e-6):
    """Cross-exposure variance relative to its stabilized geometric mean.

    The geometric mean is computed as exp(mean(log(Var+1)))-1 so pixels
    with zero variance do not collapse it to zero.
    """
    if stack.k < 2:
        raise ValueError("response variance needs K >= 2 channels")
    var = np.var(stack.channels * SCALE, axis=0)
    chi = np.exp(np.mean(np.log1p(var))) - 1.0
    return (var - chi) / (chi + eps)


def _minmax(m):
    lo, hi = float(m.min()), float(m.max())
    if hi - lo < 1e-12:
        return np.zeros_like(m)
    return (m - lo) / (hi - lo)


def perception_map(features, weights=DEFAULT_WEIGHTS):
    """Blend the four maps with normalized weights.

    Each map is min-max normalized to [0, 1] first so no feature
    dominates through its natural scale.  Weights are renormalized to
    sum to 1.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (4,) or np.any(w < 0):
        raise ValueError(f"need 4 non-negative weights, got {weights}")
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    w = w / total
    maps = [_minmax(m) for m in (features.bi, features.wc, features.cf, features.v)]
    f = w[0] * maps[0] + w[1] * maps[1] + w[2] * maps[2] + w[3] * maps[3]
    features.f = f
    features.weights = tuple(w)
    return f


def compute_perception(stack, weights=DEFAULT_WEIGHTS, cf_radius=7):
    """Convenience wrapper: all four features plus the combined map."""
    feats = PerceptionFeatures(
        bi=brightness_deviation(stack),
        wc=weber_contrast(stack),
        cf=contrast_feature(stack, cf_radius),
        v=response_variance(stack) if stack.k >= 2 else np.zeros(stack.shape),
    )
    perception_map(feats, weights)
    return feats


def fit_gmm_1d(values, means, variances, weights, max_iter=50, tol=1e-6, var_floor=1e-8):
    """EM for a 1-D Gaussian mixture from a deterministic initialization.

    Returns (means, variances, weights, log-likelihood trace).  Variances
    are floored to avoid component collapse; iteration stops once the
    log-likelihood gain drops below `tol`.
    """
    x = values.reshape(-1, 1)
    mu = np.asarray(means, dtype=np.float64).copy()
    var = np.maximum(np.asarray(variances, dtype=np.float64).copy(), var_floor)
    pi = np.asarray(weights, dtype=np.float64).copy()
    pi = pi / pi.sum()
    trace = []
    for _ in range(max_iter):
        # E-step in log space for stability
        log_p = (-0.5 * (x - mu) ** 2 / var
                 - 0.5 * np.log(2.0 * np.pi * var)
                 + np.log(np.maximum(pi, 1e-300)))
        m = log_p.max(axis=1, keepdims=True)
        lse = m[:, 0] + np.log(np.exp(log_p - m).sum(axis=1))
        ll = float(lse.sum())
        if trace and ll - trace[-1] < tol:
            trace.append(ll)
            break
        trace.append(ll)
        resp = np.exp(log_p - lse[:, None])
        nk = resp.sum(axis=0)
        nz = nk > 1e-12
        mu[nz] = (resp[:, nz] * x).sum(axis=0) / nk[nz]
        var[nz] = (resp[:, nz] * (x - mu) ** 2).sum(axis=0)[nz] / nk[nz]
        var = np.maximum(var, var_floor)
        pi = np.maximum(nk, 1e-12)
        pi = pi / pi.sum()
    return mu, var, pi, trace


def segment_regions(f, m=4, refine=True, max_iter=50, tol=1e-6):
    """Two-stage segmentation of the perception map into m regions.

    Stage 1 thresholds at the m-quantiles of the value histogram; stage 2
    refines labels by max posterior of an m-component Gaussian mixture
    fitted by EM (quantile-initialized, fully deterministic).  Labels are
    numbered 1..m by ascending component mean.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    f = np.asarray(f, dtype=np.float64)
    flat = f.ravel()
    edges = np.quantile(flat, np.arange(1, m) / m)
    labels = np.digitize(flat, edges, right=True) + 1  # 1..m

    distinct = np.unique(flat)
    if refine and distinct.size >= m:
        mu, var, pi = [], [], []
        gvar = max(float(flat.var()), 1e-8)
        for lab in range(1, m + 1):
            sel = flat[labels == lab]
            if sel.size == 0:
                mu.append(float(edges[min(lab - 1, m - 2)]))
                var.append(gvar)
                pi.append(1e-6)
            else:
                mu.append(float(sel.mean()))
                var.append(max(float(sel.var()), 1e-8))
                pi.append(sel.size / flat.size)
        mu, var, pi, _ = fit_gmm_1d(flat, mu, var, pi, max_iter=max_iter, tol=tol)
        order = np.argsort(mu)
        log_p = (-0.5 * (flat[:, None] - mu[order]) ** 2 / var[order]
                 - 0.5 * np.log(2.0 * np.pi * var[order])
                 + np.log(np.maximum(pi[order], 1e-300)))
        labels = np.argmax(log_p, axis=1) + 1

    labels = labels.reshape(f.shape).astype(np.int32)
    stats = []
    for lab in range(1, m + 1):
        mask = labels == lab
        count = int(mask.sum())
        stats.append({"label": lab, "count": count,
                      "mean_f": float(f[mask].mean()) if count else None})
    return RegionMap(labels=labels, m=m, region_stats=stats)
