"""Exposure-adaptive feature merging.

Feature counts per region give a distribution over exposures; a spline
through the counts locates the optimal exposure; a Gaussian transfer
model turns that into per-region exposure weights which rescale Harris
responses before inter-frame and spatial maximum suppression.
"""

import warnings

import numpy as np
from scipy.interpolate import CubicSpline

from .types import ExposureWeightMatrix, FeatureSet

GAUSS_NORM = 1.0 / np.sqrt(2.0 * np.pi)


def region_of(feature, regions):
    """Region label (1-based) of a feature, looked up on the level-0 grid."""
    bx, by = feature.base_xy()
    h, w = regions.labels.shape
    px = min(max(int(round(bx)), 0), w - 1)
    py = min(max(int(round(by)), 0), h - 1)
    return int(regions.labels[py, px])


def feature_counts(sets, regions):
    """(M, K) matrix of feature counts per region and exposure."""
    k = len(sets)
    counts = np.zeros((regions.m, k), dtype=np.int64)
    for ki, fs in enumerate(sets):
        for f in fs:
            counts[region_of(f, regions) - 1, ki] += 1
    return counts


def feature_distribution(sets, regions):
    """Row-normalized feature counts; empty regions fall back to uniform."""
    counts = feature_counts(sets, regions).astype(np.float64)
    k = counts.shape[1]
    totals = counts.sum(axis=1, keepdims=True)
    out = np.full_like(counts, 1.0 / k)
    nz = totals[:, 0] > 0
    out[nz] = counts[nz] / totals[nz]
    return out


def optimal_exposure(counts, brightness, grid_step=0.01):
    """Continuous exposure index maximizing the count curve.

    Fits a natural cubic spline through (k, counts_k) and takes the
    arg-max on a dense grid over [1, K].  `brightness` (per-exposure
    region means) must be strictly monotone, confirming exposure order.
    """
    counts = np.asarray(counts, dtype=np.float64)
    k = counts.size
    if k < 2:
        raise ValueError("need at least 2 exposures")
    b = np.asarray(brightness, dtype=np.float64)
    db = np.diff(b)
    if not (np.all(db > 0) or np.all(db < 0)):
        raise ValueError(f"region brightness must be strictly monotone, got {b}")
    if np.all(counts == 0):
        warnings.warn("no features in region; optimal exposure defaults to midpoint")
        return (1.0 + k) / 2.0
    xs = np.arange(1, k + 1, dtype=np.float64)
    spline = CubicSpline(xs, counts, bc_type="natural")
    grid = np.arange(1.0, k + grid_step / 2.0, grid_step)
    grid = np.clip(grid, 1.0, float(k))
    return float(grid[np.argmax(spline(grid))])


def adaptive_weights(dist, i_opt, sigma=1.0, mode="literal"):
    """Exposure transfer weights per region.

    literal: w_m(k) = phi(k - i_opt_m), the total-probability sum as
    printed (the distribution sums to 1 and cancels).  mixture: the
    distribution survives inside the sum, w_m(k) = sum_j phi(k-j) L_m(j).
    phi is a Gaussian bump with fixed 1/sqrt(2*pi) normalization.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    dist = np.asarray(dist, dtype=np.float64)
    m, k = dist.shape
    i_opt = np.asarray(i_opt, dtype=np.float64).reshape(m)
    ks = np.arange(1, k + 1, dtype=np.float64)

    def phi(d):
        return GAUSS_NORM * np.exp(-d * d / (2.0 * sigma * sigma))

    if mode == "literal":
        w = phi(ks[None, :] - i_opt[:, None])
    elif mode == "mixture":
        w = np.zeros((m, k))
        for j in range(k):
            w += phi(ks[None, :] - (j + 1)) * dist[:, j][:, None]
    else:
        raise ValueError(f"mode must be 'literal' or 'mixture', got {mode!r}")
    return ExposureWeightMatrix(weights=w, i_opt=i_opt, sigma=sigma)


def weighted_response(feature, wm, regions):
    return wm.weights[region_of(feature, regions) - 1, feature.exposure] * feature.response


def _key(f, wr):
    # lower key wins: best weighted response, then exposure, x, y ascending
    return (-wr, f.exposure, f.x, f.y)


def merge_features(sets, wm, regions):
    """Two-stage suppression of per-exposure feature sets.

    Stage 1 keeps, per integer pixel of each pyramid level, the feature
    with the best region-weighted response across exposures.  Stage 2
    keeps a survivor only if it beats every stage-1 survivor within its
    3x3 neighborhood.  Ties break lexicographically by (exposure, x, y).
    Output is sorted by descending weighted response.
    """
    width = max((fs.width for fs in sets), default=0)
    height = max((fs.height for fs in sets), default=0)

    bins = {}
    for fs in sets:
        for f in fs:
            wr = weighted_response(f, wm, regions)
            cell = (f.level, int(round(f.x)), int(round(f.y)))
            cur = bins.get(cell)
            if cur is None or _key(f, wr) < _key(cur[0], cur[1]):
                bins[cell] = (f, wr)

    kept = []
    for (lvl, px, py), (f, wr) in bins.items():
        best = True
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                other = bins.get((lvl, px + dx, py + dy))
                if other is not None and _key(other[0], other[1]) < _key(f, wr):
                    best = False
                    break
            if not best:
                break
        if best:
            kept.append((f, wr))

    kept.sort(key=lambda t: _key(t[0], t[1]))
    return FeatureSet([f for f, _ in kept], width=width, height=height)
