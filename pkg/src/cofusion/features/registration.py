"""Robust transform estimation from matched point pairs (seeded RANSAC)."""

import numpy as np

from ..errors import NumericError
from ..imgcore.warp import Transform2D

_MIN_PAIRS = {"homography": 4, "affine": 3}


def _normalize_pts(pts):
    centroid = pts.mean(axis=0)
    d = np.sqrt(((pts - centroid) ** 2).sum(axis=1)).mean()
    s = np.sqrt(2.0) / max(d, 1e-12)
    t = np.array([[s, 0.0, -s * centroid[0]],
                  [0.0, s, -s * centroid[1]],
                  [0.0, 0.0, 1.0]])
    return (pts - centroid) * s, t


def fit_homography(src, dst):
    """Normalized DLT; works for 4 exact pairs or overdetermined sets."""
    sn, ts = _normalize_pts(src)
    dn, td = _normalize_pts(dst)
    rows = []
    for (x, y), (u, v) in zip(sn, dn):
        rows.append([-x, -y, -1, 0, 0, 0, u * x, u * y, u])
        rows.append([0, 0, 0, -x, -y, -1, v * x, v * y, v])
    _, _, vt = np.linalg.svd(np.asarray(rows))
    hn = vt[-1].reshape(3, 3)
    h = np.linalg.inv(td) @ hn @ ts
    if abs(h[2, 2]) < 1e-12 or abs(np.linalg.det(h)) < 1e-12:
        raise NumericError("homography fit is singular")
    return Transform2D(h)


def fit_affine(src, dst):
    a = np.column_stack([src, np.ones(len(src))])
    coef, _, rank, _ = np.linalg.lstsq(a, dst, rcond=None)
    if rank < 3:
        raise NumericError("affine fit is rank-deficient")
    m = np.eye(3)
    m[0, :] = coef[:, 0]
    m[1, :] = coef[:, 1]
    return Transform2D(m)


def _has_collinear_triple(pts):
    n = len(pts)
    scale = max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]), 1.0)
    tol = 1e-8 * scale * scale
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                ab = pts[j] - pts[i]
                ac = pts[k] - pts[i]
                if abs(ab[0] * ac[1] - ab[1] * ac[0]) <= tol:
                    return True
    return False


def reprojection_errors(t, src, dst):
    return np.sqrt(((t.apply(src) - dst) ** 2).sum(axis=1))


def estimate_transform(src_pts, dst_pts, model="homography",
                       inlier_px=2.0, iterations=2000, seed=0):
    """Seeded RANSAC with a final least-squares refit on the inliers.

    Returns (Transform2D, inlier mask).  Degenerate (collinear) minimal
    samples are rejected and resampled; raises NumericError when there
    are too few pairs or no non-degenerate model can be found.
    """
    src = np.asarray(src_pts, dtype=np.float64).reshape(-1, 2)
    dst = np.asarray(dst_pts, dtype=np.float64).reshape(-1, 2)
    if model not in _MIN_PAIRS:
        raise ValueError(f"model must be homography or affine, got {model!r}")
    need = _MIN_PAIRS[model]
    n = len(src)
    if n != len(dst) or n < need:
        raise NumericError(f"{model} needs >= {need} pairs, got {n}")
    fit = fit_homography if model == "homography" else fit_affine

    rng = np.random.default_rng(seed)
    best_mask = None
    best_score = (-1, np.inf)
    for _ in range(iterations):
        idx = rng.choice(n, size=need, replace=False)
        if _has_collinear_triple(src[idx]) or _has_collinear_triple(dst[idx]):
            continue
        try:
            cand = fit(src[idx], dst[idx])
        except NumericError:
            continue
        err = reprojection_errors(cand, src, dst)
        mask = err < inlier_px
        count = int(mask.sum())
        if count < need:
            continue
        score = (count, float(err[mask].mean()))
        if score[0] > best_score[0] or (score[0] == best_score[0] and score[1] < best_score[1]):
            best_score = (score[0], score[1])
            best_mask = mask
    if best_mask is None:
        raise NumericError("no non-degenerate RANSAC sample found (collinear input?)")

    refit = fit(src[best_mask], dst[best_mask])
    final_mask = reprojection_errors(refit, src, dst) < inlier_px
    return refit, final_mask
