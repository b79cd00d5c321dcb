"""Fusion-quality metrics: AG, MI, PSNR, MEF-SSIM, histogram entropy.

The symmetric two-source forms of MI and PSNR follow the conventions of
the fusion literature; VIFF and NIQE need fitted natural-scene models
and are deliberately not computed (their report fields stay null).
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

PSNR_CAP_DB = 100.0
SSIM_C2 = 0.03 ** 2


@dataclass
class MetricReport:
    values: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    def to_json(self, path=None):
        payload = json.dumps(asdict(self), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(payload + "\n")
        return payload


def avg_gradient(img):
    """Mean of sqrt((Ix^2 + Iy^2) / 2) over forward differences, 8-bit scale."""
    img = np.asarray(img, dtype=np.float64)
    if img.shape[0] < 2 or img.shape[1] < 2:
        raise ValueError(f"image too small for gradients: {img.shape}")
    ix = (img[:-1, 1:] - img[:-1, :-1]) * 255.0
    iy = (img[1:, :-1] - img[:-1, :-1]) * 255.0
    return float(np.mean(np.sqrt((ix * ix + iy * iy) / 2.0)))


def entropy(img, bins=256):
    """Shannon entropy of the intensity histogram, in bits."""
    hist, _ = np.histogram(np.asarray(img, dtype=np.float64), bins=bins, range=(0.0, 1.0))
    p = hist.astype(np.float64) / max(hist.sum(), 1)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _mi_pair(x, y, bins):
    joint, _, _ = np.histogram2d(x.ravel(), y.ravel(), bins=bins,
                                 range=[[0.0, 1.0], [0.0, 1.0]])
    pxy = joint / joint.sum()
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    nz = pxy > 0
    return float((pxy[nz] * np.log(pxy[nz] / (px @ py)[nz])).sum() / np.log(2.0))


def mutual_information(fused, src_a, src_b, bins=256):
    """MI(fused; A) + MI(fused; B) in bits from joint histograms."""
    fused, src_a, src_b = (np.asarray(v, dtype=np.float64) for v in (fused, src_a, src_b))
    if fused.shape != src_a.shape or fused.shape != src_b.shape:
        raise ValueError("metric inputs must share dimensions")
    return _mi_pair(fused, src_a, bins) + _mi_pair(fused, src_b, bins)


def _psnr_pair(x, y):
    mse = float(np.mean((x - y) ** 2))
    if mse <= 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(1.0 / mse), PSNR_CAP_DB)


def psnr(fused, src_a, src_b):
    """Mean of the two single-source PSNRs (peak 1.0), capped at 100 dB."""
    fused, src_a, src_b = (np.asarray(v, dtype=np.float64) for v in (fused, src_a, src_b))
    if fused.shape != src_a.shape or fused.shape != src_b.shape:
        raise ValueError("metric inputs must share dimensions")
    return (_psnr_pair(fused, src_a) + _psnr_pair(fused, src_b)) / 2.0


def mef_ssim(stack, fused, window=8, band_rows=64):
    """Structural fidelity of `fused` against the desired patch statistics
    of a multi-exposure stack.

    Per sliding window: each source patch splits into mean, contrast
    (vector norm) and unit structure; the desired patch has the maximum
    contrast and the contrast-weighted (renormalized) mean structure.
    The score is the mean-free structural similarity term, averaged over
    all windows.
    """
    fused = np.asarray(fused, dtype=np.float64)
    h, w = fused.shape
    if window > min(h, w):
        raise ValueError(f"window {window} larger than image {fused.shape}")
    if stack.shape != fused.shape:
        raise ValueError("stack and fused image dimensions differ")
    n = window * window
    rows_total = h - window + 1
    cols_total = w - window + 1

    total = 0.0
    count = 0
    for y0 in range(0, rows_total, band_rows):
        y1 = min(y0 + band_rows, rows_total)
        views = []
        for chan in stack.channels:
            v = np.lib.stride_tricks.sliding_window_view(chan, (window, window))
            views.append(v[y0:y1].reshape(-1, n))
        fv = np.lib.stride_tricks.sliding_window_view(fused, (window, window))
        fv = fv[y0:y1].reshape(-1, n)

        c_max = None
        s_sum = None
        for v in views:
            tilde = v - v.mean(axis=1, keepdims=True)
            c = np.linalg.norm(tilde, axis=1)
            c_max = c if c_max is None else np.maximum(c_max, c)
            s_sum = tilde if s_sum is None else s_sum + tilde
        s_norm = np.linalg.norm(s_sum, axis=1, keepdims=True)
        desired = np.where(s_norm > 1e-12, s_sum / np.where(s_norm > 1e-12, s_norm, 1.0), 0.0)
        desired = desired * c_max[:, None]

        f_tilde = fv - fv.mean(axis=1, keepdims=True)
        var_d = (desired * desired).sum(axis=1) / n
        var_f = (f_tilde * f_tilde).sum(axis=1) / n
        cov = (desired * f_tilde).sum(axis=1) / n
        score = (2.0 * cov + SSIM_C2) / (var_d + var_f + SSIM_C2)
        total += float(score.sum())
        count += score.size
    return total / count


def build_report(fused, src_a, src_b, stack=None, bins=256, window=8,
                 inputs=None):
    """Assemble the metric report; VIFF/NIQE fields are reserved as null."""
    values = {
        "ag": avg_gradient(fused),
        "mi": mutual_information(fused, src_a, src_b, bins=bins),
        "psnr": psnr(fused, src_a, src_b),
        "mef_ssim": mef_ssim(stack, fused, window=window) if stack is not None else None,
        "viff": None,
        "niqe": None,
    }
    params = {"mi_bins": bins, "mef_ssim_window": window, "psnr_peak": 1.0,
              "psnr_cap_db": PSNR_CAP_DB}
    return MetricReport(values=values, params=params, inputs=inputs or {})
