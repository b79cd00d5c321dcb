"""Gaussian/Laplacian pyramids (5-tap binomial kernel, replicate borders)."""

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve1d

_KERNEL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


@dataclass
class Pyramid:
    """Ordered levels, finest first; each level has ceil(prev/2) dimensions."""

    levels: list = field(default_factory=list)
    kind: str = "gaussian"  # "gaussian" | "laplacian"

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, i):
        return self.levels[i]


def _blur(img):
    out = convolve1d(img, _KERNEL5, axis=0, mode="nearest")
    return convolve1d(out, _KERNEL5, axis=1, mode="nearest")


def _downsample(img):
    return _blur(img)[::2, ::2]


def _upsample(img, shape):
    # Zero-insert at even positions, smooth with the doubled kernel, then
    # renormalize by the gathered sample weight so borders keep unit mass.
    up = np.zeros(shape, dtype=np.float64)
    wgt = np.zeros(shape, dtype=np.float64)
    up[::2, ::2] = img
    wgt[::2, ::2] = 1.0
    k2 = _KERNEL5 * 2.0
    for arr in (up, wgt):
        arr[:] = convolve1d(arr, k2, axis=0, mode="constant", cval=0.0)
        arr[:] = convolve1d(arr, k2, axis=1, mode="constant", cval=0.0)
    return up / wgt


def max_levels(shape):
    """Largest valid level count for an image: 2^(levels-1) <= min(h, w)."""
    return int(np.floor(np.log2(min(shape)))) + 1


def build_pyramids(img, levels):
    """Build the Gaussian pyramid and its Laplacian counterpart.

    Laplacian level l is gaussian[l] - upsample(gaussian[l+1]); the last
    level is the Gaussian residual, so `reconstruct_laplacian` inverts the
    decomposition exactly (up to float rounding).
    """
    img = np.asarray(img, dtype=np.float64)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if 2 ** (levels - 1) > min(img.shape):
        raise ValueError(f"{levels} levels too many for image of shape {img.shape}")
    gauss = [img]
    for _ in range(levels - 1):
        gauss.append(_downsample(gauss[-1]))
    lap = [gauss[l] - _upsample(gauss[l + 1], gauss[l].shape) for l in range(levels - 1)]
    lap.append(gauss[-1].copy())
    return Pyramid(gauss, "gaussian"), Pyramid(lap, "laplacian")


def reconstruct_laplacian(pyr, clamp=True):
    """Collapse a Laplacian pyramid coarse-to-fine (optionally clamp to [0,1])."""
    if pyr.kind != "laplacian":
        raise ValueError(f"expected a laplacian pyramid, got kind={pyr.kind!r}")
    if len(pyr.levels) == 0:
        raise ValueError("empty pyramid")
    out = pyr.levels[-1]
    for lvl in reversed(pyr.levels[:-1]):
        out = lvl + _upsample(out, lvl.shape)
    return np.clip(out, 0.0, 1.0) if clamp else out


def gaussian_pyramid(img, levels):
    return build_pyramids(img, levels)[0]
