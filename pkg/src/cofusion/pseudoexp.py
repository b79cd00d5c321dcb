"""Single-exposure extension: gamma-generated pseudo exposure stacks and
luminance/color recombination."""

from dataclasses import dataclass

import numpy as np

from .sve import ExposureStack

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
DEFAULT_RANGE = (0.8, 1.4)
RATIO_CAP = 4.0
LUMA_FLOOR = 1e-4


@dataclass(frozen=True)
class GammaSpec:
    """Ascending gamma exponents and a gain for the power-law channels."""

    gammas: tuple = (0.8, 1.0, 1.2, 1.4)
    alpha: float = 1.0

    def __post_init__(self):
        if len(self.gammas) == 0:
            raise ValueError("gamma list must not be empty")
        if any(g <= 0 for g in self.gammas) or self.alpha <= 0:
            raise ValueError("gamma values and alpha must be positive")
        object.__setattr__(self, "gammas", tuple(sorted(float(g) for g in self.gammas)))


def luminance(rgb):
    """Rec.601 luma of an RGB image in [0, 1]."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected HxWx3 image, got {rgb.shape}")
    r, g, b = LUMA_WEIGHTS
    return r * rgb[:, :, 0] + g * rgb[:, :, 1] + b * rgb[:, :, 2]


def gamma_stack(y, spec=GammaSpec()):
    """Pseudo multi-exposure stack: channel j = clamp(alpha * y^gamma_j).

    Ascending gamma on [0, 1] inputs yields brightest-first channel order.
    """
    y = np.asarray(y, dtype=np.float64)
    chans = [np.clip(spec.alpha * np.power(y, g), 0.0, 1.0) for g in spec.gammas]
    return ExposureStack(np.stack(chans), exposures=spec.gammas)


def select_gammas(y, lo=DEFAULT_RANGE[0], hi=DEFAULT_RANGE[1], count=4,
                  dark_threshold=0.3, bright_threshold=0.6, alpha=1.0):
    """Mean-luminance rule for picking gamma exponents.

    Bright scenes sample at and above the identity exponent (highlight
    suppression), dark scenes at and below it, mid scenes span the whole
    range evenly.
    """
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    if not 0 < lo < hi:
        raise ValueError(f"invalid gamma range ({lo}, {hi})")
    mean = float(np.asarray(y, dtype=np.float64).mean())
    if mean > bright_threshold:
        gammas = np.linspace(max(lo, 1.0), hi, count)
    elif mean < dark_threshold:
        gammas = np.linspace(lo, min(hi, 1.0), count)
    else:
        gammas = np.linspace(lo, hi, count)
    return GammaSpec(gammas=tuple(gammas), alpha=alpha)


def recombine_color(y_fused, original):
    """Scale RGB channels by the fused/original luminance ratio (hue kept).

    The ratio is floored against near-zero luminance and capped so deep
    shadows cannot explode.
    """
    y_fused = np.asarray(y_fused, dtype=np.float64)
    original = np.asarray(original, dtype=np.float64)
    if original.ndim != 3 or original.shape[2] != 3 or y_fused.shape != original.shape[:2]:
        raise ValueError("luminance and color image dimensions differ")
    y_orig = luminance(original)
    ratio = np.clip(y_fused / np.maximum(y_orig, LUMA_FLOOR), 0.0, RATIO_CAP)
    return np.clip(original * ratio[:, :, None], 0.0, 1.0)
