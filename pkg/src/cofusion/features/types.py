"""Interest-point containers shared by detection, merging and matching."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Feature:
    """Sub-pixel interest point.

    Coordinates are in the pixel frame of `level`; `exposure` is the
    0-based source channel; `descriptor`, when present, is unit L2.
    """

    x: float
    y: float
    level: int = 0
    exposure: int = 0
    response: float = 0.0
    descriptor: np.ndarray = None

    def base_xy(self):
        """Coordinates scaled back to the level-0 pixel grid."""
        s = float(1 << self.level)
        return self.x * s, self.y * s


@dataclass
class FeatureSet:
    """Ordered features plus the source image dimensions."""

    features: list = field(default_factory=list)
    width: int = 0
    height: int = 0

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def __getitem__(self, i):
        return self.features[i]

    def positions(self, base=False):
        if not self.features:
            return np.zeros((0, 2))
        if base:
            return np.array([f.base_xy() for f in self.features])
        return np.array([[f.x, f.y] for f in self.features])

    def descriptors(self):
        return np.array([f.descriptor for f in self.features])


@dataclass
class ExposureWeightMatrix:
    """Region-by-exposure weights w_m(k) with the per-region optimal exposure."""

    weights: np.ndarray  # (M, K)
    i_opt: np.ndarray    # (M,) continuous in [1, K]
    sigma: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError(f"weights must be (M, K), got {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if np.any(w.max(axis=1) <= 0):
            raise ValueError("every region row needs at least one positive weight")
        self.weights = w
        self.i_opt = np.asarray(self.i_opt, dtype=np.float64)
