"""Planar transforms and bilinear inverse-mapping warps.

Coordinates are (x, y) with x along columns; a transform maps source
coordinates to destination coordinates.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError


@dataclass(frozen=True)
class Transform2D:
    """3x3 homogeneous matrix, normalized so the bottom-right entry is 1."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64).reshape(3, 3)
        if abs(np.linalg.det(m)) <= 1e-12:
            raise NumericError("transform is singular")
        if abs(m[2, 2]) <= 1e-12:
            raise NumericError("transform cannot be normalized (h33 ~ 0)")
        object.__setattr__(self, "matrix", m / m[2, 2])

    @staticmethod
    def identity():
        return Transform2D(np.eye(3))

    @staticmethod
    def translation(tx, ty):
        return Transform2D(np.array([[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]]))

    def inverse(self):
        return Transform2D(np.linalg.inv(self.matrix))

    def __matmul__(self, other):
        return Transform2D(self.matrix @ other.matrix)

    def apply(self, pts):
        """Map (N, 2) source points to destination coordinates."""
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        hom = np.column_stack([pts, np.ones(len(pts))])
        out = hom @ self.matrix.T
        return out[:, :2] / out[:, 2:3]

    def to_list(self):
        return [[float(v) for v in row] for row in self.matrix]


def bilinear_sample(img, xs, ys):
    """Sample `img` at float coordinates; indices are clamped to the border."""
    h, w = img.shape
    x0 = np.clip(np.floor(xs).astype(np.int64), 0, w - 1)
    y0 = np.clip(np.floor(ys).astype(np.int64), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(xs - x0, 0.0, 1.0)
    fy = np.clip(ys - y0, 0.0, 1.0)
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def warp_image(img, t, out_size=None):
    """Warp by inverse mapping with bilinear sampling.

    Returns (warped, valid) where `valid` flags destination pixels whose
    source sample fell inside the image; pixels outside are set to 0.
    """
    img = np.asarray(img, dtype=np.float64)
    h_out, w_out = out_size if out_size is not None else img.shape
    inv = t.inverse().matrix
    xs, ys = np.meshgrid(np.arange(w_out, dtype=np.float64),
                         np.arange(h_out, dtype=np.float64))
    denom = inv[2, 0] * xs + inv[2, 1] * ys + inv[2, 2]
    sx = (inv[0, 0] * xs + inv[0, 1] * ys + inv[0, 2]) / denom
    sy = (inv[1, 0] * xs + inv[1, 1] * ys + inv[1, 2]) / denom
    valid = (sx >= 0) & (sx <= img.shape[1] - 1) & (sy >= 0) & (sy <= img.shape[0] - 1)
    out = bilinear_sample(img, np.where(valid, sx, 0.0), np.where(valid, sy, 0.0))
    out[~valid] = 0.0
    return out, valid
