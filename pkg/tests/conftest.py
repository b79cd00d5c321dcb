"""Shared synthetic-scene helpers for the test suite."""

import numpy as np


def textured_scene(seed, n=128, scale=2.8, tex=0.15):
    """Smooth radiance bumps with multiplicative sinusoidal texture.

    The scale pushes a large fraction of the brightest channel into
    saturation so fusion has real work to do.
    """
    r = np.random.default_rng(seed)
    yy, xx = np.indices((n, n), dtype=np.float64)
    bumps = np.zeros((n, n))
    for _ in range(6):
        cy, cx = r.uniform(10, n - 10, 2)
        s = r.uniform(12, 30)
        bumps += r.uniform(0.4, 1.0) * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * s * s))
    bumps /= bumps.max()
    fx, fy = r.uniform(0.8, 1.6, 2)
    texture = 1.0 + tex * np.sin(xx * fx) * np.sin(yy * fy)
    return (0.25 + 0.75 * bumps) * texture * scale


def corner_scene(seed, n=192):
    """Smooth background plus high-contrast rectangles (corner-rich)."""
    from scipy.ndimage import gaussian_filter
    rng = np.random.default_rng(seed)
    yy, xx = np.indices((n, n)) / n
    img = 0.25 + 0.5 * yy + 0.15 * np.sin(xx * 7)
    for _ in range(25):
        w = int(rng.integers(10, 30))
        h = int(rng.integers(10, 30))
        y0 = int(rng.integers(0, n - h))
        x0 = int(rng.integers(0, n - w))
        img[y0:y0 + h, x0:x0 + w] = rng.uniform(0.05, 1.4)
    return gaussian_filter(img, 1.2)


def random_homography(seed, n, max_rot_deg=5.0, max_shift=20.0, projective=1e-5):
    """Rotation about the image center + translation + mild projective terms."""
    from cofusion.imgcore import Transform2D
    rng = np.random.default_rng(seed + 1000)
    th = np.deg2rad(rng.uniform(-max_rot_deg, max_rot_deg))
    tx, ty = rng.uniform(-max_shift, max_shift, 2)
    c = n / 2.0
    rot = np.array([[np.cos(th), -np.sin(th), 0], [np.sin(th), np.cos(th), 0], [0, 0, 1.0]])
    to = np.array([[1, 0, -c], [0, 1, -c], [0, 0, 1.0]])
    back = np.array([[1, 0, c], [0, 1, c], [0, 0, 1.0]])
    proj = np.eye(3)
    proj[2, 0] = rng.uniform(-1, 1) * projective
    proj[2, 1] = rng.uniform(-1, 1) * projective
    shift = np.array([[1, 0, tx], [0, 1, ty], [0, 0, 1.0]])
    return Transform2D(shift @ back @ proj @ rot @ to)
