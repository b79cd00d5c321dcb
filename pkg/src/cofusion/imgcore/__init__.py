"""Raster substrate: I/O, pyramids, guided filtering, gradients, warps."""

from .filters import (box_count, box_sum, central_gradient, divergence_periodic,
                      forward_gradient_periodic, gradient_magnitude, guided_filter)
from .io import load_image, save_image
from .pyramid import Pyramid, build_pyramids, gaussian_pyramid, max_levels, reconstruct_laplacian
from .warp import Transform2D, bilinear_sample, warp_image

__all__ = [
    "box_count", "box_sum", "central_gradient", "divergence_periodic",
    "forward_gradient_periodic", "gradient_magnitude", "guided_filter",
    "load_image", "save_image",
    "Pyramid", "build_pyramids", "gaussian_pyramid", "max_levels", "reconstruct_laplacian",
    "Transform2D", "bilinear_sample", "warp_image",
]
