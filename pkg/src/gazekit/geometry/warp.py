"""Homography warping of images by inverse-mapped bilinear resampling."""

import numpy as np

from gazekit import _accel
from gazekit.errors import NumericError


def warp_image(img: np.ndarray, warp: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Warp an (H, W, C) float image by a 3x3 homography.

    The homography maps source pixel coordinates to output coordinates; the
    image is resampled by inverse mapping with bilinear taps, and source taps
    outside the image contribute zero.
    """
    img = np.asarray(img)
    if img.ndim != 3:
        raise NumericError(f"warp_image: expected (H, W, C) image, got shape {img.shape}")
    warp = np.asarray(warp, dtype=np.float64)
    if warp.shape != (3, 3):
        raise NumericError(f"warp_image: warp must be 3x3, got {warp.shape}")
    det = np.linalg.det(warp)
    if not np.isfinite(det) or abs(det) < 1e-12:
        raise NumericError("warp_image: singular warp matrix")
    inv = np.linalg.inv(warp)
    return _accel.bilinear_warp(img.astype(np.float64, copy=False), inv, int(out_h), int(out_w))
