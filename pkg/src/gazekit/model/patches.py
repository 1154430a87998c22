"""Patch extraction and per-patch pixel normalization."""

from dataclasses import dataclass

import numpy as np

from gazekit.errors import ShapeError

PATCH_NORM_EPS = 1e-6


@dataclass(frozen=True)
class PatchGrid:
    """Square image cut into a raster of square patches."""

    image_size: int
    patch_size: int
    channels: int = 3

    def __post_init__(self):
        if self.image_size % self.patch_size != 0:
            raise ShapeError(
                f"PatchGrid: patch size {self.patch_size} does not divide image size {self.image_size}"
            )

    @property
    def side(self) -> int:
        return self.image_size // self.patch_size

    @property
    def n_patches(self) -> int:
        return self.side**2

    @property
    def patch_dim(self) -> int:
        return self.patch_size**2 * self.channels


def patchify(img: np.ndarray, grid: PatchGrid) -> np.ndarray:
    """(H, W, C) -> (N, patch_dim) rows in raster order, or batched
    (B, H, W, C) -> (B, N, patch_dim). Pixels within a patch stay row-major
    with channels fastest."""
    img = np.asarray(img)
    batched = img.ndim == 4
    if not batched:
        img = img[None]
    b, h, w, c = img.shape
    if h != grid.image_size or w != grid.image_size or c != grid.channels:
        raise ShapeError(
            f"patchify: image shape {img.shape[1:]} does not match grid "
            f"({grid.image_size}, {grid.image_size}, {grid.channels})"
        )
    g, p = grid.side, grid.patch_size
    out = (
        img.reshape(b, g, p, g, p, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(b, grid.n_patches, grid.patch_dim)
    )
    return out if batched else out[0]


def unpatchify(patches: np.ndarray, grid: PatchGrid) -> np.ndarray:
    """Inverse of patchify; bit-exact round trip."""
    patches = np.asarray(patches)
    batched = patches.ndim == 3
    if not batched:
        patches = patches[None]
    b, n, d = patches.shape
    if n != grid.n_patches or d != grid.patch_dim:
        raise ShapeError(
            f"unpatchify: got {patches.shape[1:]}, expected ({grid.n_patches}, {grid.patch_dim})"
        )
    g, p, c = grid.side, grid.patch_size, grid.channels
    img = (
        patches.reshape(b, g, g, p, p, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(b, grid.image_size, grid.image_size, c)
    )
    return img if batched else img[0]


def per_patch_normalize(patches: np.ndarray, eps: float = PATCH_NORM_EPS) -> np.ndarray:
    """Standardize each patch row to zero mean and unit population variance."""
    patches = np.asarray(patches, dtype=np.float64)
    mu = patches.mean(axis=-1, keepdims=True)
    var = patches.var(axis=-1, keepdims=True)
    return (patches - mu) / np.sqrt(var + eps)
