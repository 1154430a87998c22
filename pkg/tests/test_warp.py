"""Bilinear homography warping against per-pixel oracles."""

import numpy as np
import pytest

from gazekit import _accel
from gazekit.errors import NumericError
from gazekit.geometry import warp_image


def checkerboard(h, w, cell=2):
    ys, xs = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    board = ((ys // cell + xs // cell) % 2).astype(np.float64)
    return np.stack([board] * 3, axis=-1)


def bilinear_oracle(img, sx, sy):
    """Direct 4-tap bilinear sample at a single float coordinate."""
    h, w, _ = img.shape
    x0, y0 = int(np.floor(sx)), int(np.floor(sy))
    tx, ty = sx - x0, sy - y0
    out = np.zeros(img.shape[2])
    for dy, wy in ((0, 1 - ty), (1, ty)):
        for dx, wx in ((0, 1 - tx), (1, tx)):
            xi, yi = x0 + dx, y0 + dy
            if 0 <= xi < w and 0 <= yi < h:
                out += wx * wy * img[yi, xi]
    return out


class TestWarpImage:
    def test_identity_is_pixel_exact(self):
        rng = np.random.default_rng(0)
        img = rng.random((16, 16, 3))
        out = warp_image(img, np.eye(3), 16, 16)
        assert np.array_equal(out, img)

    def test_two_x_scale_matches_bilinear_oracle(self):
        img = checkerboard(8, 8)
        scale = np.diag([2.0, 2.0, 1.0])
        out = warp_image(img, scale, 16, 16)
        inv = np.linalg.inv(scale)
        for y, x in [(3, 5), (7, 2), (10, 11), (1, 1), (14, 9)]:
            src = inv @ np.array([x, y, 1.0])
            expect = bilinear_oracle(img, src[0] / src[2], src[1] / src[2])
            np.testing.assert_allclose(out[y, x], expect, atol=1e-12)

    def test_round_trip_smooth_gradient(self):
        ys, xs = np.meshgrid(np.linspace(0, 1, 32), np.linspace(0, 1, 32), indexing="ij")
        img = np.stack([xs, ys, 0.5 * (xs + ys)], axis=-1)
        warp = np.array([[1.1, 0.05, 1.5], [-0.04, 0.95, 2.0], [0.0001, -0.0002, 1.0]])
        once = warp_image(img, warp, 32, 32)
        back = warp_image(once, np.linalg.inv(warp), 32, 32)
        interior = (slice(6, 26), slice(6, 26))
        assert np.max(np.abs(back[interior] - img[interior])) < 0.02

    def test_out_of_bounds_zero(self):
        img = np.ones((8, 8, 3))
        shift = np.array([[1.0, 0.0, 20.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        out = warp_image(img, shift, 8, 8)
        assert np.all(out == 0.0)

    def test_singular_warp_rejected(self):
        with pytest.raises(NumericError, match="singular"):
            warp_image(np.ones((4, 4, 3)), np.zeros((3, 3)), 4, 4)


class TestKernelPathsAgree:
    def test_numba_and_numpy_match(self):
        rng = np.random.default_rng(1)
        img = rng.random((20, 24, 3))
        warp = np.array([[0.9, 0.1, 2.0], [-0.08, 1.05, -1.0], [0.0002, 0.0001, 1.0]])
        inv = np.linalg.inv(warp)
        a = _accel.bilinear_warp_numpy(img, inv, 20, 24)
        b = _accel.bilinear_warp_numba(img, inv, 20, 24) if _accel.active_backend() == "numba" else a
        np.testing.assert_allclose(a, b, atol=1e-13)
