"""Hot per-pixel kernels with numba-jitted and pure-numpy implementations.

Every kernel exists twice: a vectorized numpy version and an @njit scalar-loop
version with the same arithmetic expression order, so both paths agree to
floating-point roundoff. The active path is chosen once at import time:
numba when it imports cleanly, unless the environment variable
``GAZEKIT_NUMBA`` is set to ``0``/``off``/``false``.

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

import os

import numpy as np

_FLAG = os.environ.get("GAZEKIT_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "off", "false", "no")

try:  # pragma: no cover - exercised implicitly by import
    if _WANT_NUMBA:
        from numba import njit

        _HAVE_NUMBA = True
    else:
        _HAVE_NUMBA = False
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

if not _HAVE_NUMBA:

    def njit(*args, **kwargs):
        """No-op decorator stand-in when numba is disabled."""

        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def active_backend() -> str:
    """Name of the kernel path selected at import: 'numba' or 'numpy'."""
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# bilinear warp
# ---------------------------------------------------------------------------


def bilinear_warp_numpy(src: np.ndarray, inv_warp: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Inverse-map `src` (H,W,C float) through a homography, bilinear taps.

    `inv_warp` maps output pixel coords to source coords. Source taps outside
    the image contribute zero.
    """
    h, w, c = src.shape
    m = inv_warp
    ys, xs = np.meshgrid(
        np.arange(out_h, dtype=np.float64), np.arange(out_w, dtype=np.float64), indexing="ij"
    )
    denom = m[2, 0] * xs + m[2, 1] * ys + m[2, 2]
    sx = (m[0, 0] * xs + m[0, 1] * ys + m[0, 2]) / denom
    sy = (m[1, 0] * xs + m[1, 1] * ys + m[1, 2]) / denom

    x0 = np.floor(sx)
    y0 = np.floor(sy)
    tx = sx - x0
    ty = sy - y0
    x0i = x0.astype(np.int64)
    y0i = y0.astype(np.int64)

    out = np.zeros((out_h, out_w, c), dtype=src.dtype)
    for dy in (0, 1):
        for dx in (0, 1):
            xi = x0i + dx
            yi = y0i + dy
            valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
            wgt = (tx if dx == 1 else 1.0 - tx) * (ty if dy == 1 else 1.0 - ty)
            xi_c = np.clip(xi, 0, w - 1)
            yi_c = np.clip(yi, 0, h - 1)
            tap = src[yi_c, xi_c, :]
            out += (wgt * valid)[:, :, None] * tap
    return out


@njit(cache=False)
def _bilinear_warp_nb(src, inv_warp, out):  # pragma: no cover - jitted
    h, w, c = src.shape
    out_h, out_w = out.shape[0], out.shape[1]
    for y in range(out_h):
        for x in range(out_w):
            denom = inv_warp[2, 0] * x + inv_warp[2, 1] * y + inv_warp[2, 2]
            sx = (inv_warp[0, 0] * x + inv_warp[0, 1] * y + inv_warp[0, 2]) / denom
            sy = (inv_warp[1, 0] * x + inv_warp[1, 1] * y + inv_warp[1, 2]) / denom
            x0 = np.floor(sx)
            y0 = np.floor(sy)
            tx = sx - x0
            ty = sy - y0
            x0i = int(x0)
            y0i = int(y0)
            for ch in range(c):
                acc = 0.0
                for dy in range(2):
                    for dx in range(2):
                        xi = x0i + dx
                        yi = y0i + dy
                        if 0 <= xi < w and 0 <= yi < h:
                            wx = tx if dx == 1 else 1.0 - tx
                            wy = ty if dy == 1 else 1.0 - ty
                            acc += (wx * wy) * src[yi, xi, ch]
                out[y, x, ch] = acc


def bilinear_warp_numba(src, inv_warp, out_h, out_w):
    out = np.zeros((out_h, out_w, src.shape[2]), dtype=np.float64)
    _bilinear_warp_nb(np.ascontiguousarray(src, dtype=np.float64), inv_warp, out)
    return out.astype(src.dtype, copy=False)


# ---------------------------------------------------------------------------
# RGB <-> HSV (hue in [0,1))
# ---------------------------------------------------------------------------


def rgb_to_hsv_numpy(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.maximum(np.maximum(r, g), b)
    minc = np.minimum(np.minimum(r, g), b)
    delta = maxc - minc
    safe_delta = np.where(delta == 0.0, 1.0, delta)
    h = np.where(
        delta == 0.0,
        0.0,
        np.where(
            maxc == r,
            ((g - b) / safe_delta) % 6.0,
            np.where(maxc == g, (b - r) / safe_delta + 2.0, (r - g) / safe_delta + 4.0),
        ),
    )
    h = h / 6.0
    s = np.where(maxc == 0.0, 0.0, delta / np.where(maxc == 0.0, 1.0, maxc))
    return np.stack([h, s, maxc], axis=-1)


def hsv_to_rgb_numpy(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    h6 = (h % 1.0) * 6.0
    i = np.floor(h6)
    f = h6 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(np.int64) % 6
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


@njit(cache=False)
def _rgb_to_hsv_nb(rgb, out):  # pragma: no cover - jitted
    n = rgb.shape[0]
    for k in range(n):
        r, g, b = rgb[k, 0], rgb[k, 1], rgb[k, 2]
        maxc = max(r, max(g, b))
        minc = min(r, min(g, b))
        delta = maxc - minc
        if delta == 0.0:
            h = 0.0
        elif maxc == r:
            h = ((g - b) / delta) % 6.0
        elif maxc == g:
            h = (b - r) / delta + 2.0
        else:
            h = (r - g) / delta + 4.0
        h = h / 6.0
        s = 0.0 if maxc == 0.0 else delta / maxc
        out[k, 0] = h
        out[k, 1] = s
        out[k, 2] = maxc


@njit(cache=False)
def _hsv_to_rgb_nb(hsv, out):  # pragma: no cover - jitted
    n = hsv.shape[0]
    for k in range(n):
        h, s, v = hsv[k, 0], hsv[k, 1], hsv[k, 2]
        h6 = (h % 1.0) * 6.0
        i = int(np.floor(h6)) % 6
        f = h6 - np.floor(h6)
        p = v * (1.0 - s)
        q = v * (1.0 - s * f)
        t = v * (1.0 - s * (1.0 - f))
        if i == 0:
            r, g, b = v, t, p
        elif i == 1:
            r, g, b = q, v, p
        elif i == 2:
            r, g, b = p, v, t
        elif i == 3:
            r, g, b = p, q, v
        elif i == 4:
            r, g, b = t, p, v
        else:
            r, g, b = v, p, q
        out[k, 0] = r
        out[k, 1] = g
        out[k, 2] = b


def rgb_to_hsv_numba(rgb):
    flat = np.ascontiguousarray(rgb.reshape(-1, 3), dtype=np.float64)
    out = np.empty_like(flat)
    _rgb_to_hsv_nb(flat, out)
    return out.reshape(rgb.shape)


def hsv_to_rgb_numba(hsv):
    flat = np.ascontiguousarray(hsv.reshape(-1, 3), dtype=np.float64)
    out = np.empty_like(flat)
    _hsv_to_rgb_nb(flat, out)
    return out.reshape(hsv.shape)


# ---------------------------------------------------------------------------
# box blur with edge clamping
# ---------------------------------------------------------------------------


def box_blur_numpy(img: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return img.copy()
    h, w = img.shape[0], img.shape[1]
    acc = np.zeros_like(img)
    ys = np.arange(h)
    xs = np.arange(w)
    for dy in range(-radius, radius + 1):
        yi = np.clip(ys + dy, 0, h - 1)
        for dx in range(-radius, radius + 1):
            xi = np.clip(xs + dx, 0, w - 1)
            acc += img[yi][:, xi]
    n = (2 * radius + 1) ** 2
    return acc / n


@njit(cache=False)
def _box_blur_nb(img, radius, out):  # pragma: no cover - jitted
    h, w, c = img.shape
    n = (2 * radius + 1) ** 2
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                acc = 0.0
                for dy in range(-radius, radius + 1):
                    yi = min(max(y + dy, 0), h - 1)
                    for dx in range(-radius, radius + 1):
                        xi = min(max(x + dx, 0), w - 1)
                        acc += img[yi, xi, ch]
                out[y, x, ch] = acc / n


def box_blur_numba(img, radius):
    if radius <= 0:
        return img.copy()
    src = np.ascontiguousarray(img, dtype=np.float64)
    out = np.empty_like(src)
    _box_blur_nb(src, radius, out)
    return out.astype(img.dtype, copy=False)


# ---------------------------------------------------------------------------
# procedural face rasterizer (toy datasets)
# ---------------------------------------------------------------------------
#
# geom layout (float64, pixels):
#   0 fcx  1 fcy  2 frx  3 fry      face ellipse
#   4 elx  5 ely  6 erx  7 ery      eye centers (left, right)
#   8 earx 9 eary                   eye ellipse radii
#  10 plx 11 ply 12 prx 13 pry      pupil centers (left, right)
#  14 prad                          pupil radius
#  15 mcx 16 mcy 17 mrx 18 mry      mouth ellipse
#  19 shade 20 light                radial shading strength, lighting scale
#  21 bg_freq_x 22 bg_freq_y 23 bg_phase 24 bg_amp   background wave texture
#
# colors: (4,3) rows bg, skin, sclera, pupil.
#
# The background carries a smooth sinusoidal texture; without it every
# background patch would be constant-plus-noise, and per-patch-normalized
# reconstruction targets would be irreducible noise.


def render_face_numpy(out_h: int, out_w: int, geom: np.ndarray, colors: np.ndarray) -> np.ndarray:
    ys, xs = np.meshgrid(
        np.arange(out_h, dtype=np.float64), np.arange(out_w, dtype=np.float64), indexing="ij"
    )
    bg, skin, sclera, pupil = colors[0], colors[1], colors[2], colors[3]
    mouth = skin * 0.55

    rf2 = ((xs - geom[0]) / geom[2]) ** 2 + ((ys - geom[1]) / geom[3]) ** 2
    img = np.empty((out_h, out_w, 3), dtype=np.float64)
    face_mask = rf2 <= 1.0
    wave = 1.0 + geom[24] * np.sin(geom[21] * xs + geom[22] * ys + geom[23])
    skin_wave = 1.0 + 0.5 * geom[24] * np.sin(geom[21] * xs + geom[22] * ys + geom[23])
    for ch in range(3):
        base = np.where(
            face_mask, skin[ch] * (1.0 - geom[19] * rf2) * skin_wave, bg[ch] * wave
        )
        img[:, :, ch] = base

    for ex, ey in ((geom[4], geom[5]), (geom[6], geom[7])):
        de2 = ((xs - ex) / geom[8]) ** 2 + ((ys - ey) / geom[9]) ** 2
        m = de2 <= 1.0
        for ch in range(3):
            img[:, :, ch] = np.where(m, sclera[ch], img[:, :, ch])

    dm2 = ((xs - geom[15]) / geom[17]) ** 2 + ((ys - geom[16]) / geom[18]) ** 2
    m = dm2 <= 1.0
    for ch in range(3):
        img[:, :, ch] = np.where(m, mouth[ch], img[:, :, ch])

    for px, py in ((geom[10], geom[11]), (geom[12], geom[13])):
        dp2 = ((xs - px) ** 2 + (ys - py) ** 2) / geom[14] ** 2
        m = dp2 <= 1.0
        for ch in range(3):
            img[:, :, ch] = np.where(m, pupil[ch], img[:, :, ch])

    return img * geom[20]


@njit(cache=False)
def _render_face_nb(out, geom, colors):  # pragma: no cover - jitted
    out_h, out_w = out.shape[0], out.shape[1]
    for y in range(out_h):
        for x in range(out_w):
            rf2 = ((x - geom[0]) / geom[2]) ** 2 + ((y - geom[1]) / geom[3]) ** 2
            inside_face = rf2 <= 1.0
            wave = 1.0 + geom[24] * np.sin(geom[21] * x + geom[22] * y + geom[23])
            skin_wave = 1.0 + 0.5 * geom[24] * np.sin(geom[21] * x + geom[22] * y + geom[23])
            for ch in range(3):
                if inside_face:
                    v = colors[1, ch] * (1.0 - geom[19] * rf2) * skin_wave
                else:
                    v = colors[0, ch] * wave
                de2l = ((x - geom[4]) / geom[8]) ** 2 + ((y - geom[5]) / geom[9]) ** 2
                de2r = ((x - geom[6]) / geom[8]) ** 2 + ((y - geom[7]) / geom[9]) ** 2
                if de2l <= 1.0 or de2r <= 1.0:
                    v = colors[2, ch]
                dm2 = ((x - geom[15]) / geom[17]) ** 2 + ((y - geom[16]) / geom[18]) ** 2
                if dm2 <= 1.0:
                    v = colors[1, ch] * 0.55
                dp2l = ((x - geom[10]) ** 2 + (y - geom[11]) ** 2) / geom[14] ** 2
                dp2r = ((x - geom[12]) ** 2 + (y - geom[13]) ** 2) / geom[14] ** 2
                if dp2l <= 1.0 or dp2r <= 1.0:
                    v = colors[3, ch]
                out[y, x, ch] = v * geom[20]


def render_face_numba(out_h, out_w, geom, colors):
    out = np.empty((out_h, out_w, 3), dtype=np.float64)
    _render_face_nb(out, np.ascontiguousarray(geom), np.ascontiguousarray(colors))
    return out


# ---------------------------------------------------------------------------
# path selection
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:
    bilinear_warp = bilinear_warp_numba
    rgb_to_hsv = rgb_to_hsv_numba
    hsv_to_rgb = hsv_to_rgb_numba
    box_blur = box_blur_numba
    render_face = render_face_numba
else:
    bilinear_warp = bilinear_warp_numpy
    rgb_to_hsv = rgb_to_hsv_numpy
    hsv_to_rgb = hsv_to_rgb_numpy
    box_blur = box_blur_numpy
    render_face = render_face_numpy
